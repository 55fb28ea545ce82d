"""FK random-cluster model on a square-bond Dobrushin domain.

Edges of arc_ab are wired (open), edges of arc_ba dual-wired (closed);
only interior edges are resampled.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from ..errors import InvalidConfigurationError, ParameterError, UnsupportedLatticeError
from ..geometry import DiscreteDomain, medial_graph
from ..geometry.medial import CLOSED, OPEN
from ..rng import as_rng
from .constants import p_sd


@dataclass(frozen=True, eq=False)
class BondConfig:
    domain: DiscreteDomain
    states: np.ndarray  # uint8 per primal edge, 1 = open

    def check_dobrushin(self) -> bool:
        forced = fk_tables(self.domain)["forced"]
        fixed = forced >= 0
        return bool(np.all(self.states[fixed] == forced[fixed]))

    @property
    def n_open(self) -> int:
        return int(self.states.sum())


@lru_cache(maxsize=64)
def _tables(domain):
    if domain.kind != "square-bond":
        raise UnsupportedLatticeError(f"FK model needs a square-bond domain, got {domain.kind}")
    med = medial_graph(domain)
    md = med.extra["medial"]
    forced = md.forced[:domain.n_edges].copy()
    n = domain.n_vertices
    deg = np.zeros(n + 1, dtype=np.int64)
    for u, v in domain.edges:
        deg[u + 1] += 1
        deg[v + 1] += 1
    ptr = np.cumsum(deg)
    nb = np.empty(ptr[-1], dtype=np.int64)
    ne = np.empty(ptr[-1], dtype=np.int64)
    fill = ptr[:-1].copy()
    for e, (u, v) in enumerate(domain.edges):
        nb[fill[u]], ne[fill[u]] = v, e
        fill[u] += 1
        nb[fill[v]], ne[fill[v]] = u, e
        fill[v] += 1
    wired = np.zeros(n, dtype=np.bool_)
    wired[list(domain.arc_ab)] = True
    return {"medial": med, "forced": forced, "random": md.random_edges.copy(),
            "ptr": ptr, "nb": nb, "ne": ne, "wired": wired,
            "edges": np.ascontiguousarray(domain.edges)}


def fk_tables(domain: DiscreteDomain) -> dict:
    """Cached adjacency and boundary data for ``domain``."""
    return _tables(domain)


def dobrushin_bonds(domain: DiscreteDomain, fill: int = 0) -> np.ndarray:
    t = fk_tables(domain)
    st = np.full(domain.n_edges, fill, dtype=np.uint8)
    st[t["forced"] == OPEN] = 1
    st[t["forced"] == CLOSED] = 0
    return st


def _check_params(q, p):
    if not (0.0 < q <= 4.0):
        raise ParameterError(f"q={q} outside (0, 4]")
    if not (0.0 < p < 1.0):
        raise ParameterError(f"p={p} outside (0, 1)")


# -- heat bath ---------------------------------------------------------------

@njit(cache=True)
def _connected(u, v, skip, state, ptr, nb, ne, wired, mark, gen, qa, qb):
    """Bidirectional BFS over open edges other than ``skip``.

    Vertices on the wired arc count as one vertex. ``mark`` holds +gen for
    the u-side and -gen for the v-side.
    """
    if u == v or (wired[u] and wired[v]):
        return True
    ha = ta = hb = tb = 0
    qa[ta] = u
    ta += 1
    mark[u] = gen
    qb[tb] = v
    tb += 1
    mark[v] = -gen
    while ha < ta and hb < tb:
        for side in range(2):
            if side == 0:
                x = qa[ha]
                ha += 1
                s = gen
            else:
                x = qb[hb]
                hb += 1
                s = -gen
            for j in range(ptr[x], ptr[x + 1]):
                e = ne[j]
                if e == skip or state[e] == 0:
                    continue
                y = nb[j]
                if mark[y] == -s:
                    return True
                if mark[y] != s:
                    mark[y] = s
                    if side == 0:
                        qa[ta] = y
                        ta += 1
                    else:
                        qb[tb] = y
                        tb += 1
            if ha >= ta or hb >= tb:
                break
    return False


@njit(cache=True)
def heat_bath_kernel(state, random_edges, edges, ptr, nb, ne, wired, p, q, n_updates, rng,
                     mark, gen0):
    """Random-scan single-bond heat bath; returns the next stamp generation."""
    nv = mark.shape[0]
    qa = np.empty(nv, dtype=np.int64)
    qb = np.empty(nv, dtype=np.int64)
    p_cut = p / (p + q * (1.0 - p))
    gen = gen0
    nr = random_edges.shape[0]
    for _ in range(n_updates):
        e = random_edges[rng.integers(0, nr)]
        gen += 1
        if _connected(edges[e, 0], edges[e, 1], e, state, ptr, nb, ne, wired, mark, gen, qa, qb):
            pe = p
        else:
            pe = p_cut
        state[e] = 1 if rng.random() < pe else 0
    return gen


# -- Edwards-Sokal (q = 2) ---------------------------------------------------

@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def swendsen_wang_kernel(state, random_edges, edges, wired, p, n_sweeps, rng):
    """Alternate spin and bond updates; arc_ab spins are fixed to +1."""
    nv = wired.shape[0]
    parent = np.empty(nv, dtype=np.int64)
    spin_of_root = np.zeros(nv, dtype=np.int8)
    spin = np.empty(nv, dtype=np.int8)
    w0 = -1
    for v in range(nv):
        if wired[v]:
            w0 = v
            break
    for _ in range(n_sweeps):
        for v in range(nv):
            parent[v] = v
        for v in range(nv):
            if wired[v]:
                parent[v] = w0
        for e in range(edges.shape[0]):
            if state[e] == 1:
                ra = _find(parent, edges[e, 0])
                rb = _find(parent, edges[e, 1])
                if ra != rb:
                    if rb == w0:
                        parent[ra] = rb
                    else:
                        parent[rb] = ra
        rw = _find(parent, w0)
        for v in range(nv):
            spin_of_root[v] = 0
        spin_of_root[rw] = 1
        for v in range(nv):
            r = _find(parent, v)
            if spin_of_root[r] == 0:
                spin_of_root[r] = 1 if rng.random() < 0.5 else -1
            spin[v] = spin_of_root[r]
        for k in range(random_edges.shape[0]):
            e = random_edges[k]
            if spin[edges[e, 0]] == spin[edges[e, 1]] and rng.random() < p:
                state[e] = 1
            else:
                state[e] = 0


def sample_fk(domain: DiscreteDomain, q: float, p: float | None = None, sweeps: int = 1,
              rng=None, method: str = "heat-bath", init: BondConfig | None = None) -> BondConfig:
    """Sample the Dobrushin random-cluster measure.

    ``method`` is "heat-bath" (any q) or "swendsen-wang" (q = 2 only). A
    heat-bath sweep is one update per random edge on average.
    """
    if p is None:
        p = p_sd(q)
    _check_params(q, p)
    if sweeps < 0:
        raise ParameterError("sweeps must be non-negative")
    rng = as_rng(rng)
    t = fk_tables(domain)
    if init is not None:
        state = np.array(init.states, dtype=np.uint8)
    else:
        state = dobrushin_bonds(domain)
        state[t["random"]] = (rng.random(len(t["random"])) < p).astype(np.uint8)
    if len(t["random"]) and sweeps:
        if method == "heat-bath":
            mark = np.zeros(domain.n_vertices, dtype=np.int64)
            heat_bath_kernel(state, t["random"], t["edges"], t["ptr"], t["nb"], t["ne"],
                             t["wired"], float(p), float(q), sweeps * len(t["random"]), rng,
                             mark, 0)
        elif method == "swendsen-wang":
            if abs(q - 2.0) > 1e-12:
                raise ParameterError("the Edwards-Sokal sampler needs q = 2")
            swendsen_wang_kernel(state, t["random"], t["edges"], t["wired"], float(p), int(sweeps),
                                 rng)
        else:
            raise ParameterError(f"unknown FK method {method!r}")
    return BondConfig(domain, state)


# -- exact quantities for enumerable domains --------------------------------

def count_clusters(domain: DiscreteDomain, states) -> int:
    """Open clusters with the wired arc counted once (union-find)."""
    t = fk_tables(domain)
    parent = list(range(domain.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    w = domain.arc_ab[0]
    for v in domain.arc_ab:
        parent[find(v)] = find(w)
    for e, (u, v) in enumerate(t["edges"]):
        if states[e]:
            parent[find(u)] = find(v)
    return len({find(v) for v in range(domain.n_vertices)})


def enumerate_states(domain: DiscreteDomain, fixed: dict | None = None):
    """All Dobrushin bond configurations, optionally with extra fixed edges."""
    t = fk_tables(domain)
    base = dobrushin_bonds(domain)
    free = [int(e) for e in t["random"] if not fixed or int(e) not in fixed]
    if fixed:
        for e, s in fixed.items():
            base[e] = s
    if len(free) > 24:
        from ..errors import EnumerationLimitError
        raise EnumerationLimitError(f"{len(free)} free edges exceed the enumeration limit")
    for bits in range(1 << len(free)):
        st = base.copy()
        for i, e in enumerate(free):
            st[e] = (bits >> i) & 1
        yield st


def fk_weight(domain, states, q, p) -> float:
    """p^open (1-p)^closed q^clusters over the random edges."""
    t = fk_tables(domain)
    r = t["random"]
    o = int(np.sum(states[r]))
    return p ** o * (1 - p) ** (len(r) - o) * q ** count_clusters(domain, states)


def heat_bath_transition_matrix(domain: DiscreteDomain, q: float, p: float):
    """Exact random-scan heat-bath transition matrix over all configurations.

    Returns (states list, stationary weights normalised, P).
    """
    _check_params(q, p)
    t = fk_tables(domain)
    states = list(enumerate_states(domain))
    key = {s.tobytes(): i for i, s in enumerate(states)}
    pi = np.array([fk_weight(domain, s, q, p) for s in states])
    pi /= pi.sum()
    r = t["random"]
    P = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for e in r:
            s0, s1 = s.copy(), s.copy()
            s0[e], s1[e] = 0, 1
            w0, w1 = fk_weight(domain, s0, q, p), fk_weight(domain, s1, q, p)
            P[i, key[s1.tobytes()]] += w1 / (w0 + w1) / len(r)
            P[i, key[s0.tobytes()]] += w0 / (w0 + w1) / len(r)
    return states, pi, P


def validate_bonds(config: BondConfig):
    if not config.check_dobrushin():
        raise InvalidConfigurationError("bond configuration violates the Dobrushin boundary")
