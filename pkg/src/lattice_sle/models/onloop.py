"""O(n) loop model on the hexagonal lattice: loops plus a chord from a to b.

The chain flips one hexagonal face at a time (symmetric difference with the
face boundary). Flips keep the parity of every vertex degree, so a and b
stay the only odd vertices; moves that create a degree above 2 are
rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from ..errors import DegenerateDomainError, EnumerationLimitError, ParameterError, \
    UnsupportedLatticeError
from ..geometry import DiscreteDomain
from ..rng import as_rng


@dataclass(frozen=True, eq=False)
class LoopConfig:
    domain: DiscreteDomain
    occupied: np.ndarray            # uint8 per lattice edge
    chord: tuple                    # vertex path a -> b
    loops: tuple = field(default=())  # each a closed vertex cycle (first vertex not repeated)

    @property
    def n_loops(self) -> int:
        return len(self.loops)

    @property
    def length(self) -> int:
        return int(np.sum(self.occupied))


@lru_cache(maxsize=64)
def _tables(domain):
    if domain.kind != "hexagonal":
        raise UnsupportedLatticeError("the O(n) sampler needs a hexagonal domain")
    faces = domain.extra["faces"]
    eindex = {(int(u), int(v)): k for k, (u, v) in enumerate(domain.edges)}
    fe = np.empty(faces.shape, dtype=np.int64)
    for f in range(faces.shape[0]):
        for k in range(6):
            u, v = int(faces[f, k]), int(faces[f, (k + 1) % 6])
            fe[f, k] = eindex[(min(u, v), max(u, v))]
    return {"faces": np.ascontiguousarray(faces), "face_edges": fe,
            "edges": np.ascontiguousarray(domain.edges), "eindex": eindex}


def boundary_chord(domain: DiscreteDomain) -> np.ndarray:
    """Occupation with the chord running along arc_ab and no loops."""
    t = _tables(domain)
    occ = np.zeros(domain.n_edges, dtype=np.uint8)
    arc = domain.arc_ab
    for u, v in zip(arc[:-1], arc[1:]):
        occ[t["eindex"][(min(u, v), max(u, v))]] = 1
    return occ


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _n_components(occ, edges, nv, parent):
    """Components of the occupied subgraph (isolated vertices ignored)."""
    for v in range(nv):
        parent[v] = v
    touched = 0
    nc = 0
    for e in range(edges.shape[0]):
        if occ[e]:
            ra = _find(parent, edges[e, 0])
            rb = _find(parent, edges[e, 1])
            if ra != rb:
                parent[ra] = rb
                nc -= 1
    for v in range(nv):
        parent[v] = _find(parent, v)
    deg = np.zeros(nv, dtype=np.int64)
    for e in range(edges.shape[0]):
        if occ[e]:
            deg[edges[e, 0]] += 1
            deg[edges[e, 1]] += 1
    for v in range(nv):
        if deg[v] > 0:
            touched += 1
    return touched + nc


@njit(cache=True)
def on_metropolis_kernel(occ, deg, faces, face_edges, edges, n, x, n_updates, rng):
    """Random-face Metropolis with ratio n^{d loops} x^{d length}."""
    nf = faces.shape[0]
    nv = deg.shape[0]
    parent = np.empty(nv, dtype=np.int64)
    n_loops = _n_components(occ, edges, nv, parent) - 1
    accepted = 0
    for _ in range(n_updates):
        f = rng.integers(0, nf)
        ok = True
        dlen = 0
        for k in range(6):
            e = face_edges[f, k]
            dlen += 1 - 2 * occ[e]
        for k in range(6):
            v = faces[f, k]
            e_in = face_edges[f, (k + 5) % 6]
            e_out = face_edges[f, k]
            d = deg[v] + (1 - 2 * occ[e_in]) + (1 - 2 * occ[e_out])
            if d > 2:
                ok = False
                break
        if not ok:
            continue
        for k in range(6):
            occ[face_edges[f, k]] ^= 1
        new_loops = _n_components(occ, edges, nv, parent) - 1
        dl = new_loops - n_loops
        if dl >= 0:
            ratio = n ** dl * x ** dlen
        elif n == 0.0:
            ratio = np.inf
        else:
            ratio = x ** dlen / n ** (-dl)
        if rng.random() < ratio:
            for k in range(6):
                v = faces[f, k]
                e_in = face_edges[f, (k + 5) % 6]
                e_out = face_edges[f, k]
                # occ already flipped: undo the old contribution, add the new
                deg[v] += (2 * occ[e_in] - 1) + (2 * occ[e_out] - 1)
            n_loops = new_loops
            accepted += 1
        else:
            for k in range(6):
                occ[face_edges[f, k]] ^= 1
    return accepted


def _degrees(domain, occ):
    deg = np.zeros(domain.n_vertices, dtype=np.int64)
    e = np.asarray(domain.edges)
    np.add.at(deg, e[occ == 1, 0], 1)
    np.add.at(deg, e[occ == 1, 1], 1)
    return deg


def decompose(domain: DiscreteDomain, occ) -> LoopConfig:
    """Split an occupation into the a -> b chord and closed loops."""
    occ = np.asarray(occ, dtype=np.uint8)
    adj = {}
    for k in np.flatnonzero(occ):
        u, v = (int(w) for w in domain.edges[k])
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(len(n) > 2 for n in adj.values()):
        raise DegenerateDomainError("vertex of degree above 2")
    seen = set()

    def walk(start):
        path, prev, cur = [start], None, start
        seen.add(start)
        while True:
            nxt = [w for w in adj.get(cur, []) if w != prev]
            if not nxt or nxt[0] == start:
                return path
            prev, cur = cur, nxt[0]
            if cur in seen:
                return path
            seen.add(cur)
            path.append(cur)

    chord = walk(domain.a)
    loops = []
    for v in adj:
        if v not in seen:
            loops.append(tuple(walk(v)))
    return LoopConfig(domain, occ, tuple(chord), tuple(loops))


def sample_loop_on(domain: DiscreteDomain, n: float, x: float, sweeps: int = 1, rng=None,
                   init: LoopConfig | None = None) -> LoopConfig:
    """Metropolis sample of weight n^{#loops} x^{#occupied edges}.

    The chord length counts in the x-weight. A sweep is one proposal per
    hexagonal face on average.
    """
    if not (0.0 <= n <= 2.0):
        raise ParameterError(f"n={n} outside [0, 2]")
    if not (x > 0):
        raise ParameterError(f"x must be positive, got {x}")
    t = _tables(domain)
    if t["faces"].shape[0] == 0:
        raise DegenerateDomainError("domain has no faces to flip")
    rng = as_rng(rng)
    occ = np.array(init.occupied if init is not None else boundary_chord(domain), dtype=np.uint8)
    deg = _degrees(domain, occ)
    on_metropolis_kernel(occ, deg, t["faces"], t["face_edges"], t["edges"], float(n), float(x),
                         int(sweeps) * t["faces"].shape[0], rng)
    return decompose(domain, occ)


def enumerate_loop_configs(domain: DiscreteDomain, max_edges: int = 20):
    """All occupations with odd vertices exactly {a, b} and degrees <= 2."""
    E = domain.n_edges
    if E > max_edges:
        raise EnumerationLimitError(f"{E} edges exceed the enumeration limit {max_edges}")
    e = np.asarray(domain.edges)
    out = []
    for bits in range(1 << E):
        occ = np.array([(bits >> k) & 1 for k in range(E)], dtype=np.uint8)
        deg = np.zeros(domain.n_vertices, dtype=np.int64)
        np.add.at(deg, e[occ == 1, 0], 1)
        np.add.at(deg, e[occ == 1, 1], 1)
        if deg.max() > 2:
            continue
        odd = set(np.flatnonzero(deg % 2 == 1).tolist())
        if odd == {domain.a, domain.b}:
            out.append(occ)
    return out


def loop_weight(domain, occ, n, x) -> float:
    cfg = decompose(domain, occ)
    return n ** cfg.n_loops * x ** cfg.length


def metropolis_transition_matrix(domain: DiscreteDomain, n: float, x: float):
    """Exact transition matrix of the face-flip chain on all valid states."""
    t = _tables(domain)
    states = enumerate_loop_configs(domain)
    key = {s.tobytes(): i for i, s in enumerate(states)}
    w = np.array([loop_weight(domain, s, n, x) for s in states])
    pi = w / w.sum()
    nf = t["faces"].shape[0]
    P = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for f in range(nf):
            s2 = s.copy()
            s2[t["face_edges"][f]] ^= 1
            j = key.get(s2.tobytes())
            if j is None:
                P[i, i] += 1.0 / nf
                continue
            acc = min(1.0, w[j] / w[i])
            P[i, j] += acc / nf
            P[i, i] += (1 - acc) / nf
    return states, pi, P
