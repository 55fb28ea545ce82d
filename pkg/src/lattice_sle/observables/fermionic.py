"""Fermionic observable of the FK model on a medial Dobrushin domain.

Edge value: F_E(e) = E[1{e in chord} exp(i sigma (W(e -> b) - theta_b))],
sigma = 1 - 4k with k the q-dependent exponent, W the winding of the chord
from e to its last edge and theta_b = angle of the last edge's
black-to-white vector. F_E(e) lies on the line through sqrt(conj(e)),
where e is the black-to-white unit vector of e.

The vertex value F(z) uses the same formula with the winding taken to the
vertex itself. A chord passing z turns by +-pi/2 there, so F(z) equals half
the sum of the incident edge values divided by cos(sigma pi/4); the
projection of F(z) onto l(e) is F_E(e)/cos(sigma pi/4).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..errors import EnumerationLimitError, InconclusiveNoiseError, ParameterError
from ..geometry import DiscreteDomain, medial_faces, medial_graph
from ..geometry.medial import DIR_ANGLE, FREE, PAIRING, medial_positions
from ..interface.medial_trace import count_loops_kernel, trace_chord_kernel
from ..models.constants import p_sd, spin_exponent
from ..models.fk import dobrushin_bonds, fk_tables, heat_bath_kernel, swendsen_wang_kernel
from ..rng import as_rng

NORMALIZATION = 1.0 / (2.0 * np.cos(np.pi / 8.0))
_PAIRING = np.ascontiguousarray(PAIRING)
_ANGLE = np.ascontiguousarray(DIR_ANGLE)


def sigma_of_q(q: float) -> float:
    """Spin of the observable, 1 - 4k (1/2 at q = 2)."""
    return spin_exponent(q)


@dataclass(frozen=True, eq=False)
class EdgeObservable:
    domain: DiscreteDomain          # medial domain
    q: float
    edge_values: np.ndarray         # complex per medial edge
    vertex_values: np.ndarray       # complex per medial vertex, phantoms included
    normalization: float = 1.0      # factor already applied to the values
    edge_stderr: np.ndarray | None = None   # (Em, 2) real/imag standard errors
    n_samples: int | None = None    # None for exact enumeration
    extra: dict = field(default_factory=dict)

    @property
    def medial(self):
        return self.domain.extra["medial"]

    @property
    def raw_edge_values(self) -> np.ndarray:
        return self.edge_values / self.normalization

    def free_vertices(self) -> np.ndarray:
        """Mask of medial vertices whose bond is not forced (phantoms excluded)."""
        md = self.medial
        free = np.zeros(len(md.coords), dtype=bool)
        n = self.domain.n_vertices
        free[:n] = md.forced[:n] == FREE
        return free

    def to_csv(self) -> str:
        md = self.medial
        mid = 0.5 * (medial_positions(self.domain, md.coords[md.edge_ends[:, 0]]) +
                     medial_positions(self.domain, md.coords[md.edge_ends[:, 1]]))
        se = self.edge_stderr if self.edge_stderr is not None else np.zeros((len(mid), 2))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_x", "edge_y", "re_F", "im_F", "stderr_re", "stderr_im"])
        for z, f, s in zip(mid, self.edge_values, se):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(f.real)),
                        repr(float(f.imag)), repr(float(s[0])), repr(float(s[1]))])
        return buf.getvalue()


def line_directions(domain: DiscreteDomain) -> np.ndarray:
    """Unit vector spanning the line of F_E on each medial edge."""
    md = domain.extra["medial"]
    tail = md.edge_ends[:, 0]
    d = np.array([int(np.flatnonzero(md.eid[t] == k)[0]) for k, t in enumerate(tail)])
    return np.exp(-0.5j * (DIR_ANGLE[d] + np.pi / 2))


def vertex_values_from_edges(domain: DiscreteDomain, fe: np.ndarray, q: float | None = None) -> np.ndarray:
    """Half-sum of incident edge values; with ``q``, rescaled to the vertex formula."""
    md = domain.extra["medial"]
    fv = np.zeros(len(md.coords), dtype=complex)
    np.add.at(fv, md.edge_ends[:, 0], 0.5 * fe)
    np.add.at(fv, md.edge_ends[:, 1], 0.5 * fe)
    if q is not None:
        fv /= vertex_scale(q)
    return fv


def vertex_scale(q: float) -> float:
    """cos(sigma pi/4): vertex-formula value times this is the edge half-sum."""
    return float(np.cos(sigma_of_q(q) * np.pi / 4))


@njit(cache=True)
def _chord_phases(verts, dirs, n, sigma, angle):
    """exp(i sigma (W(edge j -> last) - theta_b)) for j < n."""
    wf = np.zeros(n)
    for j in range(n - 2, -1, -1):
        t = angle[dirs[j + 1]] - angle[dirs[j]]
        while t > np.pi:
            t -= 2 * np.pi
        while t < -np.pi:
            t += 2 * np.pi
        wf[j] = wf[j + 1] + t
    thb = angle[dirs[n - 1]] + np.pi / 2
    out = np.empty(n, dtype=np.complex128)
    for j in range(n):
        out[j] = np.exp(1j * sigma * (wf[j] - thb))
    return out


@njit(cache=True)
def enumerate_kernel(base, free, nbr, eid, mtype, partner, primal_edge, source, sink, pairing,
                     edge_ends, angle, sigma, sqrt_q, x, start, acc):
    """Sum weight * phase over all 2^len(free) configurations; returns Z.

    Only chord positions >= ``start`` contribute to ``acc``.
    """
    M = nbr.shape[0]
    nE = edge_ends.shape[0]
    verts = np.zeros(4 * M + 2, dtype=np.int64)
    dirs = np.zeros(4 * M + 2, dtype=np.int64)
    used = np.zeros(nE, dtype=np.bool_)
    state = base.copy()
    z = 0.0
    nf = free.shape[0]
    for bits in range(1 << nf):
        n_open = 0
        for i in range(nf):
            s = (bits >> i) & 1
            state[free[i]] = s
            n_open += s
        used[:] = False
        n = trace_chord_kernel(nbr, eid, mtype, partner, primal_edge, state, source, sink,
                               pairing, verts, dirs, used)
        if n <= 0:
            return -1.0
        loops = count_loops_kernel(nbr, eid, mtype, partner, primal_edge, state, edge_ends,
                                   used, pairing)
        w = sqrt_q ** loops * x ** n_open
        z += w
        ph = _chord_phases(verts, dirs, n, sigma, angle)
        for j in range(start, n):
            acc[eid[verts[j], dirs[j]]] += w * ph[j]
    return z


def _check_q(q):
    if not (0.0 < q <= 4.0):
        raise ParameterError(f"q={q} outside (0, 4]")


def fermionic_exact(domain: DiscreteDomain, q: float = 2.0, p: float | None = None,
                    normalize: bool = False, slit=None, fixed: dict | None = None,
                    start: int = 0, max_edges: int = 24) -> EdgeObservable:
    """Exact observable by enumerating every bond configuration.

    ``domain`` is a square-bond Dobrushin domain with at most ``max_edges``
    primal edges. A FK ``slit`` (or explicit ``fixed`` states with the
    chord position ``start``) conditions on an interface prefix; then only
    the chord after the prefix contributes. ``normalize`` multiplies the
    edge values (not the vertex values) by 1/(2 cos(pi/8)).
    """
    _check_q(q)
    if p is None:
        p = p_sd(q)
    if domain.n_edges > max_edges:
        raise EnumerationLimitError(f"{domain.n_edges} edges exceed the enumeration limit {max_edges}")
    if slit is not None:
        fixed, start = slit.fixed, slit.n_steps
    t = fk_tables(domain)
    med = t["medial"]
    md = med.extra["medial"]
    base = dobrushin_bonds(domain).astype(np.int64)
    fixed = fixed or {}
    for e, s in fixed.items():
        base[e] = s
    free = np.array([e for e in t["random"] if int(e) not in fixed], dtype=np.int64)
    acc = np.zeros(len(md.edge_ends), dtype=complex)
    x = p / ((1 - p) * np.sqrt(q))
    z = enumerate_kernel(base, free, md.nbr, md.eid, md.mtype, md.partner, md.primal_edge,
                         md.source, md.sink, _PAIRING, md.edge_ends, _ANGLE, sigma_of_q(q),
                         np.sqrt(q), x, int(start), acc)
    if z <= 0:
        raise ParameterError("fixed states do not leave a chord from a to b")
    c = NORMALIZATION if normalize else 1.0
    raw = acc / z
    return EdgeObservable(med, q, c * raw, vertex_values_from_edges(med, raw, q), c,
                          extra={"partition": z, "fixed": dict(fixed), "start": int(start)})


# -- Monte Carlo -------------------------------------------------------------

@njit(cache=True)
def _accumulate(state, nbr, eid, mtype, partner, primal_edge, source, sink, pairing, angle,
                sigma, verts, dirs, used, acc):
    used[:] = False
    n = trace_chord_kernel(nbr, eid, mtype, partner, primal_edge, state, source, sink,
                           pairing, verts, dirs, used)
    if n <= 0:
        return False
    ph = _chord_phases(verts, dirs, n, sigma, angle)
    for j in range(n):
        acc[eid[verts[j], dirs[j]]] += ph[j]
    return True


def fermionic_mc(domain: DiscreteDomain, q: float = 2.0, n_samples: int = 10000, rng=None,
                 method: str = "heat-bath", burn_in: int = 300, thin: int = 1,
                 n_batches: int = 20, normalize: bool = False) -> EdgeObservable:
    """Monte Carlo observable from one Markov chain of FK configurations.

    After ``burn_in`` sweeps, one sample is taken every ``thin`` sweeps.
    Standard errors come from ``n_batches`` batch means.
    """
    _check_q(q)
    if n_samples < n_batches or n_batches < 2:
        raise ParameterError("need n_samples >= n_batches >= 2")
    rng = as_rng(rng)
    p = p_sd(q)
    t = fk_tables(domain)
    med = t["medial"]
    md = med.extra["medial"]
    state = dobrushin_bonds(domain)
    state[t["random"]] = (rng.random(len(t["random"])) < p).astype(np.uint8)
    mark = np.zeros(domain.n_vertices, dtype=np.int64)
    gen = 0
    nr = len(t["random"])

    def sweep(k):
        nonlocal gen
        if k <= 0 or nr == 0:
            return
        if method == "swendsen-wang":
            swendsen_wang_kernel(state, t["random"], t["edges"], t["wired"], float(p), int(k), rng)
        elif method == "heat-bath":
            gen = heat_bath_kernel(state, t["random"], t["edges"], t["ptr"], t["nb"], t["ne"],
                                   t["wired"], float(p), float(q), int(k) * nr, rng, mark, gen)
        else:
            raise ParameterError(f"unknown FK method {method!r}")

    if method == "swendsen-wang" and abs(q - 2.0) > 1e-12:
        raise ParameterError("the Edwards-Sokal sampler needs q = 2")
    sweep(burn_in)
    M = len(md.coords)
    verts = np.zeros(4 * M + 2, dtype=np.int64)
    dirs = np.zeros(4 * M + 2, dtype=np.int64)
    used = np.zeros(len(md.edge_ends), dtype=np.bool_)
    per = n_samples // n_batches
    batches = np.zeros((n_batches, len(md.edge_ends)), dtype=complex)
    st64 = np.empty(len(state), dtype=np.int64)
    sigma = sigma_of_q(q)
    for b in range(n_batches):
        for _ in range(per):
            sweep(thin)
            st64[:] = state
            _accumulate(st64, md.nbr, md.eid, md.mtype, md.partner, md.primal_edge, md.source,
                        md.sink, _PAIRING, _ANGLE, sigma, verts, dirs, used, batches[b])
        batches[b] /= per
    c = NORMALIZATION if normalize else 1.0
    raw = batches.mean(axis=0)
    se = c * np.stack([batches.real.std(axis=0, ddof=1), batches.imag.std(axis=0, ddof=1)],
                      axis=1) / np.sqrt(n_batches)
    return EdgeObservable(med, q, c * raw, vertex_values_from_edges(med, raw, q), c, se,
                          per * n_batches, {"method": method, "burn_in": burn_in, "thin": thin,
                                            "batches": batches})


# -- discrete holomorphicity checks -----------------------------------------

def _edge_dirs(md):
    return np.array([int(np.flatnonzero(md.eid[t] == k)[0]) for k, t in enumerate(md.edge_ends[:, 0])])


def check_projection_relation(obs: EdgeObservable, restrict: str = "free") -> dict:
    """Projections of the two endpoint values onto each edge's line must agree.

    ``restrict="free"`` keeps edges whose endpoints are both unforced
    vertices; ``"all"`` also uses boundary and phantom vertices.
    Returns {"max": worst discrepancy, "n": edges checked, "edge_gap": worst
    |cos(sigma pi/4) proj - F_E|, "off_line": worst distance of F_E from l(e)}.
    """
    md = obs.medial
    u = line_directions(obs.domain)
    fv = obs.vertex_values
    ok = obs.free_vertices() if restrict == "free" else np.ones(len(fv), dtype=bool)
    t, h = md.edge_ends[:, 0], md.edge_ends[:, 1]
    sel = ok[t] & ok[h]
    pt = (fv[t] * np.conj(u)).real
    ph = (fv[h] * np.conj(u)).real
    pe = (obs.raw_edge_values * np.conj(u)).real / vertex_scale(obs.q)
    worst = float(np.max(np.abs(pt - ph)[sel])) if sel.any() else 0.0
    gap = float(np.max(np.abs(pt - pe)[sel])) if sel.any() else 0.0
    off = float(np.max(np.abs((obs.edge_values * np.conj(u)).imag))) if len(u) else 0.0
    return {"max": worst, "n": int(sel.sum()), "edge_gap": gap, "off_line": off}


def cr_residuals(domain: DiscreteDomain, values, restrict_mask=None) -> np.ndarray:
    """|F(z) - F(v) - i (F(w) - F(u))| per medial face, corners u, v, w, z ccw from east."""
    _, _, cor = medial_faces(domain)
    values = np.asarray(values)
    if restrict_mask is not None and len(cor):
        cor = cor[np.all(restrict_mask[cor], axis=1)]
    if not len(cor):
        return np.zeros(0)
    f = values[cor]
    return np.abs(f[:, 3] - f[:, 1] - 1j * (f[:, 2] - f[:, 0]))


def check_discrete_cr(obs: EdgeObservable, restrict: str = "free") -> dict:
    """Discrete Cauchy-Riemann residual over faces with (free) corners."""
    mask = obs.free_vertices() if restrict == "free" else None
    r = cr_residuals(obs.domain, obs.vertex_values, mask)
    return {"max": float(r.max()) if len(r) else 0.0, "n": int(len(r))}


# -- reversal identity -------------------------------------------------------

def reverse_identity(domain: DiscreteDomain, q: float, curve, k: int) -> dict:
    """Check F_slit(k) = P(left | k) F_slit(k+1, left) + P(right | k) F_slit(k+1, right).

    ``curve`` is a traced FK interface; the decision at its k-th medial
    vertex splits the conditioned ensemble in two. The comparison skips the
    two possible outgoing edges at that vertex. Returns the residual and
    the branch probability, or None if the bond at that vertex is already
    determined (forced, or decided by an earlier visit).
    """
    from ..geometry.medial import CLOSED, OPEN
    from ..interface.slit import decided_states
    med = fk_tables(domain)["medial"]
    md = med.extra["medial"]
    verts, dirs = curve.extra["verts"], curve.extra["dirs"]
    if not (1 <= k < len(verts) - 1):
        raise ParameterError(f"prefix length {k} outside the chord")
    v = int(verts[k])
    if v >= med.n_vertices or md.forced[v] != FREE:
        return None
    fixed = decided_states(med, verts, dirs, k)
    if int(md.primal_edge[v]) in fixed:
        return None   # second visit: the first one already decided the bond
    parent = fermionic_exact(domain, q, fixed=fixed, start=k)
    e = int(md.primal_edge[v])
    kids = []
    for s in (OPEN, CLOSED):
        f2 = dict(fixed)
        f2[e] = s
        try:
            kids.append(fermionic_exact(domain, q, fixed=f2, start=k + 1))
        except ParameterError:
            kids.append(None)
    zs = np.array([0.0 if o is None else o.extra["partition"] for o in kids])
    probs = zs / parent.extra["partition"]
    mix = sum(pr * o.edge_values for pr, o in zip(probs, kids) if o is not None)
    out_edges = [int(md.eid[v, d]) for d in range(4)
                 if md.eid[v, d] >= 0 and md.edge_ends[md.eid[v, d], 0] == v]
    keep = np.ones(len(md.edge_ends), dtype=bool)
    keep[out_edges] = False
    res = float(np.max(np.abs(parent.edge_values - mix)[keep]))
    return {"residual": res, "p_open": float(probs[0]), "prob_sum": float(probs.sum()),
            "skipped": out_edges}
