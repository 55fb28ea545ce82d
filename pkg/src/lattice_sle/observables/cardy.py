"""Cardy's crossing formula, its ODE, and Monte Carlo crossing estimates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from ..errors import ParameterError, UnsupportedLatticeError
from ..geometry import DiscreteDomain, continuum_rectangle, corner_cross_ratio
from ..geometry.conformal import CCW
from ..geometry.lattices import corner_id
from ..rng import as_rng


def _half_integral(u):
    # int_0^u (v(1-v))^{-2/3} dv with v = s^3 (removes the v^{-2/3} singularity)
    if u == 0:
        return 0.0
    s1 = u ** (1.0 / 3.0)
    val, _ = quad(lambda s: 3.0 * (1.0 - s ** 3) ** (-2.0 / 3.0), 0.0, s1,
                  epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


_HALF = None


def cardy_F(u: float) -> float:
    """Cardy's crossing function F(u) by quadrature, absolute error below 1e-10."""
    global _HALF
    u = float(u)
    if not (0.0 <= u <= 1.0):
        raise ParameterError(f"u={u} outside [0, 1]")
    if _HALF is None:
        _HALF = _half_integral(0.5)
    total = 2.0 * _HALF
    if u <= 0.5:
        return _half_integral(u) / total
    return 1.0 - _half_integral(1.0 - u) / total


def cardy_F_series(u: float, tol: float = 1e-16) -> float:
    """Oracle: Gamma(2/3)/(Gamma(1/3)Gamma(4/3)) u^{1/3} 2F1(1/3, 2/3; 4/3; u) by its series."""
    if not (0.0 <= u < 1.0):
        raise ParameterError("the series needs 0 <= u < 1")
    a, b, c = 1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0
    term, s, n = 1.0, 1.0, 0
    while abs(term) > tol * abs(s) or n < 5:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * u
        s += term
        n += 1
        if n > 100000:
            break
    return gamma(2.0 / 3.0) / (gamma(1.0 / 3.0) * gamma(4.0 / 3.0)) * u ** (1.0 / 3.0) * s


def cardy_derivatives(a: float, h: float = 1e-3):
    """F'(a), F''(a) by Richardson-extrapolated central differences of ``cardy_F``."""
    def d1(k):
        return (cardy_F(a + k) - cardy_F(a - k)) / (2 * k)

    def d2(k):
        return (cardy_F(a + k) - 2 * cardy_F(a) + cardy_F(a - k)) / k ** 2

    return (4 * d1(h / 2) - d1(h)) / 3, (4 * d2(h / 2) - d2(h)) / 3


def cardy_ode_residual(a: float, step: float = 1e-4, literal: bool = False) -> float:
    """Residual of F'' + 2(1-2a)/(3a(1-a)) F' = 0 with difference-quotient derivatives.

    ``literal=True`` evaluates the variant without the factor a in the
    denominator, which Cardy's F does not satisfy.
    """
    if not (0.0 < a < 1.0):
        raise ParameterError(f"a={a} outside (0, 1)")
    fp = (cardy_F(a + step) - cardy_F(a - step)) / (2 * step)
    fpp = (cardy_F(a + step) - 2 * cardy_F(a) + cardy_F(a - step)) / step ** 2
    denom = 3 * (1 - a) if literal else 3 * a * (1 - a)
    return fpp + 2 * (1 - 2 * a) / denom * fp


def expansion_coefficients(a: float, mean_w: float, mean_w2: float, t: float):
    """Coefficients of 1/x and 1/x^2 in E F(x_t/(x_t - y_t)) as x -> inf with x/(x-y) = a.

    With x_t = g_t(x) - w(t) and g_t(z) = z + 2t/z + ..., the ratio is
    a - a w/x + 2ta(1-2a)/((1-a)x^2) + O(x^-3).
    """
    fp, fpp = cardy_derivatives(a)
    c1 = -a * fp * mean_w
    c2 = 2 * t * a * (1 - 2 * a) / (1 - a) * fp + 0.5 * a * a * mean_w2 * fpp
    return c1, c2


# -- crossing probabilities --------------------------------------------------

@dataclass(frozen=True, eq=False)
class CrossingSpec:
    """Rectangle with corners a, x, b, y counterclockwise; crossing from [a,x] to [b,y]."""

    domain: DiscreteDomain
    a_corner: str = "tl"
    u: float = np.nan

    def __post_init__(self):
        ac = corner_id(self.a_corner)
        object.__setattr__(self, "a_corner", ac)
        if np.isnan(self.u):
            x0, y0, w, h = continuum_rectangle(self.domain)
            object.__setattr__(self, "u", float(corner_cross_ratio(w / h, ac)))
        if not (0.0 < self.u < 1.0):
            raise ParameterError(f"cross-ratio {self.u} outside (0, 1)")

    @property
    def corners(self):
        i = CCW.index(self.a_corner)
        return tuple(CCW[(i + k) % 4] for k in range(4))


def _corner_site(dom, ring, corner):
    from ..geometry.lattices import _bbox_corner, _snap
    return _snap(dom.positions, ring, _bbox_corner(dom.positions, corner))


def crossing_arcs(spec: CrossingSpec):
    """Site ring split into the four arcs [a,x), [x,b), [b,y), [y,a) as index lists."""
    dom = spec.domain
    ring = list(dom.boundary_cycle)
    ids = [ring.index(_corner_site(dom, ring, c)) for c in spec.corners]
    n = len(ring)
    arcs = []
    for k in range(4):
        i, j = ids[k], ids[(k + 1) % 4]
        arcs.append([ring[(i + m) % n] for m in range((j - i) % n)])
    return arcs


def _setup(spec):
    dom = spec.domain
    if dom.kind != "triangular-site":
        raise UnsupportedLatticeError("crossing probabilities use triangular-site percolation")
    arcs = crossing_arcs(spec)
    g = np.zeros(dom.shape, dtype=np.int8)
    target = np.zeros(dom.shape, dtype=np.int8)
    for k, arc in enumerate(arcs):
        colour = 1 if k % 2 == 0 else -1
        for v in arc:
            c, r = dom.grid[v]
            g[c, r] = colour
    for v in arcs[2]:
        c, r = dom.grid[v]
        target[c, r] = 1   # grey side [b,y] reached by the right-hand hexes
    for v in arcs[1]:
        c, r = dom.grid[v]
        target[c, r] = 2   # white side [x,b] reached by the left-hand hexes
    ring = list(dom.boundary_cycle)
    a_site = arcs[0][0]
    pred = ring[ring.index(a_site) - 1]
    return g, target, np.array(dom.grid[pred]), np.array(dom.grid[a_site]), arcs


def crossing_probability_mc(spec: CrossingSpec, p: float, n_samples: int, rng=None,
                            method: str = "exploration"):
    """Estimate P(open cluster joins [a,x] to [b,y]); returns (estimate, stderr).

    ``exploration`` runs the interface from a and samples only the hexes it
    touches; ``union-find`` samples every site and labels clusters. Both
    decide the same event for a given colouring.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be positive")
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"p={p} outside [0, 1]")
    rng = as_rng(rng)
    g, target, l0, r0, arcs = _setup(spec)
    if method == "exploration":
        from ..interface.hex_trace import crossing_batch
        hits = crossing_batch(g, target, l0, r0, float(p), rng, int(n_samples),
                              3 * g.size + 8)
    elif method == "union-find":
        hits = 0
        for _ in range(n_samples):
            hits += crossing_union_find(spec, _full_colouring(g, p, rng), arcs)
    else:
        raise ParameterError(f"unknown method {method!r}")
    est = hits / n_samples
    return est, float(np.sqrt(est * (1 - est) / n_samples))


def _full_colouring(g, p, rng):
    col = g.copy()
    free = col == 0
    col[free] = np.where(rng.random(int(free.sum())) < p, 1, -1)
    return col


def crossing_union_find(spec: CrossingSpec, colours: np.ndarray, arcs=None) -> bool:
    """Whether a grey cluster meets both [a,x] and [b,y], by union-find."""
    dom = spec.domain
    arcs = arcs or crossing_arcs(spec)
    grid = dom.grid
    parent = np.arange(dom.n_vertices)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    grey = colours[grid[:, 0], grid[:, 1]] > 0
    for u, v in dom.edges:
        if grey[u] and grey[v]:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    left = {find(v) for v in arcs[0]}
    return any(find(v) in left for v in arcs[2])


def crossing_explore_fixed(spec: CrossingSpec, colours: np.ndarray) -> bool:
    """The exploration decision for a fully coloured grid (cross-check helper)."""
    from ..interface import hex_trace as ht
    g, target, l0, r0, _ = _setup(spec)
    nx, ny = g.shape
    cap = 3 * g.size + 8
    ox, oy, ot = np.empty(cap), np.empty(cap), np.empty(cap)
    ol = np.empty((cap, 2), dtype=np.int64)
    orr = np.empty((cap, 2), dtype=np.int64)
    _, code = ht.explore_kernel(np.ascontiguousarray(colours, dtype=np.int8),
                                np.zeros_like(g), np.zeros((nx, ny), dtype=np.int64), 1, target,
                                ht.FIXED, 0.5, as_rng(0), l0, r0, ox, oy, ot, ol, orr)
    return code == ht.STOP_RIGHT_TARGET
