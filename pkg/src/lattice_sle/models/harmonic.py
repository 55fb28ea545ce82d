"""Harmonic Explorer on the hexagonal lattice.

The hex ahead of the tip turns white with probability h(hex), where h is
discrete harmonic on unexplored hexes with value 1 on white hexes (arc ba
and the left side of the curve) and 0 on grey ones. Two equivalent
samplers: a random walk from the hex ahead that stops on the coloured set
(exact in law, fast), and an explicit sparse Dirichlet solve.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ..errors import SolverError
from ..geometry import DiscreteDomain
from ..rng import as_rng

AXIAL = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


def harmonic_probability(neighbours: dict, values: dict, target, tol: float = 1e-10) -> float:
    """Value at ``target`` of the function harmonic off ``values``.

    ``neighbours`` maps node -> iterable of nodes (simple random walk
    weights); ``values`` fixes the boundary nodes.
    """
    if target in values:
        return float(values[target])
    unknown = [v for v in neighbours if v not in values]
    idx = {v: i for i, v in enumerate(unknown)}
    rows, cols, data = [], [], []
    rhs = np.zeros(len(unknown))
    for v, i in idx.items():
        nb = list(neighbours[v])
        rows.append(i)
        cols.append(i)
        data.append(float(len(nb)))
        for w in nb:
            if w in values:
                rhs[i] += values[w]
            else:
                rows.append(i)
                cols.append(idx[w])
                data.append(-1.0)
    A = sp.csr_matrix((data, (rows, cols)), shape=(len(unknown), len(unknown)))
    h = spsolve(A.tocsc(), rhs)
    res = float(np.max(np.abs(A @ h - rhs))) if len(unknown) else 0.0
    if not np.all(np.isfinite(h)) or res > tol * max(1.0, float(np.max(np.abs(rhs)))):
        raise SolverError(f"Dirichlet solve residual {res:.3e}", residual=res)
    return float(h[idx[target]])


def _offset_neighbours(c, r):
    q = c - (r - (r & 1)) // 2
    for dq, dr in AXIAL:
        qq, rr = q + dq, r + dr
        yield qq + (rr - (rr & 1)) // 2, rr


def turn_probability(colours: np.ndarray, site) -> float:
    """P(the hex ``site`` is drawn white) given a colour grid (0 = unexplored)."""
    nx, ny = colours.shape
    nbrs, values = {}, {}
    for c in range(nx):
        for r in range(ny):
            if colours[c, r] != 0:
                values[(c, r)] = 1.0 if colours[c, r] < 0 else 0.0
            nbrs[(c, r)] = [w for w in _offset_neighbours(c, r) if 0 <= w[0] < nx and 0 <= w[1] < ny]
    return harmonic_probability(nbrs, values, tuple(int(x) for x in site))


def _ahead(l, r):
    lq, lr = l[0] - (l[1] - (l[1] & 1)) // 2, l[1]
    rq, rr = r[0] - (r[1] - (r[1] & 1)) // 2, r[1]
    k = AXIAL.index((rq - lq, rr - lr))
    dq, dr = AXIAL[(k + 1) % 6]
    hq, hr = lq + dq, lr + dr
    return hq + (hr - (hr & 1)) // 2, hr


def sample_harmonic_explorer(domain: DiscreteDomain, rng=None, method: str = "walk"):
    """Grow the Harmonic Explorer from a to b; returns an InterfaceCurve.

    ``method="dirichlet"`` re-solves the Dirichlet problem at every step
    (quadratic cost, meant for small domains and cross-checks).
    """
    from ..interface import hex_trace as ht
    from ..interface.curves import InterfaceCurve
    from ..interface.tracing import _site_domain, base_grid, exploration_start, run_exploration
    rng = as_rng(rng)
    grid = base_grid(domain)
    if method == "walk":
        curve, _, _ = run_exploration(domain, grid, ht.HARMONIC, 0.5, rng)
        return curve
    if method != "dirichlet":
        raise ValueError(f"unknown method {method!r}")
    sites = _site_domain(domain)
    nx, ny = sites.shape
    l0, r0 = exploration_start(domain)
    cap = 3 * nx * ny + 8
    ox, oy, ot = np.empty(cap), np.empty(cap), np.empty(cap)
    ol = np.empty((cap, 2), dtype=np.int64)
    orr = np.empty((cap, 2), dtype=np.int64)
    lazy = np.zeros((nx, ny), dtype=np.int8)
    stamp = np.zeros((nx, ny), dtype=np.int64)
    target = np.zeros((nx, ny), dtype=np.int8)
    while True:
        n, code = ht.explore_kernel(grid, lazy, stamp, 1, target, ht.FIXED, 0.5, rng,
                                    l0, r0, ox, oy, ot, ol, orr)
        if code == ht.STOP_END:
            pts = sites.lattice.embed(ox[:n] + 1j * oy[:n])
            return InterfaceCurve(pts, sites.lattice.mesh, ot[:n].copy(),
                                  {"l_sites": ol[:n].copy(), "r_sites": orr[:n].copy(),
                                   "model": "hex"})
        h = _ahead(ol[n - 1], orr[n - 1])
        grid[h] = -1 if rng.random() < turn_probability(grid, h) else 1
