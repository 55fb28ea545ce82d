"""Scaling-limit check of the FK observable against sqrt(Phi').

Phi maps the rectangle to the strip R x (0, 1) with a -> -inf, b -> +inf,
so Phi' = phi'/(pi phi) with phi the rectangle -> half-plane map. Each
level fits one complex constant C (absorbing the sqrt(mesh) scale and the
global phase); the branch of the square root is picked pointwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InconclusiveNoiseError, ParameterError
from ..geometry import LatticeSpec, build_rectangle_domain, continuum_rectangle, domain_to_halfplane
from ..geometry.lattices import local_coords
from ..geometry.medial import medial_positions
from ..rng import as_rng, child_seeds
from .fermionic import fermionic_mc, vertex_values_from_edges


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    meshes: np.ndarray
    errors: np.ndarray        # relative sup distance per level
    error_bars: np.ndarray    # noise contribution to each error
    exponent: float           # slope of log|F| against log|Phi'|
    exponent_stderr: float
    extra: dict = field(default_factory=dict)

    @property
    def decreasing(self) -> bool:
        """Errors decrease, allowing overlap of the error bars."""
        e, b = self.errors, self.error_bars
        return bool(np.all(e[1:] - b[1:] <= e[:-1] + b[:-1]) and e[-1] < e[0])


def strip_derivative(domain, z):
    """Phi'(z) for the rectangle domain with marked corners a, b."""
    cmap = domain_to_halfplane(domain)
    w = cmap(z)
    return cmap.derivative(z) / (np.pi * w)


def _interior(domain, z, margin):
    x0, y0, w, h = continuum_rectangle(domain)
    loc = local_coords(domain, z) - complex(x0, y0)
    m = margin * min(w, h)
    return (loc.real > m) & (loc.real < w - m) & (loc.imag > m) & (loc.imag < h - m)


def compare_level(obs, margin: float = 0.2, noise_ratio: float = 1.0 / 3.0):
    """(relative sup error, noise bar, points, |F|, |Phi'|) for one observable."""
    med = obs.domain
    md = obs.medial
    primal = med.extra["primal"]
    n = med.n_vertices
    z = medial_positions(med, md.coords[:n])
    sel = _interior(primal, z, margin) & obs.free_vertices()[:n]
    if sel.sum() < 3:
        raise ParameterError("too few interior points; enlarge the domain or reduce the margin")
    f = obs.vertex_values[:n][sel]
    dphi = strip_derivative(primal, z[sel])
    batches = obs.extra.get("batches")
    if batches is not None:
        fb = np.array([vertex_values_from_edges(med, b, obs.q)[:n][sel] for b in batches])
        se = fb.std(axis=0, ddof=1) / np.sqrt(len(fb))
    else:
        se = np.zeros(len(f))
    if np.median(se) > noise_ratio * np.median(np.abs(f)):
        raise InconclusiveNoiseError(
            f"median stderr {np.median(se):.3g} exceeds a third of median |F| {np.median(np.abs(f)):.3g}")
    c2 = np.sum(np.conj(dphi) * f ** 2) / np.sum(np.abs(dphi) ** 2)
    c = np.sqrt(c2)
    s = c * np.sqrt(dphi)
    s = np.where((np.conj(s) * f).real < 0, -s, s)
    scale = np.max(np.abs(s))
    err = float(np.max(np.abs(f - s)) / scale)
    bar = float(np.max(se) / scale)
    return err, bar, np.abs(f), np.abs(dphi)


def convergence_test(width: float = 1.0, height: float = 1.0, base_n: int = 8, levels: int = 3,
                     q: float = 2.0, n_samples: int = 40000, rng=None, a_corner="tl",
                     b_corner="br", margin: float = 0.2, method: str | None = None,
                     burn_in: int = 300, thin: int = 1) -> ConvergenceReport:
    """Run the observable at meshes height/base_n, /2, /4, ... and compare to sqrt(Phi')."""
    if levels < 2:
        raise ParameterError("need at least two levels")
    method = method or ("swendsen-wang" if abs(q - 2.0) < 1e-12 else "heat-bath")
    seeds = child_seeds(as_rng(rng), levels)
    meshes, errs, bars = [], [], []
    last = None
    for lev in range(levels):
        eps = height / (base_n * 2 ** lev)
        dom = build_rectangle_domain(LatticeSpec("square-bond", eps), width, height,
                                     a_corner, b_corner)
        obs = fermionic_mc(dom, q, n_samples, seeds[lev], method=method, burn_in=burn_in,
                           thin=thin)
        e, b, fa, da = compare_level(obs, margin)
        meshes.append(eps)
        errs.append(e)
        bars.append(b)
        last = (fa, da)
    fa, da = last
    ok = fa > 0
    X = np.log(da[ok])
    Y = np.log(fa[ok])
    A = np.vstack([X, np.ones_like(X)]).T
    coef, res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    resid = Y - A @ coef
    dof = max(len(X) - 2, 1)
    cov = np.linalg.inv(A.T @ A) * (resid @ resid) / dof
    return ConvergenceReport(np.array(meshes), np.array(errs), np.array(bars), float(coef[0]),
                             float(np.sqrt(cov[0, 0])), {"q": q, "n_samples": n_samples,
                                                         "method": method})
