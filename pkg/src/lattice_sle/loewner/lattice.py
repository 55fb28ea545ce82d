"""From lattice interfaces to half-plane curves and driving functions."""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateStepError
from ..geometry import continuum_rectangle, domain_to_halfplane
from ..geometry.lattices import local_coords
from .core import DrivingSample, HalfPlaneCurve, extract_driving

DELTA_FLOOR = 1e-12


def map_curve_to_halfplane(curve, cmap, delta_floor: float = DELTA_FLOOR) -> HalfPlaneCurve:
    """Pointwise image of the curve; rounding below the real axis is lifted."""
    pts = np.asarray(curve.points if hasattr(curve, "points") else curve, dtype=complex)
    img = np.asarray(cmap(pts), dtype=complex)
    low = img.imag <= 0
    img = np.where(low, img.real + 1j * (np.maximum(img.imag, 0.0) + delta_floor), img)
    return HalfPlaneCurve(img, extra={"lifted": int(low.sum())})


def lattice_curve_to_halfplane(curve, domain, horizon: float = 8.0, midpoints: bool = False,
                               cmap=None) -> HalfPlaneCurve:
    """Map an interface into H (a -> 0, b -> inf), ready for the zipper.

    Points outside the open continuum rectangle are dropped, the base 0 is
    prepended, and the curve is cut before its image first leaves the disc
    of radius ``horizon`` (capacity diverges near b). ``midpoints`` uses
    edge midpoints instead of vertices.
    """
    cmap = cmap or domain_to_halfplane(domain)
    pts = np.asarray(curve.points, dtype=complex)
    if midpoints:
        pts = 0.5 * (pts[1:] + pts[:-1])
    x0, y0, w, h = continuum_rectangle(domain)
    loc = local_coords(domain, pts) - complex(x0, y0)
    inside = (loc.real > 0) & (loc.real < w) & (loc.imag > 0) & (loc.imag < h)
    pts = pts[inside]
    img = np.asarray(cmap(pts), dtype=complex) if len(pts) else np.zeros(0, complex)
    far = np.flatnonzero(np.abs(img) > horizon)
    if len(far):
        img = img[:far[0]]
    img = np.where(img.imag <= 0, img.real + 1j * DELTA_FLOOR, img)
    return HalfPlaneCurve(np.concatenate([[0j], img]), extra={"horizon": horizon})


def lattice_driving(curve, domain, horizon: float = 8.0, midpoints: bool = False,
                    lift: float = DELTA_FLOOR, cmap=None, t_max: float = np.inf) -> DrivingSample:
    """Driving function of a lattice interface in its rectangle."""
    hp = lattice_curve_to_halfplane(curve, domain, horizon, midpoints, cmap)
    try:
        return extract_driving(hp, lift=lift, t_max=t_max)
    except DegenerateStepError as exc:
        # curve touches the boundary at the floor resolution: keep the prefix
        cut = exc.step
        return extract_driving(HalfPlaneCurve(hp.points[:cut]), lift=lift, t_max=t_max)
