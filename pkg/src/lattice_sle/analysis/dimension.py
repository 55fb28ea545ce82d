"""Box-counting dimension of planar curves."""
from __future__ import annotations

import numpy as np

from ..errors import ScaleRangeError


def _points(curve):
    return np.asarray(getattr(curve, "points", curve), dtype=complex)


def densify(points, step: float) -> np.ndarray:
    """Insert points so that no segment is longer than ``step``."""
    z = np.asarray(points, dtype=complex)
    seg = np.abs(np.diff(z))
    m = np.maximum(1, np.ceil(seg / step).astype(int))
    parts = []
    for a, b, mm in zip(z[:-1], z[1:], m):
        parts.append(a + (b - a) * np.arange(mm) / mm)
    parts.append(z[-1:])
    return np.concatenate(parts) if parts else z


def default_scales(curve, n: int = 8, decades: float = 1.5, finest: float | None = None):
    """Geometric scales from ``finest`` (default: 2x the median segment) upward."""
    z = _points(curve)
    seg = np.abs(np.diff(z))
    fine = finest if finest is not None else 2.0 * float(np.median(seg[seg > 0]))
    return fine * 10.0 ** np.linspace(0.0, decades, n)


def box_count(points, scale: float, offsets: int = 4) -> float:
    """Occupied boxes of side ``scale``, averaged over shifted grids."""
    z = np.asarray(points, dtype=complex)
    counts = []
    for k in range(offsets):
        sh = (k / offsets) * scale * (1 + 1j)
        ij = np.floor((z + sh).real / scale).astype(np.int64), np.floor((z + sh).imag / scale).astype(np.int64)
        counts.append(len(set(zip(ij[0].tolist(), ij[1].tolist()))))
    return float(np.mean(counts))


def box_dimension(curve, scales=None):
    """(slope of log N(s) against log 1/s, r^2 of the fit).

    Needs at least 4 scales spanning 1.5 decades; the curve's arc length
    must be at least 10 times the largest scale.
    """
    z = _points(curve)
    if scales is None:
        scales = default_scales(z)
    s = np.sort(np.asarray(scales, dtype=float))
    if len(s) < 4 or np.log10(s[-1] / s[0]) < 1.5 - 1e-9:
        raise ScaleRangeError("need at least 4 scales spanning 1.5 decades")
    length = float(np.sum(np.abs(np.diff(z))))
    if length < 10 * s[-1]:
        raise ScaleRangeError(f"curve length {length:.3g} is below 10x the largest scale {s[-1]:.3g}")
    dense = densify(z, s[0] / 4)
    n = np.array([box_count(dense, sc) for sc in s])
    x, y = np.log(1 / s), np.log(n)
    slope, icept = np.polyfit(x, y, 1)
    pred = slope * x + icept
    r2 = 1 - np.sum((y - pred) ** 2) / np.sum((y - y.mean()) ** 2)
    return float(slope), float(r2)
