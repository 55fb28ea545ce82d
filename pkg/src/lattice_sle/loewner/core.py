"""Chordal Loewner chains with vertical-slit elementary maps.

Step k uses the map phi_k(z) = w_k + sqrt((z - w_k)^2 + 4 dt_k), which
removes a vertical slit of height 2 sqrt(dt_k) at w_k and has half-plane
capacity 2 dt_k. Forward solving composes the inverses; extraction (the
zipper) peels one curve point per step.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..errors import DegenerateStepError, ParameterError, RefinementRequiredError
from ..rng import as_rng


@dataclass(frozen=True, eq=False)
class DrivingSample:
    """Driving function samples; ``mode`` is "constant" (w_k held on (t_{k-1}, t_k]) or "linear"."""

    times: np.ndarray
    values: np.ndarray
    mode: str = "constant"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        w = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != w.shape or len(t) < 1:
            raise ParameterError("times and values must be 1-d arrays of equal length")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ParameterError("times must start at 0 and increase strictly")
        if not np.all(np.isfinite(w)):
            raise ParameterError("driving values must be finite")
        if self.mode not in ("constant", "linear"):
            raise ParameterError(f"unknown interpolation mode {self.mode!r}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", w)

    @property
    def total_time(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        """Interpolated driving value (linear between samples)."""
        return np.interp(t, self.times, self.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "w"])
        for a, b in zip(self.times, self.values):
            w.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, mode: str = "constant") -> "DrivingSample":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(np.array([float(r["t"]) for r in rows]),
                   np.array([float(r["w"]) for r in rows]), mode)


@dataclass(frozen=True, eq=False)
class HalfPlaneCurve:
    points: np.ndarray
    capacity: float = np.nan
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        z = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "points", z)
        if len(z) and np.any(z[1:].imag < 0):
            raise ParameterError("half-plane curve points must have Im >= 0")

    def to_csv(self, times=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "y"])
        if times is None:
            times = self.extra.get("times", np.full(len(self.points), np.nan))
        for t, z in zip(times, self.points):
            w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()


@njit(cache=True)
def _slit_inverse(z, w, r):
    # w + sqrt((z-w)^2 - 4 r^2), branch into the upper half-plane
    return w + np.sqrt(z - w - 2.0 * r) * np.sqrt(z - w + 2.0 * r)


@njit(cache=True)
def forward_kernel(w, dt):
    """Tip after each step: phi_1^-1 o ... o phi_k^-1 (w_k)."""
    n = w.shape[0]
    r = np.sqrt(dt)
    out = np.empty(n + 1, dtype=np.complex128)
    out[0] = complex(w[0], 0.0) if n else 0j
    for k in range(n):
        z = complex(w[k], 0.0)
        for j in range(k, -1, -1):
            z = _slit_inverse(z, w[j], r[j])
        out[k + 1] = z
    return out


def _steps(driving: DrivingSample, z_resolution):
    t, w = driving.times, driving.values
    dt = np.diff(t)
    if driving.mode == "constant":
        return w[1:], dt, np.arange(1, len(t))
    # linear: subdivide so each slit is at most z_resolution tall
    ws, dts, keep = [], [], []
    for k in range(len(dt)):
        m = 1
        if z_resolution:
            m = max(1, int(np.ceil((2 * np.sqrt(dt[k]) / z_resolution) ** 2)))
        s = np.arange(1, m + 1) / m
        ws.append(w[k] + s * (w[k + 1] - w[k]))
        dts.append(np.full(m, dt[k] / m))
        keep.append(m)
    return np.concatenate(ws), np.concatenate(dts), np.cumsum(keep)


def forward_solve(driving: DrivingSample, z_resolution: float | None = None,
                  stability_bound: float = 50.0) -> HalfPlaneCurve:
    """Trace of the Loewner chain driven by ``driving``.

    Raises RefinementRequiredError if a driving jump exceeds
    ``stability_bound * sqrt(dt)``.
    """
    w, dt, keep = _steps(driving, z_resolution)
    jumps = np.abs(np.diff(np.concatenate([[driving.values[0]], w])))
    bad = np.flatnonzero(jumps > stability_bound * np.sqrt(dt))
    if len(bad):
        raise RefinementRequiredError(
            f"driving jump {jumps[bad[0]]:.3g} at step {bad[0]} exceeds "
            f"{stability_bound} * sqrt(dt); refine the time grid")
    tips = forward_kernel(np.ascontiguousarray(w), np.ascontiguousarray(dt))
    pts = np.concatenate([[complex(driving.values[0])], tips[1:][keep - 1]])
    return HalfPlaneCurve(pts, driving.total_time, {"times": driving.times.copy()})


@njit(cache=True)
def zipper_kernel(z, lift, t_max):
    """Peel points one at a time until capacity ``t_max``.

    Each point is pushed through the maps peeled so far only when its turn
    comes, so stopping early costs nothing for the unused tail.
    Returns (dt, w, failing step or -1, number of steps done).
    """
    n = z.shape[0]
    dt = np.zeros(n)
    w = np.zeros(n)
    hh = np.zeros(n)
    total = 0.0
    for k in range(n):
        if total >= t_max:
            return dt, w, -1, k
        zeta = z[k]
        for j in range(k):
            u = zeta - w[j]
            zeta = w[j] + np.sqrt(u - 1j * hh[j]) * np.sqrt(u + 1j * hh[j])
            if zeta.imag < 0.0:
                zeta = complex(zeta.real, 0.0)
        x = zeta.real
        y = zeta.imag
        if y <= lift:
            if lift <= 0.0:
                return dt, w, k, k
            y = lift
        hh[k] = y
        dt[k] = 0.25 * y * y
        total += dt[k]
        w[k] = x
    return dt, w, -1, n


def extract_driving(curve: HalfPlaneCurve, lift: float = 0.0, max_points: int = 20000,
                    coarsen_tol: float | None = None, t_max: float = np.inf) -> DrivingSample:
    """Driving function of a half-plane polyline by the zipper.

    ``points[0]`` is the base on the real line. A point landing on the real
    axis raises DegenerateStepError unless ``lift > 0``, in which case it is
    lifted to height ``lift``. Extraction stops once the capacity reaches
    ``t_max``.
    """
    pts = np.asarray(curve.points, dtype=complex)
    if len(pts) > max_points:
        tol = coarsen_tol if coarsen_tol is not None else \
            0.5 * float(np.median(np.abs(np.diff(pts))))
        pts = douglas_peucker(pts, tol)
    base = pts[0]
    if abs(base.imag) > 1e-9:
        raise ParameterError("curve must start on the real axis")
    dt, w, bad, done = zipper_kernel(np.ascontiguousarray(pts[1:]), float(lift), float(t_max))
    if bad >= 0:
        raise DegenerateStepError(f"point {bad + 1} reached the real axis during extraction",
                                  step=int(bad + 1))
    dt, w = dt[:done], w[:done]
    times = np.concatenate([[0.0], np.cumsum(dt)])
    values = np.concatenate([[base.real], w])
    # repeated points give zero-capacity steps; drop them
    keep = np.concatenate([[True], np.diff(times) > 0])
    return DrivingSample(times[keep], values[keep])


def douglas_peucker(points, tol: float) -> np.ndarray:
    """Polyline simplification keeping both ends (iterative)."""
    z = np.asarray(points, dtype=complex)
    n = len(z)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        seg = z[j] - z[i]
        mid = z[i + 1:j] - z[i]
        if abs(seg) == 0:
            d = np.abs(mid)
        else:
            d = np.abs((mid * np.conj(seg)).imag) / abs(seg)
        k = int(np.argmax(d))
        if d[k] > tol:
            keep[i + 1 + k] = True
            stack.append((i, i + 1 + k))
            stack.append((i + 1 + k, j))
    return z[keep]


def brownian_driving(kappa: float, capacity_T: float, steps: int, rng=None,
                     drift: float = 0.0) -> DrivingSample:
    """w(t) = sqrt(kappa) B_t + drift t on a uniform capacity grid."""
    if steps < 1:
        raise ParameterError("steps must be at least 1")
    if kappa < 0 or capacity_T <= 0:
        raise ParameterError("need kappa >= 0 and capacity_T > 0")
    rng = as_rng(rng)
    dt = capacity_T / steps
    t = np.linspace(0.0, capacity_T, steps + 1)
    inc = rng.standard_normal(steps) * np.sqrt(kappa * dt) + drift * dt
    return DrivingSample(t, np.concatenate([[0.0], np.cumsum(inc)]))


@njit(cache=True)
def adaptive_kernel(t0, w0, kappa, res, min_dt, rng, ws, dts, tips, stack_t, stack_w):
    """Grow the trace through the coarse driving samples (t0, w0).

    A step whose tip lands farther than ``res`` from the previous tip is
    split at a Brownian-bridge midpoint (down to ``min_dt``). Returns the
    number of accepted steps, or -1 when the buffers overflow.
    """
    cap = ws.shape[0]
    n = 0
    tips[0] = complex(w0[0], 0.0)
    cur_t = t0[0]
    cur_w = w0[0]
    for k in range(1, t0.shape[0]):
        top = 0
        stack_t[0] = t0[k]
        stack_w[0] = w0[k]
        while top >= 0:
            te = stack_t[top]
            we = stack_w[top]
            dt = te - cur_t
            r = np.sqrt(dt)
            z = complex(we, 0.0)
            z = _slit_inverse(z, we, r)
            for j in range(n - 1, -1, -1):
                z = _slit_inverse(z, ws[j], np.sqrt(dts[j]))
            if abs(z - tips[n]) > res and 0.5 * dt >= min_dt and top + 1 < stack_t.shape[0]:
                top += 1
                stack_t[top] = cur_t + 0.5 * dt
                stack_w[top] = 0.5 * (cur_w + we) + np.sqrt(kappa * dt / 4.0) * rng.standard_normal()
                continue
            if n >= cap:
                return -1
            ws[n] = we
            dts[n] = dt
            n += 1
            tips[n] = z
            cur_t = te
            cur_w = we
            top -= 1
    return n


def sample_sle(kappa: float, capacity_T: float, steps: int, rng=None,
               z_resolution: float | None = None, max_points: int = 200000,
               max_depth: int = 16) -> HalfPlaneCurve:
    """SLE(kappa) trace from a Brownian driving function.

    With ``z_resolution`` the time grid is refined wherever consecutive
    tips are farther apart than that, by Brownian-bridge midpoints, so the
    driving law is unchanged. extra["driving"] holds the (refined) driving.
    """
    rng = as_rng(rng)
    drv = brownian_driving(kappa, capacity_T, steps, rng)
    if z_resolution is None:
        curve = forward_solve(drv)
        curve.extra["driving"] = drv
        return curve
    if z_resolution <= 0:
        raise ParameterError("z_resolution must be positive")
    ws, dts = np.empty(max_points), np.empty(max_points)
    tips = np.empty(max_points + 1, dtype=np.complex128)
    st, sw = np.empty(max_depth + 1), np.empty(max_depth + 1)
    min_dt = capacity_T / steps / 2.0 ** max_depth
    n = adaptive_kernel(drv.times, drv.values, float(kappa), float(z_resolution), min_dt, rng,
                        ws, dts, tips, st, sw)
    if n < 0:
        raise RefinementRequiredError(f"refinement needs more than {max_points} steps")
    times = np.concatenate([[0.0], np.cumsum(dts[:n])])
    refined = DrivingSample(times, np.concatenate([[drv.values[0]], ws[:n]]))
    return HalfPlaneCurve(tips[:n + 1].copy(), float(times[-1]),
                          {"times": times, "driving": refined})
