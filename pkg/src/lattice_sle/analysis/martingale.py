"""Martingale observables of chordal SLE from 0 to infinity in H.

With Z_t = g_t(z) - w(t):
  phi:  M_t = (g_t'(z) / (pi Z_t))^alpha, a martingale for alpha = 8/kappa - 1
        (derivative of the strip map log(z)/pi, times the chain-rule factor);
  psi:  M_t = (g_t'(z) / Z_t^2)^alpha, a martingale for alpha = 3/kappa - 1/2
        (the map -1/z sends the tip to infinity and b = infinity to 0; its
        normalization at b does not change in time).
The chain uses the same vertical-slit steps as ``forward_solve``.
"""
from __future__ import annotations

import numpy as np

from ..errors import AttritionError, ParameterError
from ..rng import as_rng

ATTRITION_LIMIT = 0.5


def alpha_phi(kappa: float) -> float:
    return 8.0 / kappa - 1.0


def alpha_psi(kappa: float) -> float:
    return 3.0 / kappa - 0.5


def evolve_point(z: complex, kappa: float, checkpoints, n_traces: int, steps_per_unit: int,
                 rng, swallow_tol: float = 1e-9):
    """(Z, log g') at each checkpoint for every trace, plus swallowing times.

    A trace whose Z gets within ``swallow_tol`` of the real axis, or
    within 2 sqrt(dt) of the tip (below the step resolution, where a slit
    step would push it back up instead of swallowing it), is frozen there:
    the martingale is stopped at the swallowing time.
    """
    cps = np.asarray(checkpoints, dtype=float)
    T = float(cps[-1])
    steps = max(1, int(np.ceil(T * steps_per_unit)))
    dt = T / steps
    times = np.arange(1, steps + 1) * dt
    Z = np.full(n_traces, complex(z))
    logd = np.zeros(n_traces, dtype=complex)
    alive = np.ones(n_traces, dtype=bool)
    outZ = np.empty((len(cps), n_traces), dtype=complex)
    outL = np.empty((len(cps), n_traces), dtype=complex)
    swallowed_at = np.full(n_traces, np.inf)
    k = 0
    while k < len(cps) and cps[k] <= 0:
        outZ[k], outL[k] = Z, logd
        k += 1
    for s in range(steps):
        dw = np.sqrt(kappa * dt) * rng.standard_normal(n_traces)
        # new tip at w + dw; step: zeta -> sqrt(zeta^2 + 4 dt) with zeta = g - w_new
        zeta = Z - dw
        root = np.sqrt(zeta - 2j * np.sqrt(dt)) * np.sqrt(zeta + 2j * np.sqrt(dt))
        root = np.where(root.imag < 0, -root, root)
        logd = np.where(alive, logd + np.log(zeta / root), logd)
        Z = np.where(alive, root, Z)
        gone = alive & ((Z.imag < swallow_tol * np.maximum(1.0, np.abs(Z))) |
                        (np.abs(Z) < 2.0 * np.sqrt(dt)))
        swallowed_at[gone] = times[s]
        alive &= ~gone
        while k < len(cps) and cps[k] <= times[s] + 1e-12 * T:
            outZ[k], outL[k] = Z, logd
            k += 1
    return outZ, outL, swallowed_at


def _test(kind, kappa, z, n_traces, checkpoints, rng, alpha, steps_per_unit):
    if kappa <= 0:
        raise ParameterError("kappa must be positive")
    if complex(z).imag <= 0:
        raise ParameterError("z must lie in the upper half-plane")
    cps = np.asarray(checkpoints, dtype=float)
    if cps[0] != 0 or np.any(np.diff(cps) <= 0):
        raise ParameterError("checkpoints must start at 0 and increase")
    if alpha is None:
        alpha = alpha_phi(kappa) if kind == "phi" else alpha_psi(kappa)
    rng = as_rng(rng)
    Zs, Ls, swallowed = evolve_point(complex(z), kappa, cps, n_traces, steps_per_unit, rng)
    if kind == "phi":
        logm = alpha * (Ls - np.log(np.pi * Zs))
    else:
        logm = alpha * (Ls - 2 * np.log(Zs))
    M = np.exp(logm)
    frac = float(np.mean(np.isfinite(swallowed)))
    if frac > ATTRITION_LIMIT:
        raise AttritionError(f"{frac:.0%} of traces swallowed z before the last checkpoint")
    means = M.mean(axis=1)
    se = np.sqrt(M.real.var(axis=1, ddof=1) + M.imag.var(axis=1, ddof=1)) / np.sqrt(n_traces)
    direct = (complex(1 / (np.pi * z)) if kind == "phi" else complex(1 / z ** 2)) ** alpha
    m0 = means[0]
    dev = np.abs(means - m0)
    ok = bool(np.all(dev[1:] <= 4 * se[1:]))
    return {
        "test": f"martingale-{kind}", "kappa": kappa, "alpha": alpha, "z": complex(z),
        "checkpoints": cps, "means": means, "stderr": se, "initial": m0,
        "direct_initial": direct, "max_z_score": float(np.max(dev[1:] / se[1:])),
        "attrition": frac, "passed": ok, "n": n_traces,
    }


def martingale_test_phi(kappa: float, z: complex = 1j, n_traces: int = 4000,
                        checkpoints=(0.0, 0.02, 0.04, 0.06, 0.08, 0.1), rng=None,
                        alpha: float | None = None, steps_per_unit: int = 2000) -> dict:
    """Constancy in t of E[(g_t'(z)/(pi Z_t))^alpha]; alpha defaults to 8/kappa - 1."""
    return _test("phi", kappa, z, n_traces, checkpoints, rng, alpha, steps_per_unit)


def martingale_test_psi(kappa: float, z: complex = 1j, n_traces: int = 4000,
                        checkpoints=(0.0, 0.02, 0.04, 0.06, 0.08, 0.1), rng=None,
                        alpha: float | None = None, steps_per_unit: int = 2000) -> dict:
    """Constancy in t of E[(g_t'(z)/Z_t^2)^alpha]; alpha defaults to 3/kappa - 1/2."""
    return _test("psi", kappa, z, n_traces, checkpoints, rng, alpha, steps_per_unit)
