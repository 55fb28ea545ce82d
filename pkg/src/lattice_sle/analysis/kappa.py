"""kappa and drift from a sample of driving functions; increment tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import ParameterError, RangeError
from ..rng import as_rng


@dataclass(frozen=True)
class KappaEstimate:
    kappa_hat: float
    ci95: tuple
    drift_hat: float
    drift_ci95: tuple
    n_curves: int
    grid: tuple

    def to_report(self, seed=None) -> dict:
        from .reports import make_report
        return make_report("estimate-kappa", {"grid": list(self.grid)}, self.kappa_hat,
                           self.n_curves, seed, ci=list(self.ci95), drift_hat=self.drift_hat,
                           drift_ci=list(self.drift_ci95))


def sample_matrix(drivings, grid) -> np.ndarray:
    """w(t) of every driving at every grid time (rows = curves)."""
    grid = np.asarray(grid, dtype=float)
    if len(drivings) and grid.max() > min(d.total_time for d in drivings):
        short = min(d.total_time for d in drivings)
        raise RangeError(f"grid reaches t={grid.max():.4g} but the shortest driving ends at {short:.4g}")
    return np.array([d(grid) for d in drivings])


def _fit(W, t):
    # Var[s^2(t)] ~ 2 (kappa t)^2/(n-1): weights 1/t^2 make the WLS slope the mean of s^2/t
    var = W.var(axis=0, ddof=1)
    mean = W.mean(axis=0)
    # Var[mean(t)] ~ kappa t/n: weights 1/t give sum(mean)/sum(t)
    return float(np.mean(var / t)), float(mean.sum() / t.sum())


def estimate_kappa(drivings, grid, n_boot: int = 1000, rng=None) -> KappaEstimate:
    """kappa_hat = weighted least-squares slope of Var w(t) against t through 0.

    drift_hat is the slope of the mean; both get percentile bootstrap 95%
    intervals over curves.
    """
    grid = np.asarray(grid, dtype=float)
    if len(drivings) < 2:
        raise ParameterError("need at least two drivings")
    if np.any(grid <= 0):
        raise ParameterError("grid times must be positive")
    W = sample_matrix(drivings, grid) - np.array([d.values[0] for d in drivings])[:, None]
    k, a = _fit(W, grid)
    rng = as_rng(rng)
    n = len(W)
    ks, as_ = np.empty(n_boot), np.empty(n_boot)
    for b in range(n_boot):
        idx = rng.integers(0, n, n)
        ks[b], as_[b] = _fit(W[idx], grid)
    ci = (float(np.percentile(ks, 2.5)), float(np.percentile(ks, 97.5)))
    dci = (float(np.percentile(as_, 2.5)), float(np.percentile(as_, 97.5)))
    # a degenerate bootstrap can sit off the point estimate; widen to contain it
    ci = (min(ci[0], k), max(ci[1], k))
    return KappaEstimate(k, ci, a, dci, n, tuple(grid.tolist()))


def _anderson_pvalue(x):
    """Anderson-Darling normality test with estimated mean and variance.

    p-value from the D'Agostino-Stephens approximation for the modified
    statistic A*^2 = A^2 (1 + 0.75/n + 2.25/n^2).
    """
    n = len(x)
    a2 = stats.anderson(x, dist="norm").statistic
    a = a2 * (1 + 0.75 / n + 2.25 / n ** 2)
    if a >= 0.6:
        p = np.exp(1.2937 - 5.709 * a + 0.0186 * a ** 2)
    elif a >= 0.34:
        p = np.exp(0.9177 - 4.279 * a - 1.38 * a ** 2)
    elif a >= 0.2:
        p = 1 - np.exp(-8.318 + 42.796 * a - 59.938 * a ** 2)
    else:
        p = 1 - np.exp(-13.436 + 101.14 * a - 223.73 * a ** 2)
    return float(a2), float(min(max(p, 0.0), 1.0))


def increment_tests(drivings, grid) -> dict:
    """Normality per interval and lag-1 correlation of successive increments.

    Per interval: Anderson-Darling across curves. Per adjacent pair of
    intervals: Pearson correlation across curves. Pooled: lag-1
    correlation of increments scaled by sqrt(dt), along every path.
    """
    grid = np.asarray(grid, dtype=float)
    if len(drivings) < 8:
        return {"insufficient_data": True, "n": len(drivings)}
    W = sample_matrix(drivings, grid)
    dW = np.diff(W, axis=1)
    dt = np.diff(grid)
    ad = []
    for j in range(dW.shape[1]):
        col = dW[:, j]
        ad.append(_anderson_pvalue(col)[1] if col.std() > 0 else 0.0)
    corr = []
    for j in range(dW.shape[1] - 1):
        a, b = dW[:, j], dW[:, j + 1]
        corr.append(float(stats.pearsonr(a, b).pvalue) if a.std() > 0 and b.std() > 0 else np.nan)
    z = dW / np.sqrt(dt)
    x, y = z[:, :-1].ravel(), z[:, 1:].ravel()
    if x.std() > 0 and y.std() > 0:
        r, p_lag = stats.pearsonr(x, y)
    else:
        r, p_lag = np.nan, np.nan
    ad, corr = np.array(ad), np.array(corr)
    return {
        "insufficient_data": False,
        "n": len(drivings),
        "ad_pvalues": ad,
        "corr_pvalues": corr,
        "frac_ad_below_001": float(np.mean(ad < 0.01)),
        "frac_corr_below_001": float(np.nanmean(corr < 0.01)) if np.any(np.isfinite(corr)) else np.nan,
        "lag1_r": float(r),
        "lag1_pvalue": float(p_lag),
    }


KAPPA_GRID = tuple(np.linspace(0.01, 0.2, 20).tolist())
LATTICE_MODELS = ("percolation", "fk", "harmonic", "ising", "onloop")


def sample_interface(model: str, domain, rng, q: float = 2.0, n: float = 1.0, x=None,
                     beta=None, sweeps: int = 300):
    """One Dobrushin interface of ``model`` in ``domain``."""
    from ..interface import explore_percolation, trace_interface
    from ..models import (ISING_SQUARE_BETA_C, ISING_TRIANGULAR_BETA_C, sample_fk,
                          sample_harmonic_explorer, sample_ising_spin, sample_loop_on, x_c)
    if model == "percolation":
        return explore_percolation(domain, 0.5, rng)
    if model == "fk":
        method = "swendsen-wang" if q == 2 else "heat-bath"
        return trace_interface(sample_fk(domain, q, sweeps=sweeps, rng=rng, method=method))
    if model == "harmonic":
        return sample_harmonic_explorer(domain, rng)
    if model == "ising":
        if beta is None:
            beta = ISING_TRIANGULAR_BETA_C if domain.kind == "triangular-site" else ISING_SQUARE_BETA_C
        return trace_interface(sample_ising_spin(domain, beta, sweeps=sweeps, rng=rng))
    if model == "onloop":
        return trace_interface(sample_loop_on(domain, n, x_c(n) if x is None else x,
                                              sweeps=sweeps, rng=rng))
    raise ParameterError(f"unknown model {model!r}; expected one of {LATTICE_MODELS}")


def lattice_drivings(model: str, domain, n_curves: int, rng=None, horizon: float = 8.0,
                     t_max: float = 0.25, threads: int | None = None, **model_args) -> list:
    """Driving functions (up to capacity ``t_max``) of independent interfaces.

    Curve i uses stream i of a master seed drawn from ``rng``, so the result
    does not depend on ``threads``. FK interfaces are mapped through their
    edge midpoints, which lie strictly inside the rectangle.
    """
    from ..geometry import domain_to_halfplane
    from ..loewner import lattice_driving
    from ..parallel import map_indexed
    from ..rng import child_seeds, make_rng
    master = int(child_seeds(as_rng(rng), 1)[0])
    cmap = domain_to_halfplane(domain)
    mid = model == "fk"

    def one(i):
        curve = sample_interface(model, domain, make_rng(master, i), **model_args)
        return lattice_driving(curve, domain, horizon=horizon, cmap=cmap, midpoints=mid,
                               t_max=t_max)

    return map_indexed(one, n_curves, threads)
