"""Two-sample test of the domain Markov property for exploration interfaces.

Arm A draws interfaces in the full domain and keeps those whose first k
edges match a fixed prefix. Arm B explores the slit domain from the
prefix's tip. The statistic is the height at which the interface first
crosses the vertical midline, binned, with one extra cell for runs that
never reach it; the arms are compared with a
chi-square test of homogeneity.
"""
from __future__ import annotations

import numpy as np
from numba import njit
from scipy.stats import chi2_contingency

from ..errors import InfeasibleConditioningError, ParameterError
from ..geometry import DiscreteDomain, LatticeSpec, build_rectangle_domain
from ..interface import hex_trace as ht
from ..interface.slit import slit
from ..interface.tracing import _site_domain, base_grid, exploration_start, run_exploration
from ..rng import as_rng, child_seeds

MIN_ACCEPTANCE = 1e-3
_MODES = {"percolation": ht.BERNOULLI, "harmonic": ht.HARMONIC}


@njit(cache=True)
def markov_arm(base, l0, r0, mode, p, rng, n_accept, max_tries, pref_l, pref_r, k, xcut,
               ymin, ymax, n_bins, cap):
    """Binned midline-crossing heights of accepted explorations.

    With k >= 0 a run is accepted only if its first k + 1 (l, r) hex pairs
    equal ``pref_l``/``pref_r``. The last of the n_bins + 1 counts holds runs
    that end without reaching x >= xcut. Returns (counts, accepted, tries).
    """
    nx, ny = base.shape
    lazy = np.zeros((nx, ny), dtype=np.int8)
    stamp = np.zeros((nx, ny), dtype=np.int64)
    target = np.zeros((nx, ny), dtype=np.int8)
    ox = np.empty(cap)
    oy = np.empty(cap)
    ot = np.empty(cap)
    ol = np.empty((cap, 2), dtype=np.int64)
    orr = np.empty((cap, 2), dtype=np.int64)
    counts = np.zeros(n_bins + 1, dtype=np.int64)
    accepted = 0
    tries = 0
    while accepted < n_accept and tries < max_tries:
        tries += 1
        n, code = ht.explore_kernel(base, lazy, stamp, tries, target, mode, p, rng, l0, r0,
                                    ox, oy, ot, ol, orr)
        if code != ht.STOP_END:
            continue
        ok = n > k
        j = 0
        while ok and j <= k:
            if (ol[j, 0] != pref_l[j, 0] or ol[j, 1] != pref_l[j, 1] or
                    orr[j, 0] != pref_r[j, 0] or orr[j, 1] != pref_r[j, 1]):
                ok = False
            j += 1
        if not ok:
            continue
        b = n_bins
        for j in range(n):
            if ox[j] >= xcut:
                b = int((oy[j] - ymin) / (ymax - ymin) * n_bins)
                b = min(max(b, 0), n_bins - 1)
                break
        counts[b] += 1
        accepted += 1
    return counts, accepted, tries


def _mismatch(sd, base):
    # swap the prefix colours, except the hexes of the restart edge
    keep = {tuple(int(x) for x in sd.start[0]), tuple(int(x) for x in sd.start[1])}
    g = np.array(base, dtype=np.int8)
    for c, r in sd.grey:
        if (c, r) not in keep:
            g[c, r] = -1
    for c, r in sd.white:
        if (c, r) not in keep:
            g[c, r] = 1
    return g


def markov_test(model: str = "percolation", domain: DiscreteDomain | None = None,
                prefix_length: int = 5, n: int = 10000, rng=None, mismatched: bool = False,
                n_bins: int = 8, p: float = 0.5) -> dict:
    """Compare conditioned-on-prefix interfaces with slit-domain interfaces.

    The prefix is the first ``prefix_length`` edges of a pilot interface.
    ``mismatched`` swaps the slit colouring along the prefix (a control
    that must be rejected).
    """
    if model not in _MODES:
        raise ParameterError(f"markov_test supports {sorted(_MODES)}, not {model!r}")
    if prefix_length < 1 or n < 10:
        raise ParameterError("need prefix_length >= 1 and n >= 10")
    if domain is None:
        domain = build_rectangle_domain(LatticeSpec("triangular-site"), 32, 28)
    rng = as_rng(rng)
    s_pilot, s_a, s_b = child_seeds(rng, 3)
    mode = _MODES[model]
    base = base_grid(domain)
    pilot, _, _ = run_exploration(domain, base, mode, p, as_rng(int(s_pilot)))
    if pilot.n_steps <= prefix_length + 1:
        raise ParameterError("pilot interface is shorter than the prefix")
    pref = pilot.prefix(prefix_length)
    sd = slit(domain, pref)
    sites = _site_domain(domain)
    nx, ny = sites.shape
    xcut = 0.5 * (nx - 1)
    # kernel coordinates are lattice-local: x in site columns, y = row * sqrt(3)/2
    ymin, ymax = -1.0, ny * ht.SQ3_2 + 1.0
    cap = 3 * nx * ny + 8
    max_tries = int(np.ceil(n / MIN_ACCEPTANCE))
    l0, r0 = exploration_start(domain)
    ca, acc_a, tries_a = markov_arm(base, l0, r0, mode, p, as_rng(int(s_a)), n, max_tries,
                                    pref.extra["l_sites"], pref.extra["r_sites"], prefix_length,
                                    xcut, ymin, ymax, n_bins, cap)
    rate = acc_a / tries_a
    if acc_a < n:
        raise InfeasibleConditioningError(
            f"prefix acceptance rate {rate:.2e} is below {MIN_ACCEPTANCE:.0e}")
    gb = _mismatch(sd, sd.colour_grid(base)) if mismatched else sd.colour_grid(base)
    dummy = np.zeros((1, 2), dtype=np.int64)
    cb, acc_b, _ = markov_arm(gb, np.asarray(sd.start[0], dtype=np.int64),
                              np.asarray(sd.start[1], dtype=np.int64), mode, p,
                              as_rng(int(s_b)), n, n, dummy, dummy, -1, xcut, ymin, ymax,
                              n_bins, cap)
    table = np.vstack([ca, cb])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        stat, pval = 0.0, 1.0
    else:
        stat, pval, _, _ = chi2_contingency(table)
    return {
        "test": "markov", "model": model, "prefix_length": prefix_length, "n": n,
        "statistic": float(stat), "p_value": float(pval), "acceptance_rate": float(rate),
        "table": table, "mismatched": mismatched,
    }
