"""JSON report records shared by the statistical tests."""
from __future__ import annotations

import json

import numpy as np


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def make_report(test: str, params: dict, statistic, n: int, seed=None, p_value=None, ci=None,
                **extra) -> dict:
    """{test, params, statistic, p_value | ci, n, seed} plus any extra fields."""
    rep = {"test": test, "params": params, "statistic": statistic}
    if p_value is not None:
        rep["p_value"] = p_value
    if ci is not None:
        rep["ci"] = ci
    rep["n"] = n
    rep["seed"] = seed
    rep.update(extra)
    return _plain(rep)


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True)
