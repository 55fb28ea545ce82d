"""Command-line runner: configuration, seeding, outputs and run manifests.

    lattice-sle <command> [--config FILE] [--key value]...

A config file holds flat ``key = value`` lines (``#`` starts a comment);
flags override file values. With ``--path DIR`` every output is written
there together with ``manifest.json``; the report is always printed as
JSON on stdout. Exit status: 0 success, 2 usage error, 3 numerical
failure, with an error JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import re
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import (ConfigError, DegenerateDomainError, LatticeSLEError, ParameterError,
                     RangeError, ScaleRangeError, UnsupportedLatticeError)
from .rng import RNG_ALGORITHM, make_rng

COMMANDS = ("simulate", "trace", "extract", "estimate-kappa", "crossing", "observable", "height",
            "sle", "dimension", "martingale", "markov", "constants")
MODELS = ("percolation", "fk", "ising", "onloop", "harmonic", "sle")
FORMATS = ("csv", "json", "svg")
USAGE_ERRORS = (ConfigError, ParameterError, DegenerateDomainError, UnsupportedLatticeError,
                RangeError, ScaleRangeError)
_DEFAULT_LATTICE = {"percolation": "triangular-site", "ising": "triangular-site",
                    "fk": "square-bond", "harmonic": "hexagonal", "onloop": "hexagonal"}
_KEY = re.compile(r"[a-z][a-z0-9_-]*\Z")


@dataclasses.dataclass
class ExperimentConfig:
    """Every run is determined by these fields (``threads`` never changes results)."""

    command: str | None = None
    model: str | None = None
    q: float | None = None
    n: float | None = None
    x: float | None = None
    p: float | None = None
    beta: float | None = None
    kappa: float | None = None
    lattice: str | None = None
    width: float | None = None
    height: float | None = None
    epsilon: float | None = None
    corners: str | None = None
    samples: int | None = None
    sweeps: int | None = None
    seed: int | None = None
    threads: int | None = None
    path: str | None = None
    format: str | None = None
    steps: int | None = None
    capacity: float | None = None
    resolution: float | None = None
    aspect: float | None = None
    prefix: int | None = None
    alpha: float | None = None
    observable: str | None = None
    method: str | None = None
    input: str | None = None
    mismatched: bool | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    def to_text(self) -> str:
        """Normalized ``key=value`` lines, sorted by key."""
        return "".join(f"{k}={_format(v)}\n" for k, v in sorted(self.to_dict().items()))


_TYPES = {f.name: f.type.split(" | ")[0] for f in dataclasses.fields(ExperimentConfig)}


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _convert(key, raw, line=None, column=None):
    kind = _TYPES[key]
    try:
        if kind == "float":
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = str(raw).strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}", field=key, line=line,
                          column=column) from None
    return str(raw)


def parse_text(text) -> dict:
    """Values of a flat config file; errors carry line and column (1-based)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not UTF-8: {exc}") from None
    out = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ConfigError(f"line {i}: expected key=value", line=i, column=col)
        key_part, val_part = body.split("=", 1)
        key = key_part.strip()
        kcol = len(key_part) - len(key_part.lstrip()) + 1
        if not _KEY.match(key):
            raise ConfigError(f"line {i}: invalid key {key!r}", line=i, column=kcol)
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", field=key, line=i, column=kcol)
        value = val_part.strip()
        vcol = len(key_part) + 2 + len(val_part) - len(val_part.lstrip())
        if not value:
            raise ConfigError(f"line {i}: empty value for {key}", field=key, line=i, column=vcol)
        if key in out:
            raise ConfigError(f"line {i}: duplicate key {key!r}", field=key, line=i, column=kcol)
        out[key] = _convert(key, value, i, vcol)
    return out


def _check(cfg: ExperimentConfig):
    def bad(field, msg):
        raise ConfigError(f"{field}: {msg}", field=field)

    def need(cond, field, msg):
        if getattr(cfg, field) is not None and not cond(getattr(cfg, field)):
            bad(field, msg)

    if cfg.command is None:
        bad("command", f"missing; expected one of {', '.join(COMMANDS)}")
    need(lambda v: v in COMMANDS, "command", f"expected one of {', '.join(COMMANDS)}")
    need(lambda v: v in MODELS, "model", f"expected one of {', '.join(MODELS)}")
    need(lambda v: 0 < v <= 4, "q", "must lie in (0, 4], the range on which "
         "kappa(q) = 4 pi / arccos(-sqrt(q)/2) is defined")
    need(lambda v: -2 <= v <= 2, "n", "must lie in [-2, 2]")
    need(lambda v: v > 0, "x", "must be positive")
    need(lambda v: 0 <= v <= 1, "p", "must lie in [0, 1]")
    need(lambda v: v > 0, "beta", "must be positive")
    need(lambda v: v >= 0, "kappa", "must be non-negative")
    need(lambda v: v > 0, "width", "must be positive")
    need(lambda v: v > 0, "height", "must be positive")
    need(lambda v: v > 0, "epsilon", "must be positive")
    need(lambda v: v >= 1, "samples", "must be at least 1")
    need(lambda v: v >= 0, "sweeps", "must be non-negative")
    need(lambda v: 0 <= v < 2 ** 63, "seed", "must lie in [0, 2^63)")
    need(lambda v: v >= 1, "threads", "must be at least 1")
    need(lambda v: v in FORMATS, "format", f"expected one of {', '.join(FORMATS)}")
    need(lambda v: v >= 1, "steps", "must be at least 1")
    need(lambda v: v > 0, "capacity", "must be positive")
    need(lambda v: v > 0, "resolution", "must be positive")
    need(lambda v: v > 0, "aspect", "must be positive")
    need(lambda v: v >= 1, "prefix", "must be at least 1")
    need(lambda v: v in ("phi", "psi"), "observable", "expected phi or psi")
    from .geometry.lattices import KINDS
    need(lambda v: v in KINDS, "lattice", f"expected one of {', '.join(KINDS)}")
    if cfg.corners is not None:
        from .geometry import corner_id
        parts = [s.strip() for s in cfg.corners.split(",")]
        try:
            ok = len(parts) == 2 and len({corner_id(s) for s in parts}) == 2
        except ParameterError:
            ok = False
        if not ok:
            bad("corners", "expected two distinct corners such as tl,br")
    # required fields
    if cfg.command == "constants" and cfg.q is None and cfg.n is None:
        bad("q", "required by constants")
    fk_like = cfg.command in ("observable", "height") or cfg.model == "fk"
    if fk_like and cfg.command not in ("constants", "sle", "martingale") and cfg.q is None:
        bad("q", f"required by {cfg.command} with the FK model")
    if cfg.command in ("sle", "martingale") and cfg.kappa is None:
        bad("kappa", f"required by {cfg.command}")
    if cfg.model == "sle" and cfg.command in ("estimate-kappa", "dimension") and cfg.kappa is None:
        bad("kappa", "required for model=sle")
    if cfg.command == "extract" and cfg.model == "sle":
        bad("model", "extract needs a lattice model")


def parse_config(text=b"", flags: dict | None = None) -> ExperimentConfig:
    """File values overridden by flags; unknown keys and bad ranges raise ConfigError."""
    values = parse_text(text) if text else {}
    for key, raw in (flags or {}).items():
        if raw is None:
            continue
        k = key.replace("-", "_")
        if k not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", field=k)
        values[k] = raw if not isinstance(raw, str) else _convert(k, raw)
    cfg = ExperimentConfig(**values)
    _check(cfg)
    return cfg


# ---------------------------------------------------------------- helpers


def _seed(cfg):
    return 0 if cfg.seed is None else cfg.seed


def _corners(cfg, default=("tl", "br")):
    if cfg.corners is None:
        return default
    a, b = (s.strip() for s in cfg.corners.split(","))
    return a, b


def _model(cfg, default="percolation"):
    return cfg.model or default


def _domain(cfg, model=None, kind=None):
    from .geometry import LatticeSpec, build_rectangle_domain
    kind = kind or cfg.lattice or _DEFAULT_LATTICE.get(model or _model(cfg), "triangular-site")
    a, b = _corners(cfg)
    w = cfg.width if cfg.width is not None else 32.0
    h = cfg.height if cfg.height is not None else w
    spec = LatticeSpec(kind, cfg.epsilon if cfg.epsilon is not None else 1.0)
    return build_rectangle_domain(spec, w, h, a, b)


def curve_svg(points, stroke_width: float = 0.5) -> str:
    """Polyline path of a curve, y pointing up; no styling contract."""
    z = np.asarray(points, dtype=complex)
    if not len(z):
        return '<svg xmlns="http://www.w3.org/2000/svg"/>\n'
    x0, x1, y0, y1 = z.real.min(), z.real.max(), z.imag.min(), z.imag.max()
    pad = 0.02 * max(x1 - x0, y1 - y0, 1e-9)
    d = " ".join(f"{'M' if i == 0 else 'L'}{p.real!r},{-p.imag!r}" for i, p in enumerate(z))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0 - pad!r} {-y1 - pad!r} '
            f'{x1 - x0 + 2 * pad!r} {y1 - y0 + 2 * pad!r}">\n'
            f'<path d="{d}" fill="none" stroke="black" stroke-width="{stroke_width!r}"/>\n'
            f'</svg>\n')


def _read_points(path):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "x" not in rows[0] or "y" not in rows[0]:
        raise ConfigError(f"{path}: expected a CSV with x and y columns", field="input")
    return np.array([float(r["x"]) + 1j * float(r["y"]) for r in rows])


def _interfaces(cfg, domain, model, n):
    from .analysis.kappa import sample_interface
    from .parallel import map_indexed
    seed = _seed(cfg)
    args = _model_args(cfg)
    return map_indexed(lambda i: sample_interface(model, domain, make_rng(seed, i), **args), n,
                       cfg.threads)


def _model_args(cfg):
    args = {"sweeps": 300 if cfg.sweeps is None else cfg.sweeps}
    if cfg.q is not None:
        args["q"] = cfg.q
    if cfg.n is not None:
        args["n"] = cfg.n
    if cfg.x is not None:
        args["x"] = cfg.x
    if cfg.beta is not None:
        args["beta"] = cfg.beta
    return args


def _config_csv(config) -> str:
    from .models import BondConfig, LoopConfig, SiteColoring
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    dom = config.domain
    pos = dom.positions
    if isinstance(config, SiteColoring):
        w.writerow(["x", "y", "color"])
        for z, c in zip(pos, config.colors):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), int(c)])
    else:
        state = config.states if isinstance(config, BondConfig) else config.occupied
        w.writerow(["x0", "y0", "x1", "y1", "state"])
        for (u, v), s in zip(dom.edges, state):
            w.writerow([repr(float(pos[u].real)), repr(float(pos[u].imag)),
                        repr(float(pos[v].real)), repr(float(pos[v].imag)), int(s)])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_constants(cfg):
    from .models import (beffara_dim, coulomb_k, kappa_dense, kappa_dilute, kappa_fk, p_sd,
                         spin_exponent, x_c, x_tilde_c)
    rep = {}
    if cfg.q is not None:
        k = kappa_fk(cfg.q)
        rep.update({"q": cfg.q, "p_sd": p_sd(cfg.q), "kappa": k, "k": coulomb_k(cfg.q),
                    "sigma": spin_exponent(cfg.q), "dimension": beffara_dim(k)})
    if cfg.n is not None:
        rep.update({"n": cfg.n, "x_c": x_c(cfg.n), "x_tilde_c": x_tilde_c(cfg.n),
                    "kappa_dilute": kappa_dilute(cfg.n), "kappa_dense": kappa_dense(cfg.n)})
    return rep, {}


def cmd_simulate(cfg):
    from .models import (ISING_SQUARE_BETA_C, ISING_TRIANGULAR_BETA_C, sample_fk,
                         sample_ising_spin, sample_loop_on, sample_percolation, x_c)
    model = _model(cfg)
    if model in ("harmonic", "sle"):
        raise ParameterError(f"simulate has no configuration for model={model}; use trace or sle")
    dom = _domain(cfg, model)
    seed = _seed(cfg)
    n = cfg.samples or 1
    sweeps = 300 if cfg.sweeps is None else cfg.sweeps
    outputs, sizes = {}, []
    for i in range(n):
        rng = make_rng(seed, i)
        if model == "percolation":
            conf = sample_percolation(dom, 0.5 if cfg.p is None else cfg.p, rng)
        elif model == "fk":
            conf = sample_fk(dom, cfg.q, cfg.p, sweeps=sweeps, rng=rng,
                             method=cfg.method or "heat-bath")
        elif model == "ising":
            beta = cfg.beta
            if beta is None:
                beta = (ISING_TRIANGULAR_BETA_C if dom.kind == "triangular-site"
                        else ISING_SQUARE_BETA_C)
            conf = sample_ising_spin(dom, beta, sweeps=sweeps, rng=rng)
        else:
            nn = 1.0 if cfg.n is None else cfg.n
            conf = sample_loop_on(dom, nn, x_c(nn) if cfg.x is None else cfg.x, sweeps=sweeps,
                                  rng=rng)
        outputs[f"config_{i:04d}.csv"] = _config_csv(conf)
        sizes.append(dom.n_vertices)
    return {"command": "simulate", "model": model, "samples": n, "lattice": dom.kind,
            "n_vertices": dom.n_vertices}, outputs


def cmd_trace(cfg):
    model = _model(cfg)
    if model == "sle":
        raise ParameterError("use the sle command for SLE traces")
    dom = _domain(cfg, model)
    n = cfg.samples or 1
    curves = _interfaces(cfg, dom, model, n)
    outputs = {}
    for i, c in enumerate(curves):
        outputs[f"interface_{i:04d}.csv"] = c.to_csv()
        if cfg.format == "svg":
            outputs[f"interface_{i:04d}.svg"] = curve_svg(c.points)
    return {"command": "trace", "model": model, "samples": n,
            "n_steps": [c.n_steps for c in curves]}, outputs


def cmd_extract(cfg):
    from .interface import InterfaceCurve
    from .loewner import lattice_driving
    model = _model(cfg)
    dom = _domain(cfg, model)
    mid = model == "fk"
    if cfg.input:
        with open(cfg.input, encoding="utf-8") as fh:
            curves = [InterfaceCurve.from_csv(fh.read(), dom.lattice.mesh)]
    else:
        curves = _interfaces(cfg, dom, model, cfg.samples or 1)
    outputs, totals = {}, []
    for i, c in enumerate(curves):
        drv = lattice_driving(c, dom, midpoints=mid)
        outputs[f"driving_{i:04d}.csv"] = drv.to_csv()
        totals.append(drv.total_time)
    return {"command": "extract", "model": model, "samples": len(curves),
            "total_capacity": totals}, outputs


def cmd_estimate_kappa(cfg):
    from .analysis import KAPPA_GRID, estimate_kappa, increment_tests, lattice_drivings
    from .loewner import brownian_driving
    from .rng import child_seeds
    model = _model(cfg)
    n = cfg.samples or 200
    seed = _seed(cfg)
    if model == "sle":
        T = cfg.capacity or 0.25
        steps = cfg.steps or 1000
        drivings = [brownian_driving(cfg.kappa, T, steps, make_rng(seed, i)) for i in range(n)]
    else:
        dom = _domain(cfg, model)
        drivings = lattice_drivings(model, dom, n, make_rng(seed, 0), threads=cfg.threads,
                                    **_model_args(cfg))
    shortest = min(d.total_time for d in drivings)
    grid = [g for g in KAPPA_GRID if g <= shortest]
    if len(grid) < 2:
        raise RangeError(f"shortest driving ends at capacity {shortest:.3g}; enlarge the domain")
    est = estimate_kappa(drivings, grid, rng=make_rng(int(child_seeds(make_rng(seed, 1), 1)[0])))
    rep = est.to_report(seed)
    rep["params"].update({"model": model})
    inc = increment_tests(drivings, grid)
    rep["increments"] = {k: v for k, v in inc.items() if k not in ("ad_pvalues", "corr_pvalues")}
    from .analysis.reports import _plain
    return _plain(rep), {}


def cmd_crossing(cfg):
    from .geometry import LatticeSpec, build_rectangle_domain
    from .observables import CrossingSpec, cardy_F, crossing_probability_mc
    aspect = cfg.aspect or 1.0
    h = cfg.height if cfg.height is not None else 200.0
    dom = build_rectangle_domain(LatticeSpec("triangular-site", cfg.epsilon or 1.0),
                                 h * aspect, h)
    spec = CrossingSpec(dom, _corners(cfg, ("tl", "br"))[0])
    n = cfg.samples or 10000
    p = 0.5 if cfg.p is None else cfg.p
    est, se = crossing_probability_mc(spec, p, n, make_rng(_seed(cfg)),
                                      method=cfg.method or "exploration")
    from .analysis import make_report
    return make_report("crossing", {"aspect": aspect, "height": h, "p": p}, est, n, _seed(cfg),
                       stderr=se, cross_ratio=spec.u, cardy=cardy_F(spec.u)), {}


def _observable(cfg):
    from .geometry import LatticeSpec, square_domain
    from .observables import fermionic_exact, fermionic_mc
    # small domains are allowed here: exact enumeration needs at most 24 edges
    eps = cfg.epsilon or 1.0
    w = cfg.width if cfg.width is not None else 3 * eps
    h = cfg.height if cfg.height is not None else w
    a, b = _corners(cfg)
    dom = square_domain(max(1, int(round(w / eps))), max(1, int(round(h / eps))), a, b,
                        LatticeSpec("square-bond", eps))
    method = cfg.method or ("exact" if len(dom.edges) <= 24 else "heat-bath")
    if method == "exact":
        return fermionic_exact(dom, cfg.q, cfg.p), method
    return fermionic_mc(dom, cfg.q, cfg.samples or 20000, make_rng(_seed(cfg)), method=method,
                        burn_in=300 if cfg.sweeps is None else cfg.sweeps), method


def cmd_observable(cfg):
    from .observables import check_discrete_cr, check_projection_relation
    obs, method = _observable(cfg)
    rep = {"command": "observable", "q": cfg.q, "method": method, "n_edges": len(obs.edge_values),
           "projection_residual": check_projection_relation(obs)["max"],
           "cr_residual": check_discrete_cr(obs)["max"], "n_samples": obs.n_samples}
    return rep, {"observable.csv": obs.to_csv()}


def cmd_height(cfg):
    from .observables import build_height, height_checks
    obs, method = _observable(cfg)
    tol = 1e-8 if method == "exact" else np.inf
    hf = build_height(obs, tol)
    chk = height_checks(hf)
    rep = {"command": "height", "q": cfg.q, "method": method,
           "cycle_discrepancy": chk["cycle_discrepancy"],
           "laplacian_sign_violations": chk["laplacian_sign_violations"],
           "laplacian_identity": chk["laplacian_identity"],
           "arc_ab_black": chk["arc_ab_black"], "outer_white": chk["outer_white"]}
    return rep, {"height.csv": hf.to_csv()}


def cmd_sle(cfg):
    from .loewner import sample_sle
    T = cfg.capacity or 1.0
    c = sample_sle(cfg.kappa, T, cfg.steps or 1000, make_rng(_seed(cfg)),
                   z_resolution=cfg.resolution)
    outputs = {"sle.csv": c.to_csv(), "driving.csv": c.extra["driving"].to_csv()}
    if cfg.format == "svg":
        outputs["sle.svg"] = curve_svg(c.points)
    return {"command": "sle", "kappa": cfg.kappa, "capacity": T, "points": len(c.points)}, outputs


def cmd_dimension(cfg):
    from .analysis import box_dimension, default_scales
    from .loewner import sample_sle
    if cfg.input:
        pts = _read_points(cfg.input)
        source = os.path.basename(cfg.input)
    elif _model(cfg) == "sle":
        pts = sample_sle(cfg.kappa, cfg.capacity or 1.0, cfg.steps or 1000, make_rng(_seed(cfg)),
                         z_resolution=cfg.resolution or 0.01).points
        source = "sle"
    else:
        model = _model(cfg)
        pts = _interfaces(cfg, _domain(cfg, model), model, 1)[0].points
        source = model
    scales = default_scales(pts)
    dim, r2 = box_dimension(pts, scales)
    return {"command": "dimension", "source": source, "dimension": dim, "r2": r2,
            "scales": scales}, {}


def cmd_martingale(cfg):
    from .analysis import martingale_test_phi, martingale_test_psi
    fn = martingale_test_psi if cfg.observable == "psi" else martingale_test_phi
    rep = fn(cfg.kappa, n_traces=cfg.samples or 4000, rng=make_rng(_seed(cfg)), alpha=cfg.alpha)
    return rep, {}


def cmd_markov(cfg):
    from .analysis import markov_test
    from .geometry import LatticeSpec, build_rectangle_domain
    model = _model(cfg)
    w = cfg.width if cfg.width is not None else 32.0
    h = cfg.height if cfg.height is not None else 28.0
    a, b = _corners(cfg)
    dom = build_rectangle_domain(LatticeSpec("triangular-site", cfg.epsilon or 1.0), w, h, a, b)
    rep = markov_test(model, dom, cfg.prefix or 5, cfg.samples or 10000, make_rng(_seed(cfg)),
                      mismatched=bool(cfg.mismatched), p=0.5 if cfg.p is None else cfg.p)
    return rep, {}


RUNNERS = {
    "constants": cmd_constants, "simulate": cmd_simulate, "trace": cmd_trace,
    "extract": cmd_extract, "estimate-kappa": cmd_estimate_kappa, "crossing": cmd_crossing,
    "observable": cmd_observable, "height": cmd_height, "sle": cmd_sle,
    "dimension": cmd_dimension, "martingale": cmd_martingale, "markov": cmd_markov,
}


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def run(cfg: ExperimentConfig) -> dict:
    """Execute the pipeline, write outputs and the manifest; returns the manifest."""
    from .analysis.reports import _plain
    report, outputs = RUNNERS[cfg.command](cfg)
    report = _plain(report)
    files = dict(outputs)
    files["report.json"] = json.dumps(report, indent=2, sort_keys=True) + "\n"
    manifest = {
        "config": cfg.to_dict(),
        "config_text": cfg.to_text(),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": _seed(cfg),
        "rng_algorithm": RNG_ALGORITHM,
        "outputs": [],
        "report": report,
    }
    for name in sorted(files):
        data = files[name].encode("utf-8")
        manifest["outputs"].append({"file": name, "sha256": digest(data), "bytes": len(data)})
        if cfg.path:
            os.makedirs(cfg.path, exist_ok=True)
            with open(os.path.join(cfg.path, name), "wb") as fh:
                fh.write(data)
    if cfg.path:
        with open(os.path.join(cfg.path, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return manifest


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        m = re.search(r"--([a-z0-9-]+)", message)
        raise ConfigError(message, field=m.group(1).replace("-", "_") if m else None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lattice-sle", description="Lattice interfaces and SLE experiments.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat key=value file; flags override its values")
    for name in _TYPES:
        if name != "command":
            ap.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
        text = b""
        if ns.config:
            try:
                with open(ns.config, "rb") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}", field="config") from None
        flags = {k: v for k, v in vars(ns).items() if k not in ("config",) and v is not None}
        cfg = parse_config(text, flags)
        manifest = run(cfg)
    except USAGE_ERRORS as exc:
        print(json.dumps({"error": exc.to_dict()}, sort_keys=True), file=sys.stderr)
        return 2
    except LatticeSLEError as exc:
        print(json.dumps({"error": exc.to_dict()}, sort_keys=True), file=sys.stderr)
        return 3
    print(json.dumps(manifest["report"], indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
