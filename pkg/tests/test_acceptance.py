"""Acceptance runs at full scale; the terminal summary lists one verdict per criterion.

These take tens of minutes in total on one core (the lattice kappa runs
dominate). Every verdict is also printed, so ``pytest -s`` shows progress.
"""
import itertools

import numpy as np
import pytest

from lattice_sle.analysis import (KAPPA_GRID, box_dimension, estimate_kappa, lattice_drivings,
                                  markov_test, martingale_test_phi, martingale_test_psi)
from lattice_sle.cli import parse_config, run
from lattice_sle.errors import DegenerateDomainError
from lattice_sle.geometry import (LatticeSpec, build_rectangle_domain, hexagonal_domain,
                                  square_domain, triangular_domain)
from lattice_sle.interface import explore_percolation, trace_interface
from lattice_sle.loewner import (DrivingSample, brownian_driving, extract_driving,
                                 forward_solve, sample_sle)
from lattice_sle.models import (beffara_dim, coulomb_k, kappa_dilute, kappa_fk, p_sd,
                                sample_fk, x_c)
from lattice_sle.observables import (CrossingSpec, build_height, cardy_F, cardy_ode_residual,
                                     check_discrete_cr, check_projection_relation,
                                     convergence_test, crossing_probability_mc,
                                     expansion_coefficients, fermionic_exact, height_checks,
                                     reverse_identity)
from lattice_sle.rng import make_rng


class TestConstants:
    """Criterion 1: closed forms against their reference values."""

    def test_values(self, record):
        cases = [
            ("x_c(0)", x_c(0.0), 1 / np.sqrt(2 + np.sqrt(2))),
            ("x_c(1)", x_c(1.0), 1 / np.sqrt(3)),
            ("kappa_dilute(1)", kappa_dilute(1.0), 3.0),
            ("kappa_fk(2)", kappa_fk(2.0), 16 / 3),
            ("kappa_fk(1)", kappa_fk(1.0), 6.0),
            ("kappa_fk(0)", kappa_fk(0.0), 8.0),
            ("kappa_dilute(0)", kappa_dilute(0.0), 8 / 3),
            ("p_sd(1)", p_sd(1.0), 0.5),
            ("coulomb_k(2)", coulomb_k(2.0), 0.125),
            ("beffara_dim(3)", beffara_dim(3.0), 11 / 8),
            ("beffara_dim(16/3)", beffara_dim(16 / 3), 5 / 3),
        ]
        worst = max(abs(got - ref) for _, got, ref in cases)
        bad = [name for name, got, ref in cases if abs(got - ref) >= 1e-12]
        ok = record(1, "constants", not bad, f"{len(cases)} values, worst error {worst:.1e}")
        assert ok, f"constants off by more than 1e-12: {bad}"


class TestCardy:
    """Criterion 2: crossing probabilities of critical percolation, 10^5 samples."""

    @pytest.mark.parametrize("aspect", [1, 2, 3])
    def test_crossing(self, aspect, record):
        dom = build_rectangle_domain(LatticeSpec("triangular-site", 1.0), 200 * aspect, 200)
        spec = CrossingSpec(dom, "tl")
        est, se = crossing_probability_mc(spec, 0.5, 100_000, rng=make_rng(2024, aspect))
        ref = cardy_F(spec.u)
        tol = max(4 * se, 0.01)
        ok = abs(est - ref) < tol
        if aspect == 1:
            ok = ok and abs(est - 0.5) < 0.01
        record(2, f"aspect {aspect}", ok,
               f"MC {est:.4f} +- {se:.4f} vs F(u={spec.u:.4f}) = {ref:.4f}")
        assert ok, f"aspect {aspect}: |{est:.4f} - {ref:.4f}| >= {tol:.4f}"


class TestCardyODE:
    """Criterion 3: the hypergeometric ODE and the kappa = 6 expansion."""

    def test_ode_and_expansion(self, record):
        res = max(abs(cardy_ode_residual(a)) for a in np.linspace(0.1, 0.9, 81))
        coef = max(max(abs(c) for c in expansion_coefficients(a, 0.0, 6.0, 1.0))
                   for a in np.linspace(0.1, 0.9, 17))
        ok = res < 1e-4 and coef < 1e-6
        record(3, "ode", ok, f"max residual {res:.1e}, max 1/x, 1/x^2 coefficient {coef:.1e}")
        assert ok, f"ODE residual {res:.2e} or expansion coefficient {coef:.2e} too large"


class TestSyntheticKappa:
    """Criterion 4: estimator on 500 Brownian drivings per kappa."""

    @pytest.mark.parametrize("kappa", [2.0, 4.0, 6.0, 8 / 3])
    def test_recovery(self, kappa, record):
        drv = [brownian_driving(kappa, 0.25, 500, make_rng(404, i + int(1000 * kappa)))
               for i in range(500)]
        est = estimate_kappa(drv, KAPPA_GRID, n_boot=1000, rng=make_rng(405, int(10 * kappa)))
        rel = abs(est.kappa_hat - kappa) / kappa
        drift_ok = est.drift_ci95[0] <= 0 <= est.drift_ci95[1]
        ok = rel < 0.05 and drift_ok
        record(4, f"kappa {kappa:.3g}", ok,
               f"kappa_hat {est.kappa_hat:.3f} ({100 * rel:.1f}%), drift CI "
               f"[{est.drift_ci95[0]:.3f}, {est.drift_ci95[1]:.3f}]")
        assert ok, f"kappa {kappa}: estimate {est.kappa_hat:.3f}, drift CI {est.drift_ci95}"


class TestLatticeKappa:
    """Criterion 5: kappa from 200 lattice interfaces per model."""

    def _run(self, record, name, model, domain, lo, hi, contains=None, **args):
        drv = lattice_drivings(model, domain, 200, rng=make_rng(505, len(name)), **args)
        est = estimate_kappa(drv, KAPPA_GRID, n_boot=1000, rng=make_rng(506, len(name)))
        ok = lo <= est.kappa_hat <= hi
        if contains is not None:
            ok = ok and est.ci95[0] <= contains <= est.ci95[1]
        record(5, name, ok, f"kappa_hat {est.kappa_hat:.3f}, CI [{est.ci95[0]:.3f}, "
                            f"{est.ci95[1]:.3f}], target [{lo}, {hi}]")
        assert ok, f"{name}: kappa_hat {est.kappa_hat:.3f}, CI {est.ci95}"

    def test_percolation(self, record):
        self._run(record, "percolation", "percolation",
                  triangular_domain(128, 148, "bl", "tr"), 5.1, 6.9)

    def test_fk_ising(self, record):
        self._run(record, "fk q=2", "fk", square_domain(96, 96, "bl", "tr"), 4.5, 6.2,
                  contains=16 / 3, q=2.0, sweeps=300)

    def test_harmonic_explorer(self, record):
        self._run(record, "harmonic explorer", "harmonic",
                  hexagonal_domain(64, 74, "bl", "tr"), 3.4, 4.6)


class TestExactness:
    """Criterion 6: enumerated observable on every Dobrushin domain with <= 24 edges."""

    def test_all_small_domains(self, record):
        shapes = ([(k, 1) for k in range(1, 8)] + [(1, k) for k in range(2, 8)] +
                  [(2, 2), (3, 2), (2, 3), (4, 2), (2, 4), (3, 3)])
        worst = dict(projection=0.0, cr=0.0, cycle=0.0, boundary=0.0, identity=0.0, reverse=0.0)
        signs = count = 0
        for shape in shapes:
            for a, b in itertools.permutations(["tl", "tr", "br", "bl"], 2):
                d = square_domain(*shape, a, b)
                try:
                    o = fermionic_exact(d, 2.0)
                except DegenerateDomainError:
                    continue
                count += 1
                worst["projection"] = max(worst["projection"], check_projection_relation(o)["max"])
                worst["cr"] = max(worst["cr"], check_discrete_cr(o)["max"])
                c = height_checks(build_height(o))
                worst["cycle"] = max(worst["cycle"], c["cycle_discrepancy"])
                bnd = [abs(h - 1) for h in c["arc_ab_black"]] + [abs(h) for h in c["outer_white"]]
                worst["boundary"] = max([worst["boundary"]] + bnd)
                worst["identity"] = max(worst["identity"], c["laplacian_identity"])
                signs += c["laplacian_sign_violations"]
                if d.n_edges >= 12:
                    curve = trace_interface(sample_fk(d, 2.0, sweeps=5, rng=make_rng(606, count)))
                    for k in range(1, curve.n_steps):
                        r = reverse_identity(d, 2.0, curve, k)
                        if r is not None:
                            worst["reverse"] = max(worst["reverse"], r["residual"])
        ok = max(worst.values()) < 1e-10 and signs == 0
        detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        record(6, "exact", ok, f"{count} domains; {detail}; sign violations {signs}")
        assert ok, f"exactness failed: {worst}, sign violations {signs}"


class TestConvergence:
    """Criterion 7: q = 2 observable at three meshes against sqrt(Phi')."""

    def test_convergence(self, record):
        r = convergence_test(base_n=8, levels=3, n_samples=80_000, rng=make_rng(707, 0))
        ok = r.decreasing and abs(r.exponent - 0.5) <= 0.1
        record(7, "convergence", ok,
               f"errors {np.round(r.errors, 4).tolist()} +- {np.round(r.error_bars, 4).tolist()}, "
               f"exponent {r.exponent:.3f} +- {r.exponent_stderr:.3f}")
        assert ok, f"errors {r.errors}, exponent {r.exponent:.3f}"


class TestRoundtrip:
    """Criterion 8: extraction inverts the forward solver; covariance."""

    @pytest.mark.parametrize("kappa", [2.0, 8 / 3, 4.0])
    def test_roundtrip(self, kappa, record):
        c = sample_sle(kappa, 1.0, 2000, rng=make_rng(808, int(30 * kappa)))
        back = forward_solve(extract_driving(c))
        seg = float(np.mean(np.abs(np.diff(c.points))))
        err = float(np.abs(back.points - c.points).max())
        ok = err < 5 * seg
        record(8, f"roundtrip kappa {kappa:.3g}", ok, f"error {err:.1e}, 5 x segment {5 * seg:.1e}")
        assert ok

    def test_covariance(self, record):
        drv = brownian_driving(4.0, 1.0, 2000, make_rng(809, 0))
        ref = forward_solve(drv).points
        shift = forward_solve(DrivingSample(drv.times, drv.values + 0.75)).points
        lam = 2.5
        scaled = forward_solve(DrivingSample(drv.times * lam ** 2, drv.values * lam)).points
        mirror = forward_solve(DrivingSample(drv.times, -drv.values)).points
        e_t = float(np.abs(shift - (ref + 0.75)).max())
        e_s = float(np.abs(scaled - lam * ref).max())
        e_r = float(np.abs(mirror + np.conj(ref)).max())
        ok = e_t < 1e-12 and e_s < 1e-9 and e_r < 1e-9
        record(8, "covariance", ok, f"translation {e_t:.1e}, scaling {e_s:.1e}, "
                                    f"reflection {e_r:.1e}")
        assert ok


SLE_SCALES = np.geomspace(0.01, 0.01 * 10 ** 1.5, 8)


class TestDimension:
    """Criterion 9: box-counting dimensions."""

    def test_sle6(self, record):
        c = sample_sle(6.0, 1.0, 2000, rng=make_rng(909, 6), z_resolution=0.005, max_depth=12)
        d, r2 = box_dimension(c, SLE_SCALES)
        ok = abs(d - 1.75) <= 0.1
        record(9, "SLE6", ok, f"{d:.3f} (r2 {r2:.3f}), target 1.75 +- 0.1")
        assert ok, f"SLE6 box dimension {d:.3f}"

    def test_percolation(self, record):
        dom = build_rectangle_domain(LatticeSpec("triangular-site", 1.0), 512, 512)
        scales = np.geomspace(2, 2 * 10 ** 1.5, 8)
        dims = [box_dimension(explore_percolation(dom, 0.5, make_rng(910, i)), scales)[0]
                for i in range(3)]
        d = float(np.mean(dims))
        ok = abs(d - 1.75) <= 0.1
        record(9, "percolation", ok, f"{d:.3f} (curves {np.round(dims, 3).tolist()}), "
                                     f"target 1.75 +- 0.1")
        assert ok, f"percolation box dimension {d:.3f}"

    def test_sle2(self, record):
        c = sample_sle(2.0, 1.0, 2000, rng=make_rng(909, 2), z_resolution=0.005, max_depth=12)
        d, r2 = box_dimension(c, SLE_SCALES)
        ok = abs(d - 1.25) <= 0.1
        record(9, "SLE2", ok, f"{d:.3f} (r2 {r2:.3f}), target 1.25 +- 0.1")
        assert ok, f"SLE2 box dimension {d:.3f}"

    def test_line(self, record):
        z = np.linspace(0, 1, 5000) * np.exp(0.4j)
        d, _ = box_dimension(z, np.geomspace(0.002, 0.002 * 10 ** 1.5, 8))
        ok = abs(d - 1.0) <= 0.05
        record(9, "line", ok, f"{d:.3f}, target 1.00 +- 0.05")
        assert ok, f"line box dimension {d:.3f}"


class TestMartingales:
    """Criterion 10: covariant martingales are flat; wrong exponents are not."""

    CASES = [("phi", 4.0, None, True), ("phi", 16 / 3, None, True), ("psi", 3.0, None, True),
             ("phi", 6.0, 1.0, False), ("psi", 3.0, 1.0, False), ("phi", 4.0, 0.5, False)]

    @pytest.mark.parametrize("kind,kappa,alpha,expect", CASES)
    def test_martingale(self, kind, kappa, alpha, expect, record):
        f = martingale_test_phi if kind == "phi" else martingale_test_psi
        r = f(kappa, n_traces=4000, rng=make_rng(1010, int(30 * kappa)), alpha=alpha)
        ok = r["passed"] == expect
        label = f"{kind} kappa {kappa:.3g} alpha {r['alpha']:.3g}"
        record(10, label, ok, f"{'flat' if r['passed'] else 'drifts'} (max z {r['max_z_score']:.2f})")
        assert ok, f"{label}: passed={r['passed']}, expected {expect}"


class TestMarkov:
    """Criterion 11: domain Markov property, 10^4 interfaces per arm."""

    def test_matched(self, record):
        r = markov_test("percolation", prefix_length=5, n=10_000, rng=make_rng(1111, 0))
        ok = r["p_value"] > 0.01
        record(11, "matched", ok, f"p = {r['p_value']:.3g} (acceptance {r['acceptance_rate']:.3f})")
        assert ok

    def test_mismatched(self, record):
        r = markov_test("percolation", prefix_length=5, n=10_000, rng=make_rng(1111, 0),
                        mismatched=True)
        ok = r["p_value"] < 0.01
        record(11, "mismatched control", ok, f"p = {r['p_value']:.3g}")
        assert ok


class TestDeterminism:
    """Criterion 12: reruns with one seed give identical output digests."""

    COMMANDS = [
        {"command": "constants", "q": 2.0},
        {"command": "crossing", "samples": 2000, "aspect": 2.0, "height": 40},
        {"command": "estimate-kappa", "model": "sle", "kappa": 6.0, "samples": 100},
        {"command": "estimate-kappa", "model": "percolation", "width": 32, "samples": 8},
        {"command": "observable", "q": 2.0, "epsilon": 0.25, "width": 1.0, "height": 1.0,
         "samples": 2000},
        {"command": "sle", "kappa": 4.0, "steps": 500},
        {"command": "dimension", "model": "sle", "kappa": 2.0},
        {"command": "martingale", "kappa": 4.0, "samples": 500},
        {"command": "markov", "samples": 500},
    ]

    def test_digests(self, record):
        diffs = []
        for flags in self.COMMANDS:
            a = run(parse_config(flags=dict(flags, seed=1212)))["outputs"]
            b = run(parse_config(flags=dict(flags, seed=1212, threads=2)))["outputs"]
            if a != b:
                diffs.append(flags["command"])
        ok = not diffs
        record(12, "digests", ok, f"{len(self.COMMANDS)} commands rerun (1 and 2 threads), "
                                  f"{len(diffs)} differ")
        assert ok, f"digests differ for {diffs}"
