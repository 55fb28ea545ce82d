import json

import numpy as np
import pytest

from lattice_sle.analysis import (KAPPA_GRID, box_count, box_dimension, default_scales, densify,
                                  dumps, estimate_kappa, increment_tests, lattice_drivings,
                                  make_report, markov_test, martingale_test_phi,
                                  martingale_test_psi, sample_matrix)
from lattice_sle.errors import AttritionError, ParameterError, RangeError, ScaleRangeError
from lattice_sle.geometry import triangular_domain
from lattice_sle.loewner import DrivingSample, brownian_driving, sample_sle
from lattice_sle.rng import make_rng


def drivings(kappa, n, seed, drift=0.0, T=0.25, steps=500):
    return [brownian_driving(kappa, T, steps, make_rng(seed, i), drift=drift) for i in range(n)]


class TestKappaEstimator:
    """Variance regression on synthetic Brownian drivings."""

    @pytest.mark.parametrize("kappa", [2.0, 6.0])
    def test_recovers_kappa(self, kappa):
        est = estimate_kappa(drivings(kappa, 300, 1), KAPPA_GRID, n_boot=300, rng=2)
        rel = abs(est.kappa_hat - kappa) / kappa
        assert rel < 0.1, f"kappa {kappa}: estimate {est.kappa_hat:.3f}"
        assert est.ci95[0] <= est.kappa_hat <= est.ci95[1]
        assert est.drift_ci95[0] < 0 < est.drift_ci95[1], f"drift CI {est.drift_ci95}"

    def test_zero_driving(self):
        t = np.linspace(0, 0.25, 11)
        zero = [DrivingSample(t, np.zeros_like(t)) for _ in range(5)]
        est = estimate_kappa(zero, KAPPA_GRID, n_boot=50, rng=0)
        assert est.kappa_hat == 0.0 and est.drift_hat == 0.0

    def test_drift_detected(self):
        est = estimate_kappa(drivings(4.0, 300, 3, drift=5.0), KAPPA_GRID, n_boot=300, rng=1)
        assert est.drift_ci95[0] > 0, f"drift CI {est.drift_ci95} should exclude 0"
        assert abs(est.drift_hat - 5.0) < 1.5

    def test_grid_past_end(self):
        with pytest.raises(RangeError):
            sample_matrix(drivings(2.0, 3, 0, T=0.1), KAPPA_GRID)

    def test_bad_grid(self):
        with pytest.raises(ParameterError):
            estimate_kappa(drivings(2.0, 3, 0), [0.0, 0.1])

    def test_report(self):
        est = estimate_kappa(drivings(2.0, 20, 0), KAPPA_GRID, n_boot=20, rng=0)
        rep = json.loads(dumps(est.to_report(seed=7)))
        assert rep["test"] == "estimate-kappa" and rep["seed"] == 7


class TestIncrements:
    """Normality and independence of driving increments."""

    def test_brownian_passes(self):
        r = increment_tests(drivings(4.0, 300, 5), KAPPA_GRID)
        assert r["frac_ad_below_001"] <= 0.15
        assert r["lag1_pvalue"] > 0.001, f"lag-1 r = {r['lag1_r']:.3f}"

    def test_correlated_increments_fail(self):
        rng = np.random.default_rng(0)
        t = np.linspace(0, 0.25, 501)
        out = []
        for _ in range(300):
            e = rng.standard_normal(500)
            inc = np.sqrt(4 * t[1]) * (e + 0.9 * np.concatenate([[0], e[:-1]]))
            out.append(DrivingSample(t, np.concatenate([[0], np.cumsum(np.convolve(inc, np.ones(40) / 40, "same"))])))
        r = increment_tests(out, KAPPA_GRID)
        assert r["lag1_pvalue"] < 1e-6, f"smoothed increments gave lag-1 r = {r['lag1_r']:.3f}"

    def test_too_few(self):
        assert increment_tests(drivings(2.0, 3, 0), KAPPA_GRID)["insufficient_data"]


class TestLatticeDrivings:
    """Drivings of lattice interfaces, independent of the thread count."""

    def test_thread_invariance(self):
        d = triangular_domain(24, 28, "bl", "tr")
        a = lattice_drivings("percolation", d, 4, rng=3, t_max=0.05, threads=1)
        b = lattice_drivings("percolation", d, 4, rng=3, t_max=0.05, threads=2)
        for x, y in zip(a, b):
            assert np.array_equal(x.values, y.values)

    def test_unknown_model(self):
        with pytest.raises(ParameterError):
            lattice_drivings("potts", triangular_domain(10, 10), 1)


class TestMartingales:
    """Expected values of the covariant martingales along SLE."""

    @pytest.mark.parametrize("kind,kappa", [("phi", 4.0), ("phi", 16 / 3), ("psi", 3.0)])
    def test_true_exponent_is_flat(self, kind, kappa):
        f = martingale_test_phi if kind == "phi" else martingale_test_psi
        r = f(kappa, n_traces=2000, rng=11)
        assert r["passed"], f"{kind} kappa={kappa}: max z {r['max_z_score']:.2f}"
        assert abs(r["initial"] - r["direct_initial"]) < 1e-12

    @pytest.mark.parametrize("kind,kappa,alpha", [("phi", 6.0, 1.0), ("psi", 3.0, 1.0)])
    def test_wrong_exponent_drifts(self, kind, kappa, alpha):
        f = martingale_test_phi if kind == "phi" else martingale_test_psi
        r = f(kappa, n_traces=2000, rng=11, alpha=alpha)
        assert not r["passed"], f"{kind} kappa={kappa} alpha={alpha} should fail"

    def test_attrition(self):
        with pytest.raises(AttritionError):
            martingale_test_phi(6.0, z=0.01 + 0.001j, n_traces=400, rng=0,
                                checkpoints=(0.0, 2.0, 4.0), steps_per_unit=500)

    def test_bad_point(self):
        with pytest.raises(ParameterError):
            martingale_test_phi(4.0, z=1.0 - 1j)


class TestDimension:
    """Box counting on curves with known dimension."""

    def test_straight_line(self):
        z = np.linspace(0, 1, 2000) * (1 + 0.3j)
        d, r2 = box_dimension(z, np.geomspace(0.002, 0.1, 8))
        assert abs(d - 1) < 0.05, f"line dimension {d:.3f}"
        assert r2 > 0.99

    def test_filled_square(self):
        n = 200
        rows = [np.linspace(0, 1, 4 * n) + 1j * k / n for k in range(n)]
        z = np.concatenate([r if k % 2 == 0 else r[::-1] for k, r in enumerate(rows)])
        d, _ = box_dimension(z, np.geomspace(0.01, 0.35, 6))
        assert d > 1.85, f"area-filling curve gave {d:.3f}"

    def test_sle2(self):
        c = sample_sle(2.0, 1.0, 2000, rng=5, z_resolution=0.005, max_depth=12)
        d, _ = box_dimension(c, np.geomspace(0.01, 0.01 * 10 ** 1.5, 8))
        assert abs(d - 1.25) < 0.1, f"SLE2 box dimension {d:.3f}"

    def test_scale_range(self):
        z = np.linspace(0, 1, 100) + 0j
        with pytest.raises(ScaleRangeError):
            box_dimension(z, [0.01, 0.02, 0.04, 0.08])
        with pytest.raises(ScaleRangeError):
            box_dimension(z, np.geomspace(0.01, 0.5, 5))

    def test_helpers(self):
        z = densify(np.array([0, 1 + 0j]), 0.1)
        assert len(z) == 11 and np.abs(np.diff(z)).max() <= 0.1 + 1e-12
        assert box_count(np.array([0.1 + 0.1j]), 1.0) == 1.0
        s = default_scales(z)
        assert len(s) == 8 and abs(np.log10(s[-1] / s[0]) - 1.5) < 1e-12


class TestMarkov:
    """Conditioned interfaces against slit-domain interfaces."""

    def test_matched_and_mismatched(self):
        ok = markov_test("percolation", n=600, rng=4)
        assert ok["p_value"] > 0.001, f"matched arms p = {ok['p_value']:.3g}"
        assert ok["table"].sum() == 1200
        bad = markov_test("percolation", n=600, rng=4, mismatched=True)
        assert bad["p_value"] < 0.01, f"mismatched arms p = {bad['p_value']:.3g}"

    def test_unknown_model(self):
        with pytest.raises(ParameterError):
            markov_test("ising", n=100)


class TestReports:
    """Report records serialise to plain JSON."""

    def test_numpy_values(self):
        rep = make_report("x", {"a": np.float64(1.5)}, np.array([1.0, 2.0]), 3, seed=1,
                          p_value=np.float64(0.2))
        back = json.loads(dumps(rep))
        assert back["statistic"] == [1.0, 2.0] and back["p_value"] == 0.2
