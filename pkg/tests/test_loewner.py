import numpy as np
import pytest

from lattice_sle.errors import DegenerateStepError, ParameterError, RefinementRequiredError
from lattice_sle.geometry import triangular_domain
from lattice_sle.interface import explore_percolation
from lattice_sle.loewner import (DrivingSample, HalfPlaneCurve, brownian_driving,
                                 douglas_peucker, extract_driving, forward_solve,
                                 lattice_driving, sample_sle)


class TestForward:
    """Forward Loewner solver on explicit drivings."""

    def test_zero_driving_is_vertical(self):
        t = np.linspace(0, 1, 101)
        c = forward_solve(DrivingSample(t, np.zeros_like(t)))
        assert np.abs(c.points.real).max() < 1e-12
        assert np.allclose(c.points.imag, 2 * np.sqrt(t), atol=1e-12), "tip is 2 sqrt(t) i"

    def test_constant_shift(self):
        t = np.linspace(0, 1, 51)
        c = forward_solve(DrivingSample(t, np.full_like(t, 3.0)))
        assert np.allclose(c.points, 3.0 + 2j * np.sqrt(t), atol=1e-12)

    def test_jump_needs_refinement(self):
        t = np.linspace(0, 1e-4, 3)
        with pytest.raises(RefinementRequiredError):
            forward_solve(DrivingSample(t, np.array([0.0, 5.0, 5.0])))

    def test_linear_mode_refines(self):
        t = np.linspace(0, 1, 11)
        w = 0.5 * t
        c = forward_solve(DrivingSample(t, w, "linear"), z_resolution=0.05)
        assert len(c.points) == len(t)
        assert np.all(c.points[1:].imag > 0)

    def test_bad_samples(self):
        with pytest.raises(ParameterError):
            DrivingSample(np.array([0.0, 0.0]), np.array([0.0, 1.0]))
        with pytest.raises(ParameterError):
            DrivingSample(np.array([0.1, 0.2]), np.array([0.0, 1.0]))


class TestExtraction:
    """Zipper extraction and its inverse."""

    def test_vertical_slit_capacity(self):
        h = np.linspace(0, 1.5, 31)
        d = extract_driving(HalfPlaneCurve(1j * h))
        assert abs(d.total_time - 1.5 ** 2 / 4) < 1e-12, f"capacity {d.total_time}"
        assert np.abs(d.values).max() < 1e-12

    @pytest.mark.parametrize("kappa", [2.0, 8 / 3, 4.0])
    def test_roundtrip(self, kappa):
        c = sample_sle(kappa, 1.0, 2000, rng=int(kappa * 10))
        d = extract_driving(c)
        back = forward_solve(d)
        seg = np.mean(np.abs(np.diff(c.points)))
        err = np.abs(back.points - c.points).max()
        assert err < 5 * seg, f"kappa={kappa}: roundtrip error {err:.3g}, segment {seg:.3g}"
        assert np.abs(d.values - c.extra["driving"].values).max() < 1e-9

    def test_real_axis_point(self):
        z = np.array([0, 0.5j, 1.0 + 0j])
        with pytest.raises(DegenerateStepError):
            extract_driving(HalfPlaneCurve(z))
        d = extract_driving(HalfPlaneCurve(z), lift=1e-6)
        assert len(d.times) == 3

    def test_base_on_real_axis(self):
        with pytest.raises(ParameterError):
            extract_driving(HalfPlaneCurve(np.array([1j, 2j])))

    def test_douglas_peucker(self):
        z = np.linspace(0, 1, 50) + 1j * np.linspace(0, 1, 50)
        assert len(douglas_peucker(z, 1e-9)) == 2
        bent = np.concatenate([z, 1 + 1j + np.linspace(0, 1, 20)[1:]])
        assert len(douglas_peucker(bent, 1e-6)) == 3

    def test_lattice_driving(self):
        d = triangular_domain(30, 34, "bl", "tr")
        curve = explore_percolation(d, 0.5, rng=3)
        drv = lattice_driving(curve, d, t_max=0.1)
        assert drv.times[-2] < 0.1 <= drv.times[-1], "extraction stops at the first step past t_max"
        assert len(drv.times) > 10


class TestCovariance:
    """Translation, scaling and reflection of the Loewner map."""

    def setup_method(self):
        self.drv = brownian_driving(3.0, 1.0, 500, rng=8)
        self.ref = forward_solve(self.drv).points

    def test_translation(self):
        d = DrivingSample(self.drv.times, self.drv.values + 0.75)
        err = np.abs(forward_solve(d).points - (self.ref + 0.75)).max()
        assert err == 0.0 or err < 1e-13, f"translation error {err}"

    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.7])
    def test_scaling(self, lam):
        d = DrivingSample(self.drv.times * lam ** 2, self.drv.values * lam)
        err = np.abs(forward_solve(d).points - lam * self.ref).max()
        assert err < 1e-9, f"scale {lam}: error {err}"

    def test_reflection(self):
        d = DrivingSample(self.drv.times, -self.drv.values)
        err = np.abs(forward_solve(d).points + np.conj(self.ref)).max()
        assert err < 1e-9, f"reflection error {err}"


    def test_extraction_covariance(self):
        """Moving the curve moves the driving; scaling and reflection act as on Brownian paths."""
        d = extract_driving(HalfPlaneCurve(self.ref))
        moved = extract_driving(HalfPlaneCurve(self.ref + 0.7))
        assert np.abs(moved.values - d.values - 0.7).max() < 1e-9
        big = extract_driving(HalfPlaneCurve(3.0 * self.ref))
        assert np.abs(big.values - 3 * d.values).max() < 1e-9
        assert np.abs(big.times - 9 * d.times).max() < 1e-9
        mirror = extract_driving(HalfPlaneCurve(-np.conj(self.ref)))
        assert np.abs(mirror.values + d.values).max() < 1e-9


class TestSampling:
    """Brownian drivings and SLE traces."""

    def test_deterministic(self):
        a = sample_sle(4.0, 1.0, 300, rng=12)
        b = sample_sle(4.0, 1.0, 300, rng=12)
        assert np.array_equal(a.points, b.points)
        c = sample_sle(4.0, 1.0, 300, rng=13)
        assert not np.array_equal(a.points, c.points)

    def test_quadratic_variation(self):
        d = brownian_driving(6.0, 1.0, 20000, rng=0)
        qv = np.sum(np.diff(d.values) ** 2)
        assert abs(qv - 6.0) < 0.2, f"quadratic variation {qv:.3f} for kappa 6"

    def test_adaptive_resolution(self):
        c = sample_sle(6.0, 1.0, 200, rng=2, z_resolution=0.05)
        gaps = np.abs(np.diff(c.points))
        assert np.mean(gaps <= 0.05 + 1e-12) > 0.95
        assert abs(c.capacity - 1.0) < 1e-12

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            brownian_driving(-1.0, 1.0, 10)
        with pytest.raises(ParameterError):
            sample_sle(2.0, 1.0, 10, z_resolution=-1.0)
