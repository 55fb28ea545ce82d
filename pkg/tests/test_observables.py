import itertools

import numpy as np
import pytest

from lattice_sle.errors import DegenerateDomainError, EnumerationLimitError, ParameterError
from lattice_sle.geometry import LatticeSpec, build_rectangle_domain, square_domain
from lattice_sle.interface import trace_interface
from lattice_sle.models import sample_fk
from lattice_sle.observables import (CrossingSpec, NORMALIZATION, build_height, cardy_F,
                                     cardy_F_series, cardy_ode_residual, check_discrete_cr,
                                     check_projection_relation, crossing_probability_mc,
                                     crossing_union_find, expansion_coefficients,
                                     fermionic_exact, fermionic_mc, height_checks,
                                     reverse_identity, sigma_of_q)
from lattice_sle.observables.cardy import _full_colouring, _setup, crossing_explore_fixed

SHAPES = ([(k, 1) for k in range(1, 8)] + [(1, k) for k in range(2, 8)] +
          [(2, 2), (3, 2), (2, 3), (4, 2), (2, 4), (3, 3)])
PAIRS = list(itertools.permutations(["tl", "tr", "br", "bl"], 2))


def small_domains():
    """Every rectangle Dobrushin domain with at most 24 primal edges and a chord."""
    out = []
    for shape in SHAPES:
        for a, b in PAIRS:
            d = square_domain(*shape, a, b)
            assert d.n_edges <= 24
            try:
                fermionic_exact(d, 2.0)
            except DegenerateDomainError:
                continue
            out.append(d)
    return out


class TestCardy:
    """Crossing function, its series oracle and its ODE."""

    def test_symmetry(self):
        for u in np.linspace(0.05, 0.95, 19):
            s = cardy_F(u) + cardy_F(1 - u)
            assert abs(s - 1) < 1e-10, f"F({u}) + F(1-u) = {s}"
        assert abs(cardy_F(0.5) - 0.5) < 1e-12

    @pytest.mark.parametrize("u", [0.01, 0.2, 0.5, 0.8, 0.97])
    def test_series_oracle(self, u):
        assert abs(cardy_F(u) - cardy_F_series(u)) < 1e-10

    def test_monotone_limits(self):
        v = [cardy_F(u) for u in np.linspace(1e-4, 1 - 1e-4, 50)]
        assert np.all(np.diff(v) > 0)
        assert v[0] < 0.05 and v[-1] > 0.95

    def test_ode(self):
        worst = max(abs(cardy_ode_residual(a)) for a in np.linspace(0.1, 0.9, 33))
        assert worst < 1e-4, f"ODE residual {worst:.2e}"
        literal = abs(cardy_ode_residual(0.3, literal=True))
        assert literal > 1e-2, "the variant without a in the denominator should fail"

    @pytest.mark.parametrize("a", [0.2, 1 / 3, 0.5, 0.7])
    def test_kappa6_expansion(self, a):
        c1, c2 = expansion_coefficients(a, 0.0, 6.0, 1.0)
        assert abs(c1) < 1e-6 and abs(c2) < 1e-6, f"a={a}: coefficients {c1:.2e}, {c2:.2e}"
        _, c2_wrong = expansion_coefficients(a, 0.0, 4.0, 1.0)
        if abs(a - 0.5) > 1e-9:
            assert abs(c2_wrong) > 1e-3, "kappa 4 must not cancel the 1/x^2 term"

    def test_range(self):
        with pytest.raises(ParameterError):
            cardy_ode_residual(1.2)


class TestCrossingMC:
    """Monte Carlo crossing estimates on triangular-site rectangles."""

    def test_methods_agree_per_colouring(self):
        dom = build_rectangle_domain(LatticeSpec("triangular-site"), 24, 12)
        spec = CrossingSpec(dom, "tl")
        g = _setup(spec)[0]
        rng = np.random.default_rng(3)
        for _ in range(200):
            col = _full_colouring(g, 0.5, rng)
            assert crossing_union_find(spec, col) == crossing_explore_fixed(spec, col)

    def test_square_near_half(self):
        dom = build_rectangle_domain(LatticeSpec("triangular-site"), 40, 40)
        est, se = crossing_probability_mc(CrossingSpec(dom, "tl"), 0.5, 4000, rng=1)
        assert abs(est - 0.5) < max(4 * se, 0.02), f"estimate {est:.4f} +- {se:.4f}"

    def test_extreme_p(self):
        dom = build_rectangle_domain(LatticeSpec("triangular-site"), 20, 10)
        spec = CrossingSpec(dom, "tl")
        assert crossing_probability_mc(spec, 1.0, 20, rng=0)[0] == 1.0
        assert crossing_probability_mc(spec, 0.0, 20, rng=0)[0] == 0.0


class TestExactObservable:
    """Enumerated observable on every small Dobrushin domain."""

    domains = small_domains()

    def test_domain_count(self):
        assert len(self.domains) == 200, f"{len(self.domains)} domains with a chord"

    def test_projection_and_cr(self):
        worst_p = worst_c = 0.0
        for d in self.domains:
            o = fermionic_exact(d, 2.0)
            worst_p = max(worst_p, check_projection_relation(o)["max"])
            worst_c = max(worst_c, check_discrete_cr(o)["max"])
        assert worst_p < 1e-10, f"projection residual {worst_p:.2e}"
        assert worst_c < 1e-10, f"Cauchy-Riemann residual {worst_c:.2e}"

    def test_height_function(self):
        for d in self.domains:
            c = height_checks(build_height(fermionic_exact(d, 2.0)))
            tag = f"{d.shape} {d.extra['corners']}"
            assert c["cycle_discrepancy"] < 1e-10, tag
            assert all(abs(h - 1) < 1e-10 for h in c["arc_ab_black"]), tag
            assert all(abs(h) < 1e-10 for h in c["outer_white"]), tag
            assert c["laplacian_sign_violations"] == 0, tag
            assert c["laplacian_identity"] < 1e-10, tag

    def test_sign_tolerance_only_absorbs_rounding(self):
        """On 3x3 tl->br two faces have a Laplacian of exactly zero, seen as +-1e-14."""
        hf = build_height(fermionic_exact(square_domain(3, 3, "tl", "br"), 2.0))
        strict = height_checks(hf, sign_tol=0.0)["laplacian_sign_violations"]
        assert strict == 2, f"expected the two rounding-level faces, got {strict}"
        assert height_checks(hf, sign_tol=1e-13)["laplacian_sign_violations"] == 0

    def test_normalization(self):
        d = square_domain(2, 2, "tl", "br")
        raw = fermionic_exact(d, 2.0)
        norm = fermionic_exact(d, 2.0, normalize=True)
        assert np.allclose(norm.edge_values, raw.edge_values * NORMALIZATION, atol=1e-15)
        assert np.allclose(norm.vertex_values, raw.vertex_values, atol=1e-15)
        assert abs(sigma_of_q(2.0) - 0.5) < 1e-15

    def test_reverse_identity(self):
        worst, checked = 0.0, 0
        for shape, corners, seed in [((3, 3), ("bl", "tr"), 1), ((2, 4), ("bl", "br"), 2),
                                     ((3, 2), ("tl", "br"), 3)]:
            d = square_domain(*shape, *corners)
            curve = trace_interface(sample_fk(d, 2.0, sweeps=5, rng=seed))
            for k in range(1, curve.n_steps):
                r = reverse_identity(d, 2.0, curve, k)
                if r is None:
                    continue
                checked += 1
                worst = max(worst, r["residual"])
                assert abs(r["prob_sum"] - 1) < 1e-12
        assert checked > 3
        assert worst < 1e-10, f"one-step identity residual {worst:.2e}"

    def test_enumeration_limit(self):
        with pytest.raises(EnumerationLimitError):
            fermionic_exact(square_domain(4, 3), 2.0)


class TestMonteCarloObservable:
    """Markov chain estimates against enumeration."""

    @pytest.mark.parametrize("method", ["swendsen-wang", "heat-bath"])
    def test_matches_exact(self, method):
        d = square_domain(3, 3, "bl", "tr")
        exact = fermionic_exact(d, 2.0).edge_values
        mc = fermionic_mc(d, 2.0, 20000, rng=4, method=method, burn_in=50)
        se = np.hypot(mc.edge_stderr[:, 0], mc.edge_stderr[:, 1])
        z = np.abs(mc.edge_values - exact) / np.maximum(se, 1e-3)
        assert np.max(z) < 5, f"{method}: worst deviation {np.max(z):.2f} standard errors"

    def test_q_range(self):
        with pytest.raises(ParameterError):
            fermionic_mc(square_domain(3, 3), 5.0, 100)
