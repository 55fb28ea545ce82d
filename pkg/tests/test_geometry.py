import numpy as np
import pytest

from lattice_sle.errors import DegenerateDomainError, ParameterError, SingularEvaluationError
from lattice_sle.geometry import (LatticeSpec, build_rectangle_domain, corner_cross_ratio,
                                  corner_id, domain_to_halfplane, halfplane_normalized,
                                  halfplane_to_strip, hexagonal_domain, medial_graph, phi_prime,
                                  psi_prime, rect_to_halfplane, sc_cross_ratio_oracle,
                                  square_domain, triangular_domain)


class TestDomains:
    """Counts and boundary structure of the rectangle builders."""

    def test_square_counts(self):
        d = square_domain(4, 4)
        assert d.n_vertices == 25, f"expected 25 vertices, got {d.n_vertices}"
        assert len(d.boundary_cycle) == 16, f"boundary has {len(d.boundary_cycle)} vertices"
        assert d.n_edges == 40

    @pytest.mark.parametrize("builder,shape", [(square_domain, (3, 5)),
                                               (triangular_domain, (6, 7)),
                                               (hexagonal_domain, (4, 4))])
    @pytest.mark.parametrize("corners", [("tl", "br"), ("bl", "tr"), ("bl", "br")])
    def test_arcs_partition_boundary(self, builder, shape, corners):
        d = builder(*shape, *corners)
        assert d.check_invariants()
        ab, ba = set(d.arc_ab), set(d.arc_ba)
        assert ab & ba == {d.a, d.b}, f"arcs share {ab & ba}"
        assert d.arc_ab[0] == d.a and d.arc_ab[-1] == d.b

    def test_equal_corners_rejected(self):
        with pytest.raises(ParameterError):
            square_domain(3, 3, "tl", "tl")

    def test_degenerate_rectangle(self):
        with pytest.raises(DegenerateDomainError):
            build_rectangle_domain(LatticeSpec("square-bond", 1.0), 2, 2)

    def test_corner_aliases(self):
        assert corner_id("Top-Left") == "tl"
        assert corner_id("se") == "br"
        with pytest.raises(ParameterError):
            corner_id("middle")

    def test_mesh_scaling(self):
        d1 = build_rectangle_domain(LatticeSpec("square-bond", 1.0), 8, 4)
        d2 = build_rectangle_domain(LatticeSpec("square-bond", 0.5), 8, 4)
        assert d2.n_vertices > 3 * d1.n_vertices


class TestMedial:
    """The medial graph has one vertex per primal edge."""

    @pytest.mark.parametrize("shape,count", [((1, 1), 4), ((2, 1), 7), ((2, 2), 12)])
    def test_vertex_count(self, shape, count):
        m = medial_graph(square_domain(*shape))
        assert m.n_vertices == count, f"{shape}: {m.n_vertices} medial vertices, expected {count}"

    def test_needs_square_bond(self):
        with pytest.raises(Exception):
            medial_graph(triangular_domain(5, 5))


class TestConformal:
    """Rectangle to half-plane maps and the derivative formulas."""

    def test_square_cross_ratio(self):
        u = corner_cross_ratio(1.0)
        assert abs(u - 0.5) < 1e-12, f"u(1) = {u}"

    @pytest.mark.parametrize("aspect", [0.5, 2.0, 3.0, 5.0])
    def test_cross_ratio_matches_oracle(self, aspect):
        u, ref = corner_cross_ratio(aspect), sc_cross_ratio_oracle(aspect)
        assert abs(u - ref) < 1e-8, f"aspect {aspect}: {u} vs quadrature {ref}"

    @pytest.mark.parametrize("aspect", [1.0, 2.0, 0.5])
    def test_corners_map_to_marked_points(self, aspect):
        f = rect_to_halfplane(aspect, "tl", "br")
        z0 = f(complex(1e-9, 1 - 1e-9))
        assert abs(z0) < 1e-3, f"a corner image {z0}"
        far = f(complex(aspect - 1e-7, 1e-7))
        assert abs(far) > 1e2, f"b corner image {far}"

    @pytest.mark.parametrize("aspect", [1.0, 2.5, 0.4])
    def test_interior_maps_to_upper_half_plane(self, aspect):
        f = rect_to_halfplane(aspect, "bl", "tr")
        rng = np.random.default_rng(0)
        z = rng.uniform(0.02, 0.98, 200) * aspect + 1j * rng.uniform(0.02, 0.98, 200)
        assert np.all(f(z).imag > 0), "interior point mapped outside H"

    def test_derivative_finite_difference(self):
        f = rect_to_halfplane(2.0, "tl", "br")
        z, h = complex(0.7, 0.4), 1e-6
        fd = (f(z + h) - f(z - h)) / (2 * h)
        d = f.derivative(z)
        assert abs(fd - d) < 1e-5 * abs(d), f"derivative {d} vs finite difference {fd}"

    def test_phi_prime_at_i(self):
        v = phi_prime(1j)
        assert abs(v - (-1j / np.pi)) < 1e-15, f"phi'(i) = {v}"

    def test_strip_map(self):
        f = halfplane_to_strip()
        w = f(np.array([1j, 2 + 0.1j, -3 + 0.01j]))
        assert np.all((w.imag > 0) & (w.imag < 1))

    def test_psi_prime_matches_map(self):
        for b in [np.inf, 2.0, -1.5]:
            f = halfplane_normalized(b)
            z, h = complex(0.3, 0.8), 1e-6
            fd = (f(z + h) - f(z - h)) / (2 * h)
            assert abs(fd - psi_prime(z, b)) < 1e-6, f"b={b}: {fd} vs {psi_prime(z, b)}"

    def test_singular_points(self):
        with pytest.raises(SingularEvaluationError):
            phi_prime(0.5)
        with pytest.raises(SingularEvaluationError):
            psi_prime(1j, 0.0)

    def test_domain_map_sends_marked_vertices(self):
        d = square_domain(8, 8, "bl", "tr")
        f = domain_to_halfplane(d)
        za, zb = d.positions[d.a], d.positions[d.b]
        assert abs(f(complex(za) + complex(1e-6, 1e-6))) < 1e-2
        assert abs(f(complex(zb) - complex(1e-6, 1e-6))) > 1e2
