from .cardy import (CrossingSpec, cardy_derivatives, cardy_F, cardy_F_series, cardy_ode_residual,
                    crossing_arcs, crossing_probability_mc, crossing_union_find,
                    expansion_coefficients)
from .fermionic import (NORMALIZATION, EdgeObservable, check_discrete_cr,
                        check_projection_relation, cr_residuals, fermionic_exact, fermionic_mc,
                        line_directions, reverse_identity, sigma_of_q, vertex_values_from_edges)
from .height import HeightFunction, build_height, height_checks
from .convergence import ConvergenceReport, convergence_test, strip_derivative

__all__ = [
    "CrossingSpec", "cardy_derivatives", "cardy_F", "cardy_F_series", "cardy_ode_residual",
    "crossing_arcs", "crossing_probability_mc", "crossing_union_find", "expansion_coefficients",
    "NORMALIZATION", "EdgeObservable", "check_discrete_cr", "check_projection_relation",
    "cr_residuals", "fermionic_exact", "fermionic_mc", "line_directions", "reverse_identity",
    "sigma_of_q", "vertex_values_from_edges", "HeightFunction", "build_height", "height_checks",
    "ConvergenceReport", "convergence_test", "strip_derivative",
]
