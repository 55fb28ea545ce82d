from .reports import dumps, make_report
from .kappa import (KAPPA_GRID, KappaEstimate, estimate_kappa, increment_tests,
                    lattice_drivings, sample_interface, sample_matrix)
from .martingale import (ATTRITION_LIMIT, alpha_phi, alpha_psi, evolve_point,
                         martingale_test_phi, martingale_test_psi)
from .dimension import box_count, box_dimension, default_scales, densify
from .markov import markov_test

__all__ = [
    "dumps", "make_report", "KAPPA_GRID", "KappaEstimate", "estimate_kappa", "increment_tests",
    "lattice_drivings", "sample_interface", "sample_matrix", "ATTRITION_LIMIT", "alpha_phi",
    "alpha_psi", "evolve_point", "martingale_test_phi", "martingale_test_psi", "box_count",
    "box_dimension", "default_scales", "densify", "markov_test",
]
