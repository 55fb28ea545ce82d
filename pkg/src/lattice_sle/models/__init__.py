from .constants import (ISING_SQUARE_BETA_C, ISING_TRIANGULAR_BETA_C, beffara_dim, beta_to_x,
                        coulomb_k, dual_p, kappa_dense, kappa_dilute, kappa_fk, p_sd,
                        spin_exponent, winding_weight, x_c, x_tilde_c)
from .fk import BondConfig, count_clusters, sample_fk
from .harmonic import harmonic_probability, sample_harmonic_explorer, turn_probability
from .ising import sample_ising_spin
from .onloop import LoopConfig, sample_loop_on
from .percolation import SiteColoring, dobrushin_boundary, sample_percolation

__all__ = [
    "ISING_SQUARE_BETA_C", "ISING_TRIANGULAR_BETA_C", "beffara_dim", "beta_to_x", "coulomb_k",
    "dual_p", "kappa_dense", "kappa_dilute", "kappa_fk", "p_sd", "spin_exponent",
    "winding_weight", "x_c", "x_tilde_c", "BondConfig", "count_clusters", "sample_fk",
    "harmonic_probability", "sample_harmonic_explorer", "turn_probability",
    "sample_ising_spin", "LoopConfig", "sample_loop_on", "SiteColoring", "dobrushin_boundary",
    "sample_percolation",
]
