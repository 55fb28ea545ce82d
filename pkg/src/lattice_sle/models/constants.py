"""Closed-form critical constants of the O(n), FK and SLE families."""
import numpy as np

from ..errors import ParameterError


def _check_n(n):
    if not (0.0 <= n <= 2.0):
        raise ParameterError(f"n={n} outside [0, 2]")


def _check_q(q):
    if not (0.0 <= q <= 4.0):
        raise ParameterError(f"q={q} outside [0, 4]")


def x_c(n: float) -> float:
    """Dilute critical point of the hexagonal O(n) model."""
    _check_n(n)
    return 1.0 / np.sqrt(2.0 + np.sqrt(2.0 - n))


def x_tilde_c(n: float) -> float:
    """Boundary of the dense phase, 1/sqrt(2 - sqrt(2 - n))."""
    _check_n(n)
    return 1.0 / np.sqrt(2.0 - np.sqrt(2.0 - n))


def kappa_dilute(n: float) -> float:
    _check_n(n)
    return 4 * np.pi / (2 * np.pi - np.arccos(-n / 2.0))


def kappa_dense(n: float) -> float:
    _check_n(n)
    return 4 * np.pi / np.arccos(-n / 2.0)


def p_sd(q: float) -> float:
    """Self-dual point sqrt(q)/(sqrt(q)+1) of the random cluster model."""
    _check_q(q)
    return np.sqrt(q) / (np.sqrt(q) + 1.0)


def kappa_fk(q: float) -> float:
    _check_q(q)
    return 4 * np.pi / np.arccos(-np.sqrt(q) / 2.0)


def coulomb_k(q: float) -> float:
    """k with mu + conj(mu) = sqrt(q), mu = exp(2 pi i k)."""
    _check_q(q)
    return np.arccos(np.sqrt(q) / 2.0) / (2 * np.pi)


def spin_exponent(q: float) -> float:
    """Winding exponent sigma = 1 - 4k of the fermionic observable."""
    return 1.0 - 4.0 * coulomb_k(q)


def beffara_dim(kappa: float) -> float:
    if not kappa >= 0:
        raise ParameterError(f"kappa={kappa} must be non-negative")
    return min(1.0 + kappa / 8.0, 2.0)


def dual_p(p: float, q: float) -> float:
    """p* with p*/(1-p*) = q(1-p)/p."""
    r = q * (1.0 - p) / p
    return r / (1.0 + r)


def beta_to_x(beta: float) -> float:
    return float(np.exp(-2.0 * beta))


# self-dual square-lattice Ising point, x = exp(-2 beta) = sqrt(2) - 1
ISING_SQUARE_BETA_C = 0.5 * np.log(1.0 + np.sqrt(2.0))
ISING_TRIANGULAR_BETA_C = np.log(3.0) / 4.0


def winding_weight(q: float, winding: float) -> complex:
    """Relative weight exp(i(4k-1) w) of a passage with winding w from b."""
    return complex(np.exp(1j * (4 * coulomb_k(q) - 1.0) * winding))
