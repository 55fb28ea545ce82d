"""Spin Ising model with Dobrushin boundary spins, random-scan heat bath."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from ..errors import ParameterError, UnsupportedLatticeError
from ..geometry import DiscreteDomain
from ..rng import as_rng
from .percolation import SiteColoring, dobrushin_boundary, interior_mask


@lru_cache(maxsize=64)
def _adjacency(domain):
    n = domain.n_vertices
    deg = np.zeros(n + 1, dtype=np.int64)
    for u, v in domain.edges:
        deg[u + 1] += 1
        deg[v + 1] += 1
    ptr = np.cumsum(deg)
    nb = np.empty(ptr[-1], dtype=np.int64)
    fill = ptr[:-1].copy()
    for u, v in domain.edges:
        nb[fill[u]] = v
        fill[u] += 1
        nb[fill[v]] = u
        fill[v] += 1
    free = np.flatnonzero(interior_mask(domain)).astype(np.int64)
    return ptr, nb, free


@njit(cache=True)
def ising_heat_bath_kernel(spin, free, ptr, nb, x, n_updates, rng):
    """P(s = +1) = 1 / (1 + x^{-(h)}) with h = sum of neighbour spins."""
    nf = free.shape[0]
    for _ in range(n_updates):
        v = free[rng.integers(0, nf)]
        h = 0
        for j in range(ptr[v], ptr[v + 1]):
            h += spin[nb[j]]
        # weight x^{#opposite}: +1 has h_minus = (deg - h)/2 opposite pairs
        pp = 1.0 / (1.0 + x ** h)
        spin[v] = 1 if rng.random() < pp else -1


def sample_ising_spin(domain: DiscreteDomain, beta: float, sweeps: int = 1, rng=None,
                      init: SiteColoring | None = None) -> SiteColoring:
    """Gibbs sample of weight x^{#opposite pairs}, x = exp(-2 beta).

    One sweep is as many single-site updates as there are free sites.
    """
    if domain.kind not in ("square-bond", "triangular-site"):
        raise UnsupportedLatticeError("spin Ising needs a square-bond or triangular-site domain")
    if not (beta > 0):
        raise ParameterError(f"beta must be positive, got {beta}")
    if sweeps < 1:
        raise ParameterError("sweeps must be at least 1")
    rng = as_rng(rng)
    ptr, nb, free = _adjacency(domain)
    if init is not None:
        spin = np.array(init.colors, dtype=np.int8)
    else:
        spin = dobrushin_boundary(domain)
        spin[free] = np.where(rng.random(len(free)) < 0.5, 1, -1)
    if len(free):
        ising_heat_bath_kernel(spin, free, ptr, nb, float(np.exp(-2 * beta)),
                               sweeps * len(free), rng)
    return SiteColoring(domain, spin)


def ising_energy(domain: DiscreteDomain, spins) -> int:
    """Number of opposite-spin neighbour pairs."""
    e = np.asarray(domain.edges)
    return int(np.sum(spins[e[:, 0]] != spins[e[:, 1]]))


def heat_bath_transition_matrix(domain: DiscreteDomain, beta: float):
    """Exact random-scan transition matrix on all interior spin assignments."""
    ptr, nb, free = _adjacency(domain)
    x = np.exp(-2 * beta)
    base = dobrushin_boundary(domain)
    states = []
    for bits in range(1 << len(free)):
        s = base.copy()
        s[free] = [1 if (bits >> i) & 1 else -1 for i in range(len(free))]
        states.append(s)
    pi = np.array([x ** ising_energy(domain, s) for s in states])
    pi /= pi.sum()
    P = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for k, v in enumerate(free):
            h = int(sum(s[nb[j]] for j in range(ptr[v], ptr[v + 1])))
            pp = 1.0 / (1.0 + x ** h)
            up = i | (1 << k)
            dn = i & ~(1 << k)
            P[i, up] += pp / len(free)
            P[i, dn] += (1 - pp) / len(free)
    return states, pi, P
