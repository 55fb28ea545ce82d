"""Site percolation on the triangular lattice with Dobrushin boundary."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, UnsupportedLatticeError
from ..geometry import DiscreteDomain
from ..rng import as_rng

OPEN, CLOSED = 1, -1


@dataclass(frozen=True, eq=False)
class SiteColoring:
    """Per-vertex colours: +1 open/grey/plus, -1 closed/white/minus."""

    domain: DiscreteDomain
    colors: np.ndarray

    def grid(self) -> np.ndarray:
        """Colours as an (nx, ny) array indexed by lattice coordinates."""
        g = np.zeros(tuple(np.asarray(self.domain.grid).max(axis=0) + 1), dtype=np.int8)
        g[self.domain.grid[:, 0], self.domain.grid[:, 1]] = self.colors
        return g

    def check_dobrushin(self) -> bool:
        d = self.domain
        ok_ab = all(self.colors[v] == OPEN for v in d.arc_ab if v != d.b)
        ok_ba = all(self.colors[v] == CLOSED for v in d.arc_ba if v != d.a)
        return ok_ab and ok_ba


def dobrushin_boundary(domain: DiscreteDomain) -> np.ndarray:
    """Boundary colours: arc_ab open, arc_ba closed; a counts as open, b as closed.

    Returns an int8 array with 0 on interior vertices.
    """
    col = np.zeros(domain.n_vertices, dtype=np.int8)
    col[list(domain.arc_ab)] = OPEN
    col[list(domain.arc_ba)] = CLOSED
    col[domain.a] = OPEN
    col[domain.b] = CLOSED
    return col


def interior_mask(domain: DiscreteDomain) -> np.ndarray:
    m = np.ones(domain.n_vertices, dtype=bool)
    m[list(domain.boundary_cycle)] = False
    return m


def sample_percolation(domain: DiscreteDomain, p: float, rng=None) -> SiteColoring:
    if domain.kind != "triangular-site":
        raise UnsupportedLatticeError("site percolation needs a triangular-site domain")
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"p={p} outside [0, 1]")
    rng = as_rng(rng)
    col = dobrushin_boundary(domain)
    inner = interior_mask(domain)
    u = rng.random(domain.n_vertices)
    col[inner] = np.where(u[inner] < p, OPEN, CLOSED)
    return SiteColoring(domain, col)
