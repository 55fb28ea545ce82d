"""Lattice domains: square-bond, triangular-site and hexagonal rectangles."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DegenerateDomainError, ParameterError, UnsupportedLatticeError

KINDS = ("triangular-site", "square-bond", "hexagonal", "square-medial")
CORNERS = ("bl", "br", "tr", "tl")
_CORNER_ALIASES = {
    "bl": "bl", "sw": "bl", "lower-left": "bl", "bottom-left": "bl",
    "br": "br", "se": "br", "lower-right": "br", "bottom-right": "br",
    "tr": "tr", "ne": "tr", "upper-right": "tr", "top-right": "tr",
    "tl": "tl", "nw": "tl", "upper-left": "tl", "top-left": "tl",
}
SQRT3 = np.sqrt(3.0)


def corner_id(name: str) -> str:
    try:
        return _CORNER_ALIASES[str(name).strip().lower()]
    except KeyError:
        raise ParameterError(f"unknown corner {name!r}; expected one of {CORNERS}") from None


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    mesh: float = 1.0
    origin: complex = 0j
    orientation: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown lattice kind {self.kind!r}")
        if not (self.mesh > 0 and np.isfinite(self.mesh)):
            raise ParameterError(f"mesh must be positive, got {self.mesh}")

    def embed(self, local):
        """Map local coordinates (in units of mesh) to the plane."""
        rot = np.exp(1j * self.orientation)
        return self.origin + rot * self.mesh * np.asarray(local, dtype=complex)


@dataclass(frozen=True, eq=False)
class DiscreteDomain:
    """Lattice rectangle with two marked boundary vertices and Dobrushin arcs.

    Vertices are integers ``0..n-1`` with complex ``positions``; ``grid``
    holds integer lattice coordinates used by the samplers.
    """

    lattice: LatticeSpec
    positions: np.ndarray
    edges: np.ndarray
    boundary_cycle: tuple
    a: int
    b: int
    arc_ab: tuple
    arc_ba: tuple
    grid: np.ndarray
    shape: tuple
    extra: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.lattice.kind

    @property
    def vertices(self) -> range:
        return range(len(self.positions))

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def index_of(self, key) -> int:
        return self.extra["index"][tuple(key)]

    def check_invariants(self):
        cyc = list(self.boundary_cycle)
        if len(set(cyc)) != len(cyc):
            raise DegenerateDomainError("boundary cycle is not simple")
        if self.a == self.b or self.a not in cyc or self.b not in cyc:
            raise DegenerateDomainError("marked points must be distinct boundary vertices")
        ab, ba = set(self.arc_ab), set(self.arc_ba)
        if ab | ba != set(cyc) or ab & ba != {self.a, self.b}:
            raise DegenerateDomainError("arcs do not partition the boundary")
        return True


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _split_arcs(cycle, a, b):
    n = len(cycle)
    ia, ib = cycle.index(a), cycle.index(b)
    arc_ab = tuple(cycle[(ia + k) % n] for k in range((ib - ia) % n + 1))
    arc_ba = tuple(cycle[(ib + k) % n] for k in range((ia - ib) % n + 1))
    return arc_ab, arc_ba


def _snap(positions, cycle, target):
    d = np.abs(positions[list(cycle)] - target)
    best = np.flatnonzero(d <= d.min() + 1e-9)
    return cycle[int(best[0])]


def _bbox_corner(positions, which):
    xs, ys = positions.real, positions.imag
    x = xs.min() if which in ("bl", "tl") else xs.max()
    y = ys.min() if which in ("bl", "br") else ys.max()
    return complex(x, y)


def _mark(local, cycle, a_corner, b_corner):
    a_corner, b_corner = corner_id(a_corner), corner_id(b_corner)
    if a_corner == b_corner:
        raise ParameterError("a_corner and b_corner must differ")
    a = _snap(local, cycle, _bbox_corner(local, a_corner))
    b = _snap(local, cycle, _bbox_corner(local, b_corner))
    if a == b:
        raise DegenerateDomainError("marked corners snapped to the same vertex")
    return a, b, a_corner, b_corner


def _signed_area(pts):
    x, y = pts.real, pts.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def square_domain(nx: int, ny: int, a_corner="tl", b_corner="br", lattice=None) -> DiscreteDomain:
    """Square-bond rectangle with ``nx`` by ``ny`` plaquettes (no size minimum)."""
    lattice = lattice or LatticeSpec("square-bond")
    if lattice.kind != "square-bond":
        raise UnsupportedLatticeError("square_domain needs a square-bond lattice")
    if nx < 1 or ny < 1:
        raise DegenerateDomainError("need at least one plaquette")
    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
    grid = np.stack([ii.ravel(), jj.ravel()], axis=1)
    index = {(int(i), int(j)): k for k, (i, j) in enumerate(grid)}
    local = grid[:, 0] + 1j * grid[:, 1]
    edges = []
    for i in range(nx + 1):
        for j in range(ny + 1):
            if i < nx:
                edges.append((index[i, j], index[i + 1, j]))
            if j < ny:
                edges.append((index[i, j], index[i, j + 1]))
    cycle = [index[i, 0] for i in range(nx)]
    cycle += [index[nx, j] for j in range(ny)]
    cycle += [index[i, ny] for i in range(nx, 0, -1)]
    cycle += [index[0, j] for j in range(ny, 0, -1)]
    a, b, ac, bc = _mark(local, cycle, a_corner, b_corner)
    arc_ab, arc_ba = _split_arcs(cycle, a, b)
    dom = DiscreteDomain(
        lattice, _freeze(lattice.embed(local)), _freeze(np.array(edges, dtype=np.int64)),
        tuple(cycle), a, b, arc_ab, arc_ba, _freeze(grid), (nx, ny),
        {"index": index, "corners": (ac, bc)},
    )
    dom.check_invariants()
    return dom


def _tri_neighbors(c, r):
    """Offset-row neighbours of site (col, row); odd rows are shifted right."""
    if r % 2 == 0:
        return [(c + 1, r), (c, r + 1), (c - 1, r + 1), (c - 1, r), (c - 1, r - 1), (c, r - 1)]
    return [(c + 1, r), (c + 1, r + 1), (c, r + 1), (c - 1, r), (c, r - 1), (c + 1, r - 1)]


def triangular_domain(nx: int, ny: int, a_corner="tl", b_corner="br", lattice=None) -> DiscreteDomain:
    """Triangular-site rectangle of ``nx`` columns and ``ny`` offset rows."""
    lattice = lattice or LatticeSpec("triangular-site")
    if nx < 3 or ny < 3:
        raise DegenerateDomainError(f"{nx}x{ny} sites leave no interior site")
    cc, rr = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    grid = np.stack([cc.ravel(), rr.ravel()], axis=1)
    index = {(int(c), int(r)): k for k, (c, r) in enumerate(grid)}
    local = grid[:, 0] + 0.5 * (grid[:, 1] % 2) + 1j * grid[:, 1] * SQRT3 / 2
    edges = []
    for (c, r), k in index.items():
        for nb in _tri_neighbors(c, r)[:3]:
            if nb in index:
                edges.append((k, index[nb]))
    cycle = [index[c, 0] for c in range(nx)]
    cycle += [index[nx - 1, r] for r in range(1, ny)]
    cycle += [index[c, ny - 1] for c in range(nx - 2, -1, -1)]
    cycle += [index[0, r] for r in range(ny - 2, 0, -1)]
    a, b, ac, bc = _mark(local, cycle, a_corner, b_corner)
    arc_ab, arc_ba = _split_arcs(cycle, a, b)
    dom = DiscreteDomain(
        lattice, _freeze(lattice.embed(local)), _freeze(np.array(edges, dtype=np.int64)),
        tuple(cycle), a, b, arc_ab, arc_ba, _freeze(grid), (nx, ny),
        {"index": index, "corners": (ac, bc)},
    )
    dom.check_invariants()
    return dom


# hexagon corner k of a pointy-top hexagon, in units (eps/2, eps/(2*sqrt3))
_HEX_DX = (1, 0, -1, -1, 0, 1)
_HEX_DY = (1, 2, 1, -1, -2, -1)


def hexagonal_domain(nx: int, ny: int, a_corner="tl", b_corner="br", lattice=None,
                     allow_small: bool = False) -> DiscreteDomain:
    """Hexagonal lattice (hexagon corners) tiling a triangular-site rectangle.

    The hexagonal faces are the sites of ``extra['sites']``. The marked
    corners sit where the grey and white boundary hexagons meet, so the
    site-ring colouring and the corner arcs agree. ``allow_small`` admits
    strips thinner than 3 sites (used by enumeration tests); there the
    marked points snap to the bounding-box corners instead.
    """
    lattice = lattice or LatticeSpec("hexagonal")
    site_lat = LatticeSpec("triangular-site", lattice.mesh, lattice.origin, lattice.orientation)
    small = nx < 3 or ny < 3
    if small and not allow_small:
        raise DegenerateDomainError(f"{nx}x{ny} sites leave no interior site")
    if nx < 1 or ny < 1:
        raise DegenerateDomainError("need at least one hexagon")
    if small:
        sites = None
        cc, rr = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        site_grid = np.stack([cc.ravel(), rr.ravel()], axis=1)
    else:
        sites = triangular_domain(nx, ny, a_corner, b_corner, site_lat)
        site_grid = sites.grid
    keys = {}
    faces = np.empty((len(site_grid), 6), dtype=np.int64)
    for s, (c, r) in enumerate(site_grid):
        X, Y = 2 * c + (r % 2), 3 * r
        for k in range(6):
            key = (int(X + _HEX_DX[k]), int(Y + _HEX_DY[k]))
            if key not in keys:
                keys[key] = len(keys)
            faces[s, k] = keys[key]
    grid = np.array(list(keys.keys()), dtype=np.int64)
    local = grid[:, 0] / 2.0 + 1j * grid[:, 1] / (2 * SQRT3)
    count = {}
    for f in faces:
        for k in range(6):
            u, v = int(f[k]), int(f[(k + 1) % 6])
            e = (min(u, v), max(u, v))
            count[e] = count.get(e, 0) + 1
    edges = np.array(sorted(count), dtype=np.int64)
    succ = {}
    for f in faces:
        for k in range(6):
            u, v = int(f[k]), int(f[(k + 1) % 6])
            if count[(min(u, v), max(u, v))] == 1:
                succ[u] = v
    start = min(succ, key=lambda v: (local[v].imag, local[v].real))
    cycle = [start]
    while succ[cycle[-1]] != start:
        cycle.append(succ[cycle[-1]])
    if len(cycle) != len(succ):
        raise DegenerateDomainError("hexagonal boundary is not a single cycle")
    if small:
        a, b, ac, bc = _mark(local, cycle, a_corner, b_corner)
        corners = (ac, bc)
    else:
        # marked corner = outer end of the hex edge between ring-pred(site) and site
        ring = list(sites.boundary_cycle)

        def junction(site):
            pred = ring[ring.index(site) - 1]
            shared = set(faces[site]) & set(faces[pred])
            outer = [v for v in shared if v in succ]
            return min(outer, key=lambda v: cycle.index(v))

        a, b = junction(sites.a), junction(sites.b)
        corners = sites.extra["corners"]
    arc_ab, arc_ba = _split_arcs(cycle, a, b)
    dom = DiscreteDomain(
        lattice, _freeze(lattice.embed(local)), _freeze(edges), tuple(cycle), a, b,
        arc_ab, arc_ba, _freeze(grid), (nx, ny),
        {"index": {tuple(k): v for k, v in keys.items()}, "faces": _freeze(faces),
         "sites": sites, "site_grid": _freeze(site_grid), "corners": corners},
    )
    dom.check_invariants()
    return dom


def build_rectangle_domain(lattice: LatticeSpec, width: float, height: float,
                           a_corner="tl", b_corner="br") -> DiscreteDomain:
    """Lattice approximation of the rectangle ``[0,width] x [0,height]``.

    Sizes are measured in absolute units; the lattice mesh sets the
    resolution. Marked points snap to the boundary vertex nearest the
    requested corner (ties go to the smaller boundary-cycle index).
    """
    eps = lattice.mesh
    if width <= 0 or height <= 0:
        raise ParameterError("width and height must be positive")
    if corner_id(a_corner) == corner_id(b_corner):
        raise ParameterError("a_corner and b_corner must differ")
    if width < 4 * eps - 1e-12 or height < 4 * eps - 1e-12:
        raise DegenerateDomainError(
            f"{width}x{height} rectangle is below the 4*mesh minimum (mesh={eps})")
    if lattice.kind == "square-bond":
        return square_domain(int(round(width / eps)), int(round(height / eps)),
                             a_corner, b_corner, lattice)
    if lattice.kind in ("triangular-site", "hexagonal"):
        nx = int(round(width / eps))
        ny = int(round(height / (eps * SQRT3 / 2)))
        make = triangular_domain if lattice.kind == "triangular-site" else hexagonal_domain
        return make(nx, ny, a_corner, b_corner, lattice)
    raise UnsupportedLatticeError("square-medial domains are built with medial_graph()")


def continuum_rectangle(domain: DiscreteDomain):
    """(x0, y0, width, height) of the continuum rectangle, in local coordinates.

    Square-bond: the vertex bounding box. Triangular/hexagonal: each site
    is a cell of width eps and height eps*sqrt(3)/2.
    """
    eps = domain.lattice.mesh
    kind = domain.kind
    if kind == "hexagonal":
        kind = "triangular-site"
    if kind == "square-medial":
        domain = domain.extra["primal"]
        kind = "square-bond"
    nx, ny = domain.shape
    if kind == "square-bond":
        return 0.0, 0.0, nx * eps, ny * eps
    h = eps * SQRT3 / 2
    return -0.25 * eps, -0.5 * h, nx * eps, ny * h


def local_coords(domain: DiscreteDomain, points):
    """Undo the lattice embedding (origin, rotation) for plane points."""
    lat = domain.lattice
    return (np.asarray(points, dtype=complex) - lat.origin) * np.exp(-1j * lat.orientation)
