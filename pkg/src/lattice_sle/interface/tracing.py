"""Interface extraction for every model, plus loop counting."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidConfigurationError, UnsupportedLatticeError
from ..geometry import DiscreteDomain
from ..geometry.medial import DIR_ANGLE, PAIRING, medial_positions
from ..models.fk import BondConfig, count_clusters, fk_tables
from ..models.onloop import LoopConfig
from ..models.percolation import SiteColoring
from . import hex_trace as ht
from .curves import InterfaceCurve, turns_from_points
from .medial_trace import chord_turns, count_loops_kernel, trace_chord_kernel
from .square_trace import square_walk_kernel


def _site_domain(domain: DiscreteDomain) -> DiscreteDomain:
    if domain.kind == "hexagonal":
        sites = domain.extra["sites"]
        if sites is None:
            raise UnsupportedLatticeError("hexagonal strip too thin for an exploration")
        return sites
    if domain.kind != "triangular-site":
        raise UnsupportedLatticeError(f"exploration needs triangular sites, got {domain.kind}")
    return domain


def exploration_start(domain: DiscreteDomain):
    """(l, r) offset coordinates of the first explored edge: ring-pred(a), a."""
    sites = _site_domain(domain)
    ring = list(sites.boundary_cycle)
    a = sites.a
    pred = ring[ring.index(a) - 1]
    return (np.array(sites.grid[pred], dtype=np.int64), np.array(sites.grid[a], dtype=np.int64))


def base_grid(domain: DiscreteDomain) -> np.ndarray:
    """Dobrushin ring colours on the site grid, 0 inside."""
    from ..models.percolation import dobrushin_boundary
    sites = _site_domain(domain)
    g = np.zeros(sites.shape, dtype=np.int8)
    col = dobrushin_boundary(sites)
    g[sites.grid[:, 0], sites.grid[:, 1]] = col
    return g


def run_exploration(domain: DiscreteDomain, base, mode=ht.FIXED, p=0.5, rng=None, start=None,
                    target=None, cap=None):
    """Run the hex exploration and wrap it as an InterfaceCurve.

    Returns (curve, stop_code, lazily drawn colours grid).
    """
    from ..rng import as_rng
    sites = _site_domain(domain)
    nx, ny = sites.shape
    rng = as_rng(rng)
    l0, r0 = exploration_start(domain) if start is None else start
    base = np.ascontiguousarray(base, dtype=np.int8)
    lazy = np.zeros((nx, ny), dtype=np.int8)
    stamp = np.zeros((nx, ny), dtype=np.int64)
    if target is None:
        target = np.zeros((nx, ny), dtype=np.int8)
    cap = cap or 3 * nx * ny + 8
    ox, oy, ot = np.empty(cap), np.empty(cap), np.empty(cap)
    ol = np.empty((cap, 2), dtype=np.int64)
    orr = np.empty((cap, 2), dtype=np.int64)
    n, code = ht.explore_kernel(base, lazy, stamp, 1, target, mode, float(p), rng,
                                np.asarray(l0, dtype=np.int64), np.asarray(r0, dtype=np.int64),
                                ox, oy, ot, ol, orr)
    if code == ht.STOP_OVERFLOW:
        raise InvalidConfigurationError("exploration did not terminate on the boundary")
    pts = sites.lattice.embed(ox[:n] + 1j * oy[:n])
    drawn = np.where(stamp == 1, lazy, 0).astype(np.int8)
    curve = InterfaceCurve(pts, sites.lattice.mesh, ot[:n].copy(),
                           {"l_sites": ol[:n].copy(), "r_sites": orr[:n].copy(), "model": "hex"})
    return curve, code, drawn


def explore_percolation(domain: DiscreteDomain, p: float = 0.5, rng=None) -> InterfaceCurve:
    """Percolation interface drawn lazily: only the hexes it touches are sampled."""
    curve, _, _ = run_exploration(domain, base_grid(domain), ht.BERNOULLI, p, rng)
    return curve


def _trace_sites(config: SiteColoring, domain: DiscreteDomain) -> InterfaceCurve:
    if not config.check_dobrushin():
        raise InvalidConfigurationError("site colouring violates the Dobrushin boundary")
    if domain.kind == "square-bond":
        spin = config.grid()
        ring = list(domain.boundary_cycle)
        a = domain.a
        pred = ring[ring.index(a) - 1]
        cap = 4 * domain.n_edges + 8
        ox, oy, ot = np.empty(cap), np.empty(cap), np.empty(cap)
        n = square_walk_kernel(spin, np.array(domain.grid[pred]), np.array(domain.grid[a]),
                               ox, oy, ot)
        if n < 0:
            raise InvalidConfigurationError("spin interface did not reach the boundary")
        pts = domain.lattice.embed(ox[:n] + 1j * oy[:n])
        return InterfaceCurve(pts, domain.lattice.mesh, ot[:n].copy(), {"model": "square-spin"})
    curve, _, _ = run_exploration(domain, config.grid(), ht.FIXED)
    return curve


def _fk_chord(config: BondConfig):
    domain = config.domain
    t = fk_tables(domain)
    med = t["medial"]
    md = med.extra["medial"]
    M = len(md.coords)
    verts = np.zeros(4 * M + 2, dtype=np.int64)
    dirs = np.zeros(4 * M + 2, dtype=np.int64)
    used = np.zeros(len(md.edge_ends), dtype=np.bool_)
    state = np.asarray(config.states, dtype=np.int64)
    n = trace_chord_kernel(md.nbr, md.eid, md.mtype, md.partner, md.primal_edge, state,
                           md.source, md.sink, PAIRING, verts, dirs, used)
    if n <= 0:
        raise InvalidConfigurationError("medial chord does not reach the sink")
    return med, md, verts[:n + 1].copy(), dirs[:n + 1].copy(), used, state


def _trace_bonds(config: BondConfig) -> InterfaceCurve:
    if not config.check_dobrushin():
        raise InvalidConfigurationError("bond configuration violates the Dobrushin boundary")
    med, md, verts, dirs, used, _ = _fk_chord(config)
    n = len(verts) - 1
    turns = chord_turns(dirs, n, DIR_ANGLE)
    pts = medial_positions(med, md.coords[verts])
    edges = np.array([md.eid[verts[j], dirs[j]] for j in range(n)] + [-1], dtype=np.int64)
    return InterfaceCurve(pts, med.lattice.mesh, turns,
                          {"verts": verts, "dirs": dirs, "medial_edges": edges, "model": "fk",
                           "medial_domain": med})


def _trace_loops(config: LoopConfig) -> InterfaceCurve:
    d = config.domain
    pts = d.positions[list(config.chord)]
    if config.chord[-1] != d.b:
        raise InvalidConfigurationError("loop configuration chord does not end at b")
    return InterfaceCurve(pts, d.lattice.mesh, turns_from_points(pts),
                          {"verts": np.array(config.chord), "model": "loop"})


def trace_interface(config, domain: DiscreteDomain | None = None) -> InterfaceCurve:
    """The chordal interface from a to b of a Dobrushin configuration."""
    if isinstance(config, SiteColoring):
        return _trace_sites(config, domain or config.domain)
    if isinstance(config, BondConfig):
        return _trace_bonds(config)
    if isinstance(config, LoopConfig):
        return _trace_loops(config)
    raise InvalidConfigurationError(f"cannot trace {type(config).__name__}")


def count_loops(config) -> int:
    """Closed loops, the a -> b chord excluded."""
    if isinstance(config, LoopConfig):
        return config.n_loops
    if not isinstance(config, BondConfig):
        raise InvalidConfigurationError(f"cannot count loops of {type(config).__name__}")
    _, md, _, _, used, state = _fk_chord(config)
    return int(count_loops_kernel(md.nbr, md.eid, md.mtype, md.partner, md.primal_edge, state,
                                  md.edge_ends, used, PAIRING))


def count_dual_clusters(config: BondConfig) -> int:
    """Dual clusters with all outer (dual-wired) faces counted once."""
    md = fk_tables(config.domain)["medial"].extra["medial"]
    whites = [tuple(w) for w in md.white_faces]
    idx = {w: k for k, w in enumerate(whites)}
    parent = list(range(len(whites)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    outer = list(range(md.n_inner_white, len(whites)))
    for k in outer:
        parent[find(k)] = find(outer[0])
    grid = config.domain.grid
    for e, (u, v) in enumerate(config.domain.edges):
        if config.states[e]:
            continue
        mx = int(grid[u, 0] + grid[v, 0])
        my = int(grid[u, 1] + grid[v, 1])
        # the two white faces on either side of the primal edge
        if mx % 2 == 1:
            sides = ((mx, my + 1), (mx, my - 1))
        else:
            sides = ((mx + 1, my), (mx - 1, my))
        ids = [idx[s] for s in sides if s in idx]
        if len(ids) == 2:
            parent[find(ids[0])] = find(ids[1])
    return len({find(k) for k in range(len(whites))})


def euler_loop_count(config: BondConfig) -> int:
    """Loop count from cluster and dual-cluster numbers (planar duality).

    Every loop separates one primal cluster from one dual cluster; with
    the wired arc and the dual-wired arc each counted as a single cluster
    the chord separates those two, which leaves
    #clusters + #dual clusters - 2 closed loops.
    """
    return count_clusters(config.domain, config.states) + count_dual_clusters(config) - 2


def loop_representation(config: BondConfig) -> LoopConfig:
    """Medial loops and chord of a bond configuration, as vertex sequences."""
    med, md, verts, dirs, used, state = _fk_chord(config)
    from .medial_trace import _exit_dir
    loops = []
    seen = used.copy()
    for e0 in range(len(md.edge_ends)):
        if seen[e0]:
            continue
        v = int(md.edge_ends[e0, 0])
        d = int(np.flatnonzero(md.eid[v] == e0)[0])
        cyc = []
        while not seen[md.eid[v, d]]:
            seen[md.eid[v, d]] = True
            cyc.append(v)
            w = int(md.nbr[v, d])
            d = int(_exit_dir(w, (d + 2) % 4, md.mtype, md.partner, md.primal_edge, state,
                              PAIRING))
            v = w
        loops.append(tuple(cyc))
    occ = np.zeros(len(md.edge_ends), dtype=np.uint8)
    return LoopConfig(med, occ + 1, tuple(int(v) for v in verts), tuple(loops))
