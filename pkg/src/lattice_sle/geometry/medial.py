"""Medial lattice of a square-bond Dobrushin domain (FK loop representation).

Coordinates are doubled: primal vertex (i, j) sits at (2i, 2j), faces of the
primal lattice at odd/odd points and medial vertices (edge midpoints) at
odd/even or even/odd points. Medial faces centred on primal vertices are
black, those centred on dual vertices are white.

Boundary conventions: edges of arc_ab are wired (forced open), edges of
arc_ba are dual-wired (forced closed). Outer white faces are added across
arc_ba so the dual-wired side carries medial edges; two dangling half-edges
remain, the source next to a and the sink next to b.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateDomainError, UnsupportedLatticeError
from .lattices import DiscreteDomain, LatticeSpec, _freeze, _split_arcs

# medial directions, counterclockwise from north-east
DIRS = np.array([(1, 1), (-1, 1), (-1, -1), (1, -1)], dtype=np.int64)
DIR_ANGLE = np.pi / 4 + np.pi / 2 * np.arange(4)
# partner direction inside a vertex; index [pairing][incoming dir]
# pairing 0 keeps strands on the north/south sides, pairing 1 on east/west
PAIRING = np.array([[1, 0, 3, 2], [3, 2, 1, 0]], dtype=np.int64)

FREE, CLOSED, OPEN = -1, 0, 1


def pairing_of(mtype: int, state: int) -> int:
    """Open horizontal edge and closed vertical edge both use pairing 0."""
    return 0 if (mtype == 0) == (state == OPEN) else 1


@dataclass(frozen=True, eq=False)
class MedialData:
    coords: np.ndarray      # (M, 2) doubled coordinates, phantoms included
    nbr: np.ndarray         # (M, 4) neighbour per direction or -1
    eid: np.ndarray         # (M, 4) medial edge id per direction or -1
    mtype: np.ndarray       # 0 on horizontal primal edges, 1 on vertical
    forced: np.ndarray      # FREE / CLOSED / OPEN
    partner: np.ndarray     # (M, 4) exit direction at forced vertices, else -1
    primal_edge: np.ndarray  # primal edge index or -1 for phantom vertices
    source: int
    sink: int
    edge_ends: np.ndarray   # (Em, 2) tail, head with black face on the right
    edge_black: np.ndarray  # (Em, 2) doubled coordinates of the black face
    edge_white: np.ndarray  # (Em, 2) doubled coordinates of the white face
    random_edges: np.ndarray  # primal edge ids that are not forced
    white_faces: np.ndarray   # (F, 2) doubled coordinates, interior first
    n_inner_white: int


def medial_graph(domain: DiscreteDomain) -> DiscreteDomain:
    """Medial domain of a square-bond Dobrushin domain.

    The returned domain has one vertex per primal edge (same order as
    ``domain.edges``); the source and sink half-edges live in
    ``extra['medial']``.
    """
    if domain.kind != "square-bond":
        raise UnsupportedLatticeError(f"medial_graph needs a square-bond domain, got {domain.kind}")
    nx, ny = domain.shape
    grid = domain.grid
    dbl = {v: (2 * int(grid[v, 0]), 2 * int(grid[v, 1])) for v in domain.vertices}
    blacks = set(dbl.values())

    def bnd_edges(arc):
        return [(arc[k], arc[k + 1]) for k in range(len(arc) - 1)]

    mid_of_edge = {}
    for e, (u, v) in enumerate(domain.edges):
        pu, pv = dbl[int(u)], dbl[int(v)]
        mid_of_edge[((pu[0] + pv[0]) // 2, (pu[1] + pv[1]) // 2)] = e
    forced_edge = {}
    for u, v in bnd_edges(domain.arc_ab):
        forced_edge[mid_point(dbl[u], dbl[v])] = OPEN
    for u, v in bnd_edges(domain.arc_ba):
        forced_edge[mid_point(dbl[u], dbl[v])] = CLOSED

    def outside(p):
        return not (0 <= p[0] <= 2 * nx and 0 <= p[1] <= 2 * ny)

    inner = [(2 * i + 1, 2 * j + 1) for j in range(ny) for i in range(nx)]
    outer = []
    for v in domain.arc_ba[1:-1]:
        x, y = dbl[v]
        for s, t in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            w = (x + s, y + t)
            if outside(w) and w not in outer:
                outer.append(w)
    for u, v in bnd_edges(domain.arc_ba):
        m = mid_point(dbl[u], dbl[v])
        for w in ((m[0] + 1, m[1]), (m[0] - 1, m[1])) if m[0] % 2 == 0 else ((m[0], m[1] + 1), (m[0], m[1] - 1)):
            if w[0] % 2 == 1 and w[1] % 2 == 1 and outside(w) and w not in outer:
                outer.append(w)
    whites = inner + outer
    white_set = set(whites)

    # medial edges: one per (black, white) diagonal pair
    medges = []
    for (bx, by) in sorted(blacks):
        for s, t in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            if (bx + s, by + t) not in white_set:
                continue
            m1, m2 = (bx + s, by), (bx, by + t)
            tail, head = (m1, m2) if s * t < 0 else (m2, m1)
            medges.append((tail, head, (bx, by), (bx + s, by + t)))

    # vertices: edge midpoints first (primal edge order), then phantoms
    keys = [None] * domain.n_edges
    for m, e in mid_of_edge.items():
        keys[e] = m
    index = {m: k for k, m in enumerate(keys)}
    for tail, head, _, _ in medges:
        for m in (tail, head):
            if m not in index:
                index[m] = len(keys)
                keys.append(m)
    M = len(keys)
    coords = np.array(keys, dtype=np.int64)
    nbr = -np.ones((M, 4), dtype=np.int64)
    eid = -np.ones((M, 4), dtype=np.int64)
    dir_of = {tuple(d): k for k, d in enumerate(DIRS)}
    ends = np.empty((len(medges), 2), dtype=np.int64)
    eblack = np.empty((len(medges), 2), dtype=np.int64)
    ewhite = np.empty((len(medges), 2), dtype=np.int64)
    for k, (tail, head, bl, wh) in enumerate(medges):
        it, ih = index[tail], index[head]
        d = dir_of[(head[0] - tail[0], head[1] - tail[1])]
        nbr[it, d], eid[it, d] = ih, k
        nbr[ih, (d + 2) % 4], eid[ih, (d + 2) % 4] = it, k
        ends[k] = (it, ih)
        eblack[k], ewhite[k] = bl, wh
    mtype = (coords[:, 0] % 2 == 0).astype(np.int64)
    n_mid = domain.n_edges
    primal_edge = np.full(M, -1, dtype=np.int64)
    primal_edge[:n_mid] = np.arange(n_mid)
    forced = np.full(M, CLOSED, dtype=np.int64)
    for k in range(n_mid):
        forced[k] = forced_edge.get(keys[k], FREE)
    deg = (nbr >= 0).sum(axis=1)
    if np.any(deg[:n_mid] == 0):
        raise DegenerateDomainError("isolated medial vertex")
    ends1 = [k for k in range(n_mid, M) if deg[k] == 1]
    if len(ends1) != 2 or np.any(deg == 3):
        raise DegenerateDomainError("medial graph does not have exactly one source and one sink")
    pa, pb = complex(*dbl[domain.a]), complex(*dbl[domain.b])
    c1, c2 = (complex(*keys[k]) for k in ends1)
    if abs(c1 - pa) + abs(c2 - pb) <= abs(c1 - pb) + abs(c2 - pa):
        source, sink = ends1
    else:
        sink, source = ends1
    # static exits at forced vertices (-1 where the state decides)
    partner = -np.ones((M, 4), dtype=np.int64)
    for k in range(M):
        if forced[k] == FREE:
            continue
        have = np.flatnonzero(nbr[k] >= 0)
        if len(have) == 1:
            continue
        pr = PAIRING[pairing_of(mtype[k], forced[k])]
        if len(have) == 2 and pr[have[0]] != have[1]:
            if k < n_mid:
                raise DegenerateDomainError(f"forced medial vertex {keys[k]} is inconsistent")
            pr = np.array([-1, -1, -1, -1])
            pr[have[0]], pr[have[1]] = have[1], have[0]
        for d in have:
            partner[k, d] = pr[d]
    random_edges = np.array([e for e in range(n_mid) if forced[e] == FREE], dtype=np.int64)

    mdata = MedialData(
        _freeze(coords), _freeze(nbr), _freeze(eid), _freeze(mtype), _freeze(forced), _freeze(partner),
        _freeze(primal_edge), int(source), int(sink), _freeze(ends), _freeze(eblack),
        _freeze(ewhite), _freeze(random_edges),
        _freeze(np.array(whites, dtype=np.int64).reshape(-1, 2)), len(inner),
    )
    # medial domain view: vertices are edge midpoints only
    sub = np.array([k for k in range(len(medges)) if ends[k, 0] < n_mid and ends[k, 1] < n_mid])
    edges = ends[sub] if len(sub) else np.empty((0, 2), dtype=np.int64)
    primal_cycle = list(domain.boundary_cycle)
    cycle = []
    for k in range(len(primal_cycle)):
        u, v = primal_cycle[k], primal_cycle[(k + 1) % len(primal_cycle)]
        cycle.append(mid_of_edge[mid_point(dbl[u], dbl[v])])
    ma = _attached(nbr, source)
    mb = _attached(nbr, sink)
    if ma == mb:
        raise DegenerateDomainError("source and sink attach to the same medial vertex")
    arc_ab, arc_ba = _split_arcs(cycle, ma, mb)
    lat = domain.lattice
    spec = LatticeSpec("square-medial", lat.mesh / np.sqrt(2), lat.origin, lat.orientation)
    positions = domain.lattice.embed((coords[:n_mid, 0] + 1j * coords[:n_mid, 1]) / 2.0)
    med = DiscreteDomain(
        spec, _freeze(positions), _freeze(np.asarray(edges, dtype=np.int64)), tuple(cycle),
        ma, mb, arc_ab, arc_ba, _freeze(coords[:n_mid]), domain.shape,
        {"primal": domain, "medial": mdata, "index": {tuple(c): k for k, c in enumerate(keys)},
         "corners": domain.extra.get("corners")},
    )
    med.check_invariants()
    return med


def mid_point(p, q):
    return ((p[0] + q[0]) // 2, (p[1] + q[1]) // 2)


def _attached(nbr, k):
    return int(nbr[k][nbr[k] >= 0][0])


def medial_positions(domain: DiscreteDomain, dcoords) -> np.ndarray:
    """Plane positions of doubled coordinates of a medial domain."""
    primal = domain.extra["primal"]
    d = np.asarray(dcoords)
    return primal.lattice.embed((d[..., 0] + 1j * d[..., 1]) / 2.0)


def medial_faces(domain: DiscreteDomain):
    """Faces whose four corner vertices all exist.

    Returns (centres (F,2) doubled coords, colour array 1=black 0=white,
    corners (F,4) vertex ids counterclockwise starting east).
    """
    md = domain.extra["medial"]
    index = domain.extra["index"]
    primal = domain.extra["primal"]
    centres, colours, corners = [], [], []
    cand = [(2 * int(i), 2 * int(j), 1) for i, j in primal.grid]
    cand += [(int(x), int(y), 0) for x, y in md.white_faces]
    for x, y, col in cand:
        ring = [(x + 1, y), (x, y + 1), (x - 1, y), (x, y - 1)]
        if all(r in index for r in ring):
            ids = [index[r] for r in ring]
            # the four corners must be joined around the face
            ok = all(ids[(k + 1) % 4] in md.nbr[ids[k]] for k in range(4))
            if ok:
                centres.append((x, y))
                colours.append(col)
                corners.append(ids)
    return (np.array(centres, dtype=np.int64).reshape(-1, 2), np.array(colours, dtype=np.int64),
            np.array(corners, dtype=np.int64).reshape(-1, 4))
