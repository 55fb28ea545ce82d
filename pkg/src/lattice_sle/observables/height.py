"""Height function H integrated from |F_E|^2 across medial edges.

H(black) - H(white) = |F_E(e)|^2 for the two faces of every medial edge e
(raw, unnormalized edge values). H is pinned to 0 on an outer white face
beyond arc ba; it then equals 1 on the black faces of arc ab and 0 on all
outer white faces.
"""
from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import NotIntegrableError
from .fermionic import EdgeObservable, vertex_scale

TAU_H = 1e-8


@dataclass(frozen=True, eq=False)
class HeightFunction:
    values: dict                  # doubled face coords -> H
    discrepancy: float            # worst cycle mismatch seen while integrating
    observable: EdgeObservable
    extra: dict = field(default_factory=dict)

    def colour(self, f) -> str:
        return "black" if f[0] % 2 == 0 else "white"

    def to_csv(self) -> str:
        primal = self.observable.domain.extra["primal"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["face_x", "face_y", "color", "H"])
        for f in sorted(self.values):
            z = primal.lattice.embed(complex(f[0], f[1]) / 2.0)
            w.writerow([repr(float(z.real)), repr(float(z.imag)), self.colour(f),
                        repr(float(self.values[f]))])
        return buf.getvalue()


def build_height(obs: EdgeObservable, tol: float = TAU_H) -> HeightFunction:
    """Integrate H by breadth-first search; raises NotIntegrableError past ``tol``."""
    md = obs.medial
    fe2 = np.abs(obs.raw_edge_values) ** 2
    adj = {}
    for k in range(len(md.edge_ends)):
        b, w = tuple(int(x) for x in md.edge_black[k]), tuple(int(x) for x in md.edge_white[k])
        adj.setdefault(b, []).append((w, -fe2[k]))
        adj.setdefault(w, []).append((b, fe2[k]))
    start = tuple(int(x) for x in md.white_faces[-1])
    H = {start: 0.0}
    todo = deque([start])
    disc = 0.0
    while todo:
        f = todo.popleft()
        for g, dv in adj[f]:
            if g in H:
                disc = max(disc, abs(H[g] - (H[f] + dv)))
            else:
                H[g] = H[f] + dv
                todo.append(g)
    if disc > tol:
        raise NotIntegrableError(f"height cycle discrepancy {disc:.3e} exceeds {tol:.1e}",
                                 discrepancy=disc)
    return HeightFunction(H, disc, obs)


def height_checks(hf: HeightFunction, sign_tol: float = 1e-12) -> dict:
    """Boundary values, Laplacian signs and the Laplacian identity.

    On faces whose four same-colour neighbours exist and whose four corner
    medial vertices are free: Delta H = +|F(x) - F(y)|^2 on black faces and
    -|F(x) - F(y)|^2 on white faces, with x, y opposite corners and F the
    vertex values scaled so that their projections equal the edge values.
    Where Delta H is exactly zero rounding leaves about 1e-14 of either
    sign, so a sign counts as violated only beyond ``sign_tol``.
    """
    obs = hf.observable
    med = obs.domain
    md = obs.medial
    primal = med.extra["primal"]
    idx = med.extra["index"]
    H = hf.values
    fv = obs.vertex_values * vertex_scale(obs.q)
    free = obs.free_vertices()
    ab = [(2 * int(primal.grid[v, 0]), 2 * int(primal.grid[v, 1])) for v in primal.arc_ab]
    outer = [tuple(int(x) for x in w) for w in md.white_faces[md.n_inner_white:]]
    sign_bad, ident, n_lap = 0, 0.0, 0
    for f, h in H.items():
        nb = [(f[0] + 2, f[1]), (f[0] - 2, f[1]), (f[0], f[1] + 2), (f[0], f[1] - 2)]
        if not all(n in H for n in nb):
            continue
        corners = [idx.get(c) for c in ((f[0] + 1, f[1]), (f[0], f[1] + 1),
                                        (f[0] - 1, f[1]), (f[0], f[1] - 1))]
        if any(c is None or not free[c] for c in corners):
            continue
        lap = sum(H[n] for n in nb) - 4 * h
        black = f[0] % 2 == 0
        expect = abs(fv[corners[0]] - fv[corners[2]]) ** 2
        expect = expect if black else -expect
        n_lap += 1
        if (black and lap < -sign_tol) or (not black and lap > sign_tol):
            sign_bad += 1
        ident = max(ident, abs(lap - expect))
    gap = float(np.max(np.abs(obs.raw_edge_values) ** 2)) if len(obs.edge_values) else 0.0
    return {
        "cycle_discrepancy": hf.discrepancy,
        "arc_ab_black": [H[f] for f in ab],
        "outer_white": [H[f] for f in outer],
        "laplacian_faces": n_lap,
        "laplacian_sign_violations": sign_bad,
        "laplacian_identity": ident,
        "max_local_gap": gap,
    }
