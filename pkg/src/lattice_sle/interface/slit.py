"""Slit domains: the domain with an interface prefix removed.

Percolation/Harmonic Explorer: the hexes on the prefix's right join the
grey arc, those on its left join the white arc, and the exploration
restarts from the prefix's last edge. FK: the prefix fixes the pairing (so
the bond state) at each medial vertex it passed through.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidSlitError
from ..geometry import DiscreteDomain
from ..geometry.medial import FREE, OPEN, CLOSED, PAIRING
from .curves import InterfaceCurve


@dataclass(frozen=True, eq=False)
class SlitDomain:
    base: DiscreteDomain
    consumed_prefix: InterfaceCurve
    new_a: complex
    grey: tuple = ()          # extra sites (offset coordinates) joining arc_ab
    white: tuple = ()         # extra sites joining arc_ba
    start: tuple | None = None  # (l, r) exploration edge
    fixed: dict = field(default_factory=dict)  # FK: primal edge -> state
    n_steps: int = 0

    def colour_grid(self, base_grid: np.ndarray) -> np.ndarray:
        g = np.array(base_grid, dtype=np.int8)
        for c, r in self.grey:
            g[c, r] = 1
        for c, r in self.white:
            g[c, r] = -1
        return g


def _hex_slit(domain, prefix: InterfaceCurve) -> SlitDomain:
    from .tracing import base_grid
    l_sites, r_sites = prefix.extra["l_sites"], prefix.extra["r_sites"]
    k = prefix.n_steps
    if prefix.extra.get("prefix_of", k) == k and k > 0:
        raise InvalidSlitError("prefix is the whole interface; nothing is left to explore")
    base = base_grid(domain)
    grey = {tuple(int(x) for x in s) for s in r_sites}
    white = {tuple(int(x) for x in s) for s in l_sites}
    if grey & white:
        raise InvalidSlitError("prefix colours a hex both grey and white")
    for c, r in grey:
        if base[c, r] < 0:
            raise InvalidSlitError(f"prefix marks white boundary hex ({c}, {r}) grey")
    for c, r in white:
        if base[c, r] > 0:
            raise InvalidSlitError(f"prefix marks grey boundary hex ({c}, {r}) white")
    start = (np.array(l_sites[k]), np.array(r_sites[k]))
    return SlitDomain(domain, prefix, complex(prefix.points[-1]), tuple(sorted(grey)),
                      tuple(sorted(white)), start, {}, k)


def decided_states(med: DiscreteDomain, verts, dirs, k: int) -> dict:
    """Bond states fixed by the first ``k`` medial steps."""
    md = med.extra["medial"]
    fixed = {}
    for j in range(1, k):
        v = int(verts[j])
        if v >= med.n_vertices or md.forced[v] != FREE:
            continue
        din = (int(dirs[j - 1]) + 2) % 4
        pr = 0 if PAIRING[0, din] == dirs[j] else 1
        # pairing 0 <=> horizontal open or vertical closed
        if md.mtype[v] == 0:
            fixed[int(md.primal_edge[v])] = OPEN if pr == 0 else CLOSED
        else:
            fixed[int(md.primal_edge[v])] = CLOSED if pr == 0 else OPEN
    return fixed


def _fk_slit(prefix: InterfaceCurve) -> SlitDomain:
    med = prefix.extra["medial_domain"]
    md = med.extra["medial"]
    verts, dirs = prefix.extra["verts"], prefix.extra["dirs"]
    k = prefix.n_steps
    if k > 0 and int(verts[k]) == md.sink:
        raise InvalidSlitError("prefix reaches the sink; nothing is left")
    return SlitDomain(med, prefix, complex(prefix.points[-1]),
                      fixed=decided_states(med, verts, dirs, k), n_steps=k)


def slit(domain: DiscreteDomain, prefix: InterfaceCurve) -> SlitDomain:
    """Remove an interface prefix; the empty prefix gives the domain itself."""
    model = prefix.extra.get("model")
    if model == "hex":
        return _hex_slit(domain, prefix)
    if model == "fk":
        return _fk_slit(prefix)
    raise InvalidSlitError(f"slits are supported for hex and FK interfaces, not {model!r}")
