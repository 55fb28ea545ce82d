"""Interface curves as polylines with per-vertex turning angles."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError


def turns_from_points(points, closed: bool = False) -> np.ndarray:
    """Signed turning angle at each vertex (0 at the two ends of an open curve)."""
    z = np.asarray(points, dtype=complex)
    t = np.zeros(len(z))
    if len(z) < 3 and not closed:
        return t
    if closed:
        d = np.roll(z, -1) - z
        t = np.angle(d / np.roll(d, 1))
        return t
    d = np.diff(z)
    t[1:-1] = np.angle(d[1:] / d[:-1])
    return t


@dataclass(frozen=True, eq=False)
class InterfaceCurve:
    """Ordered polyline from a to b.

    ``turns[j]`` is the turn made at ``points[j]``; the end points carry no
    turn. ``extra`` keeps model-specific bookkeeping (hexes on either side,
    medial vertices and directions) used by slits and observables.
    """

    points: np.ndarray
    lattice_step: float
    turns: np.ndarray
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def prefix(self, k: int) -> "InterfaceCurve":
        """The first ``k`` steps (``k + 1`` points); the new tip has no turn."""
        if not (0 <= k <= self.n_steps):
            raise ParameterError(f"prefix length {k} outside [0, {self.n_steps}]")
        turns = np.array(self.turns[:k + 1])
        turns[-1] = 0.0
        ext = {}
        for key, val in self.extra.items():
            if isinstance(val, np.ndarray) and val.shape[:1] == (len(self.points),):
                ext[key] = val[:k + 1]
            else:
                ext[key] = val
        ext["prefix_of"] = self.n_steps
        return InterfaceCurve(self.points[:k + 1], self.lattice_step, turns, ext)

    def reversed(self) -> "InterfaceCurve":
        return InterfaceCurve(self.points[::-1].copy(), self.lattice_step, -self.turns[::-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "y", "turn_radians"])
        for i, (z, t) in enumerate(zip(self.points, self.turns)):
            w.writerow([i, repr(float(z.real)), repr(float(z.imag)), repr(float(t))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, lattice_step: float = 1.0) -> "InterfaceCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        pts = np.array([float(r["x"]) + 1j * float(r["y"]) for r in rows])
        turns = np.array([float(r["turn_radians"]) for r in rows])
        return cls(pts, lattice_step, turns)


def winding(curve: InterfaceCurve, upto: int, start: int | None = None) -> float:
    """Total turn from ``start`` to ``upto``; ``start`` defaults to the b end.

    Each point carries the direction of the edge leaving it towards b, so
    w(b -> z) ends on the half-edge entering z from the b side and the
    turn at z itself is not counted. The value is a difference of a
    potential, hence exactly additive over any index triple.
    """
    n = len(curve.turns)
    if start is None:
        start = n - 1
    for i in (upto, start):
        if not (0 <= i < n):
            raise ParameterError(f"index {i} outside the curve")
    theta = np.cumsum(curve.turns)
    return float(theta[upto] - theta[start])


def total_turn(curve: InterfaceCurve) -> float:
    """Sum of all turns; a closed counterclockwise lattice cycle gives 2*pi."""
    return float(np.sum(curve.turns))
