"""Exploration process on the triangular site lattice (hexagonal faces).

Sites use offset rows (odd rows shifted right by half a step). The walker
sits on the hex edge between a white hex ``l`` on its left and a grey hex
``r`` on its right; the hex ahead decides the turn.
"""
import numpy as np
from numba import njit

# axial unit steps, counterclockwise from east
AXIAL = np.array([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)], dtype=np.int64)
SQ3_2 = np.sqrt(3.0) / 2.0

FIXED, BERNOULLI, HARMONIC = 0, 1, 2
STOP_END, STOP_RIGHT_TARGET, STOP_LEFT_TARGET, STOP_OVERFLOW = 0, 1, 2, 3


@njit(cache=True)
def to_offset(q, r):
    return q + (r - (r & 1)) // 2, r


@njit(cache=True)
def to_axial(c, r):
    return c - (r - (r & 1)) // 2, r


@njit(cache=True)
def _inside(c, r, nx, ny):
    return 0 <= c < nx and 0 <= r < ny


@njit(cache=True)
def _known(c, r, base, lazy, stamp, gen):
    if base[c, r] != 0:
        return base[c, r]
    if stamp[c, r] == gen:
        return lazy[c, r]
    return 0


@njit(cache=True)
def _harmonic_colour(c0, r0, nx, ny, base, lazy, stamp, gen, rng):
    q, r = to_axial(c0, r0)
    while True:
        k = rng.integers(0, 6)
        q += AXIAL[k, 0]
        r += AXIAL[k, 1]
        c, rr = to_offset(q, r)
        if not _inside(c, rr, nx, ny):
            # cannot happen when the ring is coloured; step back
            q -= AXIAL[k, 0]
            r -= AXIAL[k, 1]
            continue
        s = _known(c, rr, base, lazy, stamp, gen)
        if s != 0:
            return s


@njit(cache=True)
def explore_kernel(base, lazy, stamp, gen, target, mode, p, rng, l_off, r_off,
                   out_x, out_y, out_turn, out_l, out_r):
    """Run the exploration from the edge (l, r).

    ``base`` holds fixed colours (+1 grey, -1 white, 0 unknown). Unknown
    sites are drawn lazily (``mode`` BERNOULLI with probability ``p`` of
    grey, or HARMONIC by a random walk to the coloured set) and written to
    ``lazy`` with ``stamp == gen``. Returns (n_points, stop_code).
    """
    nx, ny = base.shape
    lq, lr = to_axial(l_off[0], l_off[1])
    rq, rr = to_axial(r_off[0], r_off[1])
    dq, dr = rq - lq, rr - lr
    k = -1
    for j in range(6):
        if AXIAL[j, 0] == dq and AXIAL[j, 1] == dr:
            k = j
    if k < 0:
        return 0, STOP_OVERFLOW
    cap = out_x.shape[0]
    # starting vertex: corner shared with the hex behind
    bq, br = lq + AXIAL[(k + 5) % 6, 0], lr + AXIAL[(k + 5) % 6, 1]
    out_x[0] = (lq + rq + bq + 0.5 * (lr + rr + br)) / 3.0
    out_y[0] = SQ3_2 * (lr + rr + br) / 3.0
    out_turn[0] = 0.0
    c, rw = to_offset(lq, lr)
    out_l[0, 0], out_l[0, 1] = c, rw
    c, rw = to_offset(rq, rr)
    out_r[0, 0], out_r[0, 1] = c, rw
    n = 1
    while True:
        if n >= cap:
            return n, STOP_OVERFLOW
        k1 = (k + 1) % 6
        hq, hr = lq + AXIAL[k1, 0], lr + AXIAL[k1, 1]
        out_x[n] = (lq + rq + hq + 0.5 * (lr + rr + hr)) / 3.0
        out_y[n] = SQ3_2 * (lr + rr + hr) / 3.0
        hc, hrow = to_offset(hq, hr)
        if not _inside(hc, hrow, nx, ny):
            out_turn[n] = 0.0
            c, rw = to_offset(lq, lr)
            out_l[n, 0], out_l[n, 1] = c, rw
            c, rw = to_offset(rq, rr)
            out_r[n, 0], out_r[n, 1] = c, rw
            return n + 1, STOP_END
        s = _known(hc, hrow, base, lazy, stamp, gen)
        if s == 0:
            if mode == BERNOULLI:
                s = 1 if rng.random() < p else -1
            elif mode == HARMONIC:
                s = _harmonic_colour(hc, hrow, nx, ny, base, lazy, stamp, gen, rng)
            else:
                return n, STOP_OVERFLOW
            lazy[hc, hrow] = s
            stamp[hc, hrow] = gen
        if s > 0:
            rq, rr = hq, hr
            k = k1
            out_turn[n] = np.pi / 3
        else:
            lq, lr = hq, hr
            k = (k + 5) % 6
            out_turn[n] = -np.pi / 3
        c, rw = to_offset(lq, lr)
        out_l[n, 0], out_l[n, 1] = c, rw
        if target[c, rw] == 2:
            return n + 1, STOP_LEFT_TARGET
        c, rw = to_offset(rq, rr)
        out_r[n, 0], out_r[n, 1] = c, rw
        n += 1
        if target[c, rw] == 1:
            return n, STOP_RIGHT_TARGET


@njit(cache=True)
def crossing_batch(base, target, l_off, r_off, p, rng, n_samples, cap):
    """Count explorations that reach the grey target side first."""
    nx, ny = base.shape
    lazy = np.zeros((nx, ny), dtype=np.int8)
    stamp = np.zeros((nx, ny), dtype=np.int64)
    ox = np.empty(cap)
    oy = np.empty(cap)
    ot = np.empty(cap)
    ol = np.empty((cap, 2), dtype=np.int64)
    orr = np.empty((cap, 2), dtype=np.int64)
    hits = 0
    for s in range(n_samples):
        n, code = explore_kernel(base, lazy, stamp, s + 1, target, BERNOULLI, p, rng,
                                 l_off, r_off, ox, oy, ot, ol, orr)
        if code == STOP_RIGHT_TARGET:
            hits += 1
    return hits
