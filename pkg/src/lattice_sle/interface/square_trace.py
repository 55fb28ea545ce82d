"""Spin interface on the square lattice, walking on dual edges.

The walker crosses the primal edge (l, r) with the minus spin l on its
left and the plus spin r on its right. Ahead lie l' = l + h and r' = r + h.
Right-hand rule: if r' is minus turn right, else if l' is plus turn left,
else go straight. At a saddle plaquette this always turns right, so the
walker never splits off the chord.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def square_walk_kernel(spin, l0, r0, out_x, out_y, out_turn):
    """``spin`` is an (nx+1, ny+1) grid. Returns the number of points or -1."""
    nx1, ny1 = spin.shape
    lx, ly = l0[0], l0[1]
    rx, ry = r0[0], r0[1]
    # heading: rotate (l - r) clockwise
    hx, hy = ly - ry, -(lx - rx)
    cap = out_x.shape[0]
    out_x[0] = 0.5 * (lx + rx) - 0.5 * hx
    out_y[0] = 0.5 * (ly + ry) - 0.5 * hy
    out_turn[0] = 0.0
    n = 1
    while n < cap:
        out_x[n] = 0.5 * (lx + rx) + 0.5 * hx
        out_y[n] = 0.5 * (ly + ry) + 0.5 * hy
        lpx, lpy = lx + hx, ly + hy
        rpx, rpy = rx + hx, ry + hy
        if not (0 <= lpx < nx1 and 0 <= lpy < ny1 and 0 <= rpx < nx1 and 0 <= rpy < ny1):
            out_turn[n] = 0.0
            return n + 1
        if spin[rpx, rpy] < 0:
            lx, ly = rpx, rpy
            hx, hy = hy, -hx
            out_turn[n] = -np.pi / 2
        elif spin[lpx, lpy] > 0:
            rx, ry = lpx, lpy
            hx, hy = -hy, hx
            out_turn[n] = np.pi / 2
        else:
            lx, ly, rx, ry = lpx, lpy, rpx, rpy
            out_turn[n] = 0.0
        n += 1
    return -1
