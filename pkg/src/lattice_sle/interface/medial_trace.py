"""Numba kernels following strands of the FK loop representation."""
import numpy as np
from numba import njit

from ..geometry.medial import DIR_ANGLE, PAIRING

_PAIRING = np.ascontiguousarray(PAIRING)
_ANGLE = np.ascontiguousarray(DIR_ANGLE)


@njit(cache=True)
def _exit_dir(v, din, mtype, partner, primal_edge, state, pairing):
    d = partner[v, din]
    if d >= 0:
        return d
    e = primal_edge[v]
    p = 0 if (mtype[v] == 0) == (state[e] == 1) else 1
    return pairing[p, din]


@njit(cache=True)
def trace_chord_kernel(nbr, eid, mtype, partner, primal_edge, state, source, sink,
                       pairing, verts, dirs, used):
    """Follow the chord from source to sink.

    Fills ``verts`` (visited vertices, source first) and ``dirs`` (exit
    direction at each visited vertex); marks traversed medial edges in
    ``used``. Returns the number of edges traversed, or -1 if the strand
    closes up or runs off the graph.
    """
    v = source
    d = -1
    for k in range(4):
        if nbr[v, k] >= 0:
            d = k
    n = 0
    maxlen = verts.shape[0] - 1
    while True:
        verts[n] = v
        dirs[n] = d
        e = eid[v, d]
        if used[e]:
            return -1
        used[e] = True
        n += 1
        w = nbr[v, d]
        if w < 0 or n >= maxlen:
            return -1
        if w == sink:
            verts[n] = w
            dirs[n] = -1
            return n
        din = (d + 2) % 4
        d = _exit_dir(w, din, mtype, partner, primal_edge, state, pairing)
        if nbr[w, d] < 0:
            return -1
        v = w


@njit(cache=True)
def count_loops_kernel(nbr, eid, mtype, partner, primal_edge, state, edge_ends, used, pairing):
    """Count closed strands among medial edges not already marked used."""
    n_loops = 0
    nE = edge_ends.shape[0]
    for e0 in range(nE):
        if used[e0]:
            continue
        v = edge_ends[e0, 0]
        d = -1
        for k in range(4):
            if eid[v, k] == e0:
                d = k
        while True:
            e = eid[v, d]
            if used[e]:
                break
            used[e] = True
            w = nbr[v, d]
            din = (d + 2) % 4
            d = _exit_dir(w, din, mtype, partner, primal_edge, state, pairing)
            v = w
        n_loops += 1
    return n_loops


@njit(cache=True)
def chord_turns(dirs, n, angle):
    """Turn at each interior chord vertex; turns[j] is the turn at verts[j]."""
    turns = np.zeros(n + 1)
    for j in range(1, n):
        t = angle[dirs[j]] - angle[dirs[j - 1]]
        while t > np.pi:
            t -= 2 * np.pi
        while t < -np.pi:
            t += 2 * np.pi
        turns[j] = t
    return turns


def medial_arrays(domain):
    md = domain.extra["medial"]
    return (md.nbr, md.eid, md.mtype, md.partner, md.primal_edge)
