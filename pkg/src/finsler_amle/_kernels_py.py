"""Pure-Python kernels (numpy + heapq reference implementations).

Mirrors ``_kernels`` (the compiled extension) function-for-function and
bit-for-bit: the shortest-path relaxations pop ``(distance, node)`` pairs in
the same lexicographic order, sums accumulate in the same order, and the
sweep updates visit centers in the same ascending order, so both backends
produce identical arrays.  See ``benchmarks/bench_kernels.py`` for the speed
gap.
"""

from __future__ import annotations

import heapq

import numpy as np

NAME = "python"


def dijkstra(indptr, indices, costs, source, n):
    """Single-source shortest-path distances on a CSR graph."""
    dist = np.full(n, np.inf)
    settled = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, int(source))]
    while heap:
        d, x = heapq.heappop(heap)
        if settled[x]:
            continue
        settled[x] = True
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            nd = d + costs[k]
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, int(y)))
    return dist


def _truncated(indptr, indices, costs, source, rmax, member, dist, settled, touched):
    """Truncated run on shared scratch arrays; returns settle-ordered members."""
    nodes = []
    dists = []
    dist[source] = 0.0
    touched.append(source)
    heap = [(0.0, int(source))]
    while heap:
        d, x = heapq.heappop(heap)
        if settled[x]:
            continue
        settled[x] = True
        if member[x]:
            nodes.append(x)
            dists.append(d)
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            nd = d + costs[k]
            if nd <= rmax and nd < dist[y]:
                dist[y] = nd
                touched.append(int(y))
                heapq.heappush(heap, (nd, int(y)))
    return nodes, dists


def dijkstra_truncated(indptr, indices, costs, source, n, rmax):
    """Nodes with distance <= rmax from the source, in settle order."""
    dist = np.full(n, np.inf)
    settled = np.zeros(n, dtype=bool)
    member = np.ones(n, dtype=bool)
    nodes, dists = _truncated(
        indptr, indices, costs, int(source), rmax, member, dist, settled, []
    )
    return np.asarray(nodes, dtype=np.int32), np.asarray(dists)


def ball_table(indptr, indices, costs, centers, rmax, member_mask):
    """CSR table of metric-ball members (and distances) per center."""
    n = len(member_mask)
    dist = np.full(n, np.inf)
    settled = np.zeros(n, dtype=bool)
    tab_indptr = np.zeros(len(centers) + 1, dtype=np.int64)
    all_nodes: list[int] = []
    all_dists: list[float] = []
    for c_idx, center in enumerate(centers):
        touched: list[int] = []
        nodes, dists = _truncated(
            indptr, indices, costs, int(center), rmax, member_mask,
            dist, settled, touched,
        )
        all_nodes.extend(nodes)
        all_dists.extend(dists)
        tab_indptr[c_idx + 1] = len(all_nodes)
        for t in touched:
            dist[t] = np.inf
            settled[t] = False
    return tab_indptr, np.asarray(all_nodes, dtype=np.int32), np.asarray(all_dists)


def gs_sweep(u, tab_indptr, tab_indices, centers):
    """One in-place lexicographic Gauss-Seidel ball-midpoint sweep."""
    resid = 0.0
    for c_idx in range(len(centers)):
        lo = np.inf
        hi = -np.inf
        for k in range(tab_indptr[c_idx], tab_indptr[c_idx + 1]):
            val = u[tab_indices[k]]
            if val < lo:
                lo = val
            if val > hi:
                hi = val
        new = 0.5 * (lo + hi)
        delta = abs(new - u[centers[c_idx]])
        if delta > resid:
            resid = delta
        u[centers[c_idx]] = new
    return resid


def jacobi_sweep(u_src, u_dst, tab_indptr, tab_indices, centers):
    """One Jacobi ball-midpoint sweep; ``u_dst`` must be a copy of ``u_src``."""
    vals = u_src[tab_indices]
    starts = tab_indptr[:-1]
    lo = np.minimum.reduceat(vals, starts)
    hi = np.maximum.reduceat(vals, starts)
    new = 0.5 * (lo + hi)
    resid = float(np.abs(new - u_src[centers]).max()) if len(centers) else 0.0
    u_dst[centers] = new
    return resid


def gs_sweep3(u, lo_env, hi_env, tab_indptr, tab_indices, centers):
    """Gauss-Seidel sweep of the iterate plus its two-sided envelope.

    Returns (resid of u, max envelope gap, max of u, min of u) over centers.
    """
    resid = 0.0
    gap = 0.0
    umax = -np.inf
    umin = np.inf
    for c_idx in range(len(centers)):
        alo = ahi = None
        blo = bhi = None
        clo = chi = None
        for k in range(tab_indptr[c_idx], tab_indptr[c_idx + 1]):
            node = tab_indices[k]
            a = u[node]
            b = lo_env[node]
            c = hi_env[node]
            if alo is None:
                alo = ahi = a
                blo = bhi = b
                clo = chi = c
                continue
            if a < alo:
                alo = a
            elif a > ahi:
                ahi = a
            if b < blo:
                blo = b
            elif b > bhi:
                bhi = b
            if c < clo:
                clo = c
            elif c > chi:
                chi = c
        center = centers[c_idx]
        new_u = 0.5 * (alo + ahi)
        new_lo = 0.5 * (blo + bhi)
        new_hi = 0.5 * (clo + chi)
        delta = abs(new_u - u[center])
        if delta > resid:
            resid = delta
        g = new_hi - new_lo
        if g > gap:
            gap = g
        if new_u > umax:
            umax = new_u
        if new_u < umin:
            umin = new_u
        u[center] = new_u
        lo_env[center] = new_lo
        hi_env[center] = new_hi
    return resid, gap, umax, umin


def jacobi_sweep3(u_src, lo_src, hi_src, u_dst, lo_dst, hi_dst,
                  tab_indptr, tab_indices, centers):
    """Jacobi version of ``gs_sweep3``; dst arrays must be copies of src."""
    starts = tab_indptr[:-1]
    new_u = 0.5 * (
        np.minimum.reduceat(u_src[tab_indices], starts)
        + np.maximum.reduceat(u_src[tab_indices], starts)
    )
    new_lo = 0.5 * (
        np.minimum.reduceat(lo_src[tab_indices], starts)
        + np.maximum.reduceat(lo_src[tab_indices], starts)
    )
    new_hi = 0.5 * (
        np.minimum.reduceat(hi_src[tab_indices], starts)
        + np.maximum.reduceat(hi_src[tab_indices], starts)
    )
    resid = float(np.abs(new_u - u_src[centers]).max()) if len(centers) else 0.0
    gap = float((new_hi - new_lo).max()) if len(centers) else 0.0
    u_dst[centers] = new_u
    lo_dst[centers] = new_lo
    hi_dst[centers] = new_hi
    return resid, gap, float(new_u.max()), float(new_u.min())
