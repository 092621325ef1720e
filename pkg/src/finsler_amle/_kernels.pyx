# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: shortest paths, ball tables, ball-midpoint sweeps.

Mirrors ``_kernels_py`` exactly: the heap pops (distance, node) pairs in the
same lexicographic order and sums accumulate in the same order, so results
are bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8


cdef inline void _heap_push(double* hd, i32* hn, Py_ssize_t* size,
                            double d, i32 node) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t p
    cdef double td
    cdef i32 tn
    hd[i] = d
    hn[i] = node
    size[0] += 1
    while i > 0:
        p = (i - 1) >> 1
        if hd[p] > hd[i] or (hd[p] == hd[i] and hn[p] > hn[i]):
            td = hd[p]; hd[p] = hd[i]; hd[i] = td
            tn = hn[p]; hn[p] = hn[i]; hn[i] = tn
            i = p
        else:
            break


cdef inline void _heap_pop(double* hd, i32* hn, Py_ssize_t* size,
                           double* out_d, i32* out_n) noexcept nogil:
    out_d[0] = hd[0]
    out_n[0] = hn[0]
    size[0] -= 1
    cdef Py_ssize_t last = size[0]
    cdef Py_ssize_t i = 0, l, r, m
    cdef double td
    cdef i32 tn
    hd[0] = hd[last]
    hn[0] = hn[last]
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < last and (hd[l] < hd[m] or (hd[l] == hd[m] and hn[l] < hn[m])):
            m = l
        if r < last and (hd[r] < hd[m] or (hd[r] == hd[m] and hn[r] < hn[m])):
            m = r
        if m == i:
            break
        td = hd[m]; hd[m] = hd[i]; hd[i] = td
        tn = hn[m]; hn[m] = hn[i]; hn[i] = tn
        i = m


def dijkstra(const i64[:] indptr, const i32[:] indices, const double[:] costs, source, n):
    """Single-source shortest-path distances on a CSR graph."""
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t m = indices.shape[0]
    dist_arr = np.full(nn, np.inf)
    settled_arr = np.zeros(nn, dtype=np.uint8)
    heap_d_arr = np.empty(m + 2)
    heap_n_arr = np.empty(m + 2, dtype=np.int32)
    cdef double[:] dist = dist_arr
    cdef u8[:] settled = settled_arr
    cdef double[:] heap_d = heap_d_arr
    cdef i32[:] heap_n = heap_n_arr
    cdef Py_ssize_t heap_size = 0
    cdef i32 src = source
    cdef double d, nd
    cdef i32 x, y
    cdef i64 k
    with nogil:
        dist[src] = 0.0
        _heap_push(&heap_d[0], &heap_n[0], &heap_size, 0.0, src)
        while heap_size > 0:
            _heap_pop(&heap_d[0], &heap_n[0], &heap_size, &d, &x)
            if settled[x]:
                continue
            settled[x] = 1
            for k in range(indptr[x], indptr[x + 1]):
                y = indices[k]
                nd = d + costs[k]
                if nd < dist[y]:
                    dist[y] = nd
                    _heap_push(&heap_d[0], &heap_n[0], &heap_size, nd, y)
    return dist_arr


cdef Py_ssize_t _truncated_c(const i64[:] indptr, const i32[:] indices, const double[:] costs,
                             i32 source, double rmax, const u8[:] member,
                             double[:] dist, u8[:] settled,
                             i32[:] touched, Py_ssize_t* n_touched,
                             i32[:] out_nodes, double[:] out_dists,
                             double[:] heap_d, i32[:] heap_n) noexcept nogil:
    cdef Py_ssize_t heap_size = 0
    cdef Py_ssize_t count = 0
    cdef double d, nd
    cdef i32 x, y
    cdef i64 k
    dist[source] = 0.0
    touched[0] = source
    n_touched[0] = 1
    _heap_push(&heap_d[0], &heap_n[0], &heap_size, 0.0, source)
    while heap_size > 0:
        _heap_pop(&heap_d[0], &heap_n[0], &heap_size, &d, &x)
        if settled[x]:
            continue
        settled[x] = 1
        if member[x]:
            out_nodes[count] = x
            out_dists[count] = d
            count += 1
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            nd = d + costs[k]
            if nd <= rmax and nd < dist[y]:
                dist[y] = nd
                touched[n_touched[0]] = y
                n_touched[0] += 1
                _heap_push(&heap_d[0], &heap_n[0], &heap_size, nd, y)
    return count


def dijkstra_truncated(const i64[:] indptr, const i32[:] indices, const double[:] costs,
                       source, n, rmax):
    """Nodes with distance <= rmax from the source, in settle order."""
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t m = indices.shape[0]
    dist_arr = np.full(nn, np.inf)
    settled_arr = np.zeros(nn, dtype=np.uint8)
    member_arr = np.ones(nn, dtype=np.uint8)
    touched_arr = np.empty(m + 2, dtype=np.int32)
    out_nodes_arr = np.empty(nn, dtype=np.int32)
    out_dists_arr = np.empty(nn)
    heap_d_arr = np.empty(m + 2)
    heap_n_arr = np.empty(m + 2, dtype=np.int32)
    cdef Py_ssize_t n_touched = 0
    cdef Py_ssize_t count
    count = _truncated_c(indptr, indices, costs, source, rmax, member_arr,
                         dist_arr, settled_arr, touched_arr, &n_touched,
                         out_nodes_arr, out_dists_arr, heap_d_arr, heap_n_arr)
    return out_nodes_arr[:count].copy(), out_dists_arr[:count].copy()


def ball_table(const i64[:] indptr, const i32[:] indices, const double[:] costs,
               centers, rmax, member_mask):
    """CSR table of metric-ball members (and distances) per center."""
    centers_arr = np.ascontiguousarray(centers, dtype=np.int32)
    member_arr = np.ascontiguousarray(member_mask, dtype=np.uint8)
    cdef Py_ssize_t nn = member_arr.shape[0]
    cdef Py_ssize_t m = indices.shape[0]
    cdef Py_ssize_t n_centers = centers_arr.shape[0]
    dist_arr = np.full(nn, np.inf)
    settled_arr = np.zeros(nn, dtype=np.uint8)
    touched_arr = np.empty(m + 2, dtype=np.int32)
    scratch_nodes = np.empty(nn, dtype=np.int32)
    scratch_dists = np.empty(nn)
    heap_d_arr = np.empty(m + 2)
    heap_n_arr = np.empty(m + 2, dtype=np.int32)
    tab_indptr = np.zeros(n_centers + 1, dtype=np.int64)

    cdef double[:] dist = dist_arr
    cdef u8[:] settled = settled_arr
    cdef i32[:] touched = touched_arr
    cdef i32[:] centers_v = centers_arr
    cdef Py_ssize_t n_touched, count, t, c_idx

    chunks_nodes = []
    chunks_dists = []
    cdef double rm = rmax
    for c_idx in range(n_centers):
        n_touched = 0
        count = _truncated_c(indptr, indices, costs, centers_v[c_idx], rm,
                             member_arr, dist, settled, touched, &n_touched,
                             scratch_nodes, scratch_dists,
                             heap_d_arr, heap_n_arr)
        chunks_nodes.append(scratch_nodes[:count].copy())
        chunks_dists.append(scratch_dists[:count].copy())
        tab_indptr[c_idx + 1] = tab_indptr[c_idx] + count
        for t in range(n_touched):
            dist[touched[t]] = np.inf
            settled[touched[t]] = 0
    tab_indices = (np.concatenate(chunks_nodes) if chunks_nodes
                   else np.empty(0, dtype=np.int32))
    tab_dists = (np.concatenate(chunks_dists) if chunks_dists
                 else np.empty(0))
    return tab_indptr, tab_indices, tab_dists


def gs_sweep(double[:] u, const i64[:] tab_indptr, const i32[:] tab_indices, const i32[:] centers):
    """One in-place lexicographic Gauss-Seidel ball-midpoint sweep."""
    cdef Py_ssize_t n_centers = centers.shape[0]
    cdef Py_ssize_t c_idx
    cdef i64 k
    cdef double lo, hi, val, new, delta
    cdef double resid = 0.0
    with nogil:
        for c_idx in range(n_centers):
            lo = 1e308
            hi = -1e308
            for k in range(tab_indptr[c_idx], tab_indptr[c_idx + 1]):
                val = u[tab_indices[k]]
                if val < lo:
                    lo = val
                if val > hi:
                    hi = val
            new = 0.5 * (lo + hi)
            delta = new - u[centers[c_idx]]
            if delta < 0:
                delta = -delta
            if delta > resid:
                resid = delta
            u[centers[c_idx]] = new
    return resid


def jacobi_sweep(const double[:] u_src, double[:] u_dst,
                 const i64[:] tab_indptr, const i32[:] tab_indices, const i32[:] centers):
    """One Jacobi ball-midpoint sweep; ``u_dst`` must be a copy of ``u_src``."""
    cdef Py_ssize_t n_centers = centers.shape[0]
    cdef Py_ssize_t c_idx
    cdef i64 k
    cdef double lo, hi, val, new, delta
    cdef double resid = 0.0
    with nogil:
        for c_idx in range(n_centers):
            lo = 1e308
            hi = -1e308
            for k in range(tab_indptr[c_idx], tab_indptr[c_idx + 1]):
                val = u_src[tab_indices[k]]
                if val < lo:
                    lo = val
                if val > hi:
                    hi = val
            new = 0.5 * (lo + hi)
            delta = new - u_src[centers[c_idx]]
            if delta < 0:
                delta = -delta
            if delta > resid:
                resid = delta
            u_dst[centers[c_idx]] = new
    return resid


def gs_sweep3(double[:] u, double[:] lo_env, double[:] hi_env,
              const i64[:] tab_indptr, const i32[:] tab_indices, const i32[:] centers):
    """Gauss-Seidel sweep of the iterate plus its two-sided envelope.

    Returns (resid of u, max envelope gap, max of u, min of u) over centers.
    """
    cdef Py_ssize_t n_centers = centers.shape[0]
    cdef Py_ssize_t c_idx
    cdef i64 k, start, stop
    cdef i32 node, center
    cdef double a, b, c
    cdef double alo, ahi, blo, bhi, clo, chi
    cdef double new_u, new_lo, new_hi, delta, g
    cdef double resid = 0.0
    cdef double gap = 0.0
    cdef double umax = -1e308
    cdef double umin = 1e308
    with nogil:
        for c_idx in range(n_centers):
            start = tab_indptr[c_idx]
            stop = tab_indptr[c_idx + 1]
            node = tab_indices[start]
            alo = u[node]; ahi = alo
            blo = lo_env[node]; bhi = blo
            clo = hi_env[node]; chi = clo
            for k in range(start + 1, stop):
                node = tab_indices[k]
                a = u[node]
                b = lo_env[node]
                c = hi_env[node]
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
            delta = new_u - u[center]
            if delta < 0:
                delta = -delta
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


def jacobi_sweep3(const double[:] u_src, const double[:] lo_src, const double[:] hi_src,
                  double[:] u_dst, double[:] lo_dst, double[:] hi_dst,
                  const i64[:] tab_indptr, const i32[:] tab_indices, const i32[:] centers):
    """Jacobi version of ``gs_sweep3``; dst arrays must be copies of src."""
    cdef Py_ssize_t n_centers = centers.shape[0]
    cdef Py_ssize_t c_idx
    cdef i64 k, start, stop
    cdef i32 node, center
    cdef double a, b, c
    cdef double alo, ahi, blo, bhi, clo, chi
    cdef double new_u, new_lo, new_hi, delta, g
    cdef double resid = 0.0
    cdef double gap = 0.0
    cdef double umax = -1e308
    cdef double umin = 1e308
    with nogil:
        for c_idx in range(n_centers):
            start = tab_indptr[c_idx]
            stop = tab_indptr[c_idx + 1]
            node = tab_indices[start]
            alo = u_src[node]; ahi = alo
            blo = lo_src[node]; bhi = blo
            clo = hi_src[node]; chi = clo
            for k in range(start + 1, stop):
                node = tab_indices[k]
                a = u_src[node]
                b = lo_src[node]
                c = hi_src[node]
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
            delta = new_u - u_src[center]
            if delta < 0:
                delta = -delta
            if delta > resid:
                resid = delta
            g = new_hi - new_lo
            if g > gap:
                gap = g
            if new_u > umax:
                umax = new_u
            if new_u < umin:
                umin = new_u
            u_dst[center] = new_u
            lo_dst[center] = new_lo
            hi_dst[center] = new_hi
    return resid, gap, umax, umin
