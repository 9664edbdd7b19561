# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np

from libc.math cimport fabs, sqrt
from libc.stdint cimport uint64_t

cdef enum:
    MAXV = 64
    MAXK = 16


cdef double _det(double *m, int k) noexcept nogil:
    cdef int i, j, r, p
    cdef double d = 1.0, f, t
    for p in range(k):
        r = p
        for i in range(p + 1, k):
            if fabs(m[i * k + p]) > fabs(m[r * k + p]):
                r = i
        if m[r * k + p] == 0.0:
            return 0.0
        if r != p:
            for j in range(k):
                t = m[p * k + j]
                m[p * k + j] = m[r * k + j]
                m[r * k + j] = t
            d = -d
        d *= m[p * k + p]
        for i in range(p + 1, k):
            f = m[i * k + p] / m[p * k + p]
            for j in range(p + 1, k):
                m[i * k + j] -= f * m[p * k + j]
    return d


cdef double _gram_det(double *b, int n, int *x, int *y, int k, double *buf) noexcept nogil:
    cdef int r, c, m
    cdef double acc
    for r in range(k):
        for c in range(k):
            acc = 0.0
            for m in range(n):
                acc += b[m * MAXV + x[r]] * b[m * MAXV + y[c]]
            buf[r * k + c] = acc
    return _det(buf, k)


def partial_corr_batch(samples, edge_src, edge_dst, int n, rows, cols):
    cdef double[:, ::1] s = np.ascontiguousarray(samples, dtype=np.float64)
    cdef int[::1] src = np.ascontiguousarray(edge_src, dtype=np.intc)
    cdef int[::1] dst = np.ascontiguousarray(edge_dst, dtype=np.intc)
    cdef int[::1] rw = np.ascontiguousarray(rows, dtype=np.intc)
    cdef int[::1] cl = np.ascontiguousarray(cols, dtype=np.intc)
    cdef int k = rw.shape[0], ne = src.shape[0]
    if n > MAXV or k > MAXK:
        raise ValueError("problem too large for the compiled kernel")
    out_arr = np.empty(s.shape[0])
    cdef double[::1] out = out_arr
    cdef double b[MAXV * MAXV]
    cdef double buf[MAXK * MAXK]
    cdef Py_ssize_t t
    cdef int e, m, i, j
    cdef double a, num, d1, d2
    with nogil:
        for t in range(s.shape[0]):
            for i in range(n):
                for j in range(n):
                    b[i * MAXV + j] = 1.0 if i == j else 0.0
            for e in range(ne):
                a = s[t, e]
                for m in range(n):
                    b[m * MAXV + dst[e]] += b[m * MAXV + src[e]] * a
            num = _gram_det(b, n, &rw[0], &cl[0], k, buf)
            d1 = _gram_det(b, n, &rw[0], &rw[0], k, buf)
            d2 = _gram_det(b, n, &cl[0], &cl[0], k, buf)
            out[t] = num / sqrt(d1 * d2)
    return out_arr


def sided_free_assignments(offsets, targets, up_masks, down_masks):
    cdef Py_ssize_t[::1] off = np.ascontiguousarray(offsets, dtype=np.intp)
    cdef int[::1] tg = np.ascontiguousarray(targets, dtype=np.intc)
    cdef uint64_t[::1] um = np.ascontiguousarray(up_masks, dtype=np.uint64)
    cdef uint64_t[::1] dm = np.ascontiguousarray(down_masks, dtype=np.uint64)
    cdef int k = off.shape[0] - 1
    if k == 0:
        return [()]
    if k > MAXK:
        raise ValueError("too many sources for the compiled kernel")
    cdef Py_ssize_t cur[MAXK]
    cdef uint64_t ut[MAXK + 1]
    cdef uint64_t uu[MAXK + 1]
    cdef uint64_t ud[MAXK + 1]
    cdef int r = 0
    cdef Py_ssize_t o
    cdef uint64_t tb
    out = []
    ut[0] = uu[0] = ud[0] = 0
    cur[0] = off[0] - 1
    while r >= 0:
        cur[r] += 1
        o = cur[r]
        if o >= off[r + 1]:
            r -= 1
            continue
        tb = (<uint64_t>1) << tg[o]
        if (ut[r] & tb) or (uu[r] & um[o]) or (ud[r] & dm[o]):
            continue
        if r + 1 == k:
            out.append(tuple([cur[i] for i in range(k)]))
            continue
        ut[r + 1] = ut[r] | tb
        uu[r + 1] = uu[r] | um[o]
        ud[r + 1] = ud[r] | dm[o]
        r += 1
        cur[r] = off[r] - 1
    return out
