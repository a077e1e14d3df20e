# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stream kernel.  Semantics match ``_pykernels.run_stream_kernel``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport calloc, free

cnp.import_array()


def run_stream_kernel(x, states, we, expected, prod, bint use_table,
                      Py_ssize_t latency, Py_ssize_t lam):
    cdef cnp.int64_t[::1] xv = np.ascontiguousarray(x, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] st = np.ascontiguousarray(states, dtype=np.int64)
    cdef cnp.uint8_t[::1] wev = np.ascontiguousarray(we, dtype=np.uint8)
    cdef cnp.int64_t[::1] exp = np.ascontiguousarray(expected, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] tab = np.ascontiguousarray(prod, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t M = st.shape[0]
    cdef Py_ssize_t W = st.shape[1]
    sums_arr = np.zeros(n, dtype=np.int64)
    valid_arr = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return sums_arr, valid_arr, 0
    cdef cnp.int64_t[::1] sums = sums_arr
    cdef cnp.uint8_t[::1] valid = valid_arr
    cdef Py_ssize_t total = n + lam + W - 1
    cdef cnp.int64_t* regs = <cnp.int64_t*> calloc(W, sizeof(cnp.int64_t))
    cdef cnp.int64_t* cnts = <cnp.int64_t*> calloc(W, sizeof(cnp.int64_t))
    if regs == NULL or cnts == NULL:
        free(regs)
        free(cnts)
        raise MemoryError()
    cdef Py_ssize_t t, m, w, k, r, p
    cdef cnp.int64_t xs, wt, s, cn, out_sum = 0
    cdef cnp.uint8_t out_ok = 0
    try:
        with nogil:
            for t in range(total):
                m = t - lam
                if m >= 0 and m < n:
                    xs = xv[m]
                    p = m % M
                    for w in range(W):
                        wt = st[p, w]
                        if wt != 0:
                            if use_table:
                                regs[w] += tab[wt, xs]
                            else:
                                regs[w] += wt * xs
                            cnts[w] += 1
                s = regs[W - 1]
                cn = cnts[W - 1]
                w = W - 1
                while w > 0:
                    regs[w] = regs[w - 1]
                    cnts[w] = cnts[w - 1]
                    w -= 1
                regs[0] = 0
                cnts[0] = 0
                k = m - latency
                if k >= 0 and k < n:
                    r = k % M
                    if wev[r]:
                        out_sum = s
                        out_ok = cn == exp[r]
                    sums[k] = out_sum
                    valid[k] = out_ok
    finally:
        free(regs)
        free(cnts)
    return sums_arr, valid_arr, total
