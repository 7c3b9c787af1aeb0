# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled round kernel. Must match ``_kernels_py.apply_round`` bit for bit."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def apply_round(const cnp.uint8_t[:, ::1] codes,
                const cnp.uint8_t[::1] spreader,
                const cnp.int64_t[::1] indptr,
                const cnp.int64_t[::1] indices,
                const double[::1] beta,
                const cnp.int64_t[::1] xlen,
                const cnp.uint8_t[::1] info,
                const double[::1] u_edge,
                const double[::1] u_start,
                const double[::1] u_forget,
                const cnp.int64_t[::1] mut_len,
                const double[:, ::1] u_mut,
                double gamma_forget,
                double mut_rate):
    cdef Py_ssize_t n = codes.shape[0]
    cdef Py_ssize_t m = codes.shape[1]
    cdef Py_ssize_t u, v, j, e, start, length, lim

    out_arr = np.array(codes, dtype=np.uint8, copy=True, order="C")
    alive_arr = np.zeros(n, dtype=np.uint8)
    recv_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef cnp.uint8_t[::1] alive = alive_arr
    cdef cnp.uint8_t[::1] recv = recv_arr

    with nogil:
        for u in range(n):
            if not spreader[u]:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if u_edge[e] < beta[v]:
                    recv[v] = 1

        for v in range(n):
            if recv[v]:
                length = xlen[v]
                start = <Py_ssize_t>(u_start[v] * <double>(m - length + 1))
                for j in range(start, start + length):
                    out[v, j] = info[j]
            if (spreader[v] or recv[v]) and not (u_forget[v] < gamma_forget):
                alive[v] = 1
            lim = mut_len[v]
            for j in range(lim):
                if u_mut[v, j] < mut_rate:
                    out[v, j] ^= 1

    return out_arr, alive_arr, recv_arr
