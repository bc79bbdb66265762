# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel. Semantics match ``_pykernels.simulate_chunk``."""

cimport cython
from libc.stdint cimport int32_t, int64_t, uint8_t


cdef inline Py_ssize_t _pick(const double* cum, Py_ssize_t n, double u) noexcept nogil:
    # smallest j with u < cum[j]; the last slot absorbs rounding
    cdef Py_ssize_t j = 0
    while j < n - 1 and u >= cum[j]:
        j += 1
    return j


def simulate_chunk(const double[:, :, ::1] cum_m, const double[:, :, ::1] cum_tab,
                   int64_t tab_mod, const int64_t[::1] sched, bint sched_periodic,
                   int64_t restart_h, const double[::1] cum_restart, double upsilon,
                   int64_t i0, int64_t x, int64_t a, const double[:, ::1] u,
                   int32_t[::1] out_x, int32_t[::1] out_a, uint8_t[::1] out_w, uint8_t[::1] out_b):
    cdef Py_ssize_t k = cum_m.shape[0]
    cdef Py_ssize_t d = cum_m.shape[1]
    cdef Py_ssize_t n_tab = cum_tab.shape[0]
    cdef Py_ssize_t n_sched = sched.shape[0]
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t r, j, t
    cdef int64_t i
    with nogil:
        for r in range(n):
            i = i0 + r
            out_w[r] = 0
            out_b[r] = 0
            if restart_h > 0 and i % restart_h == 0:
                j = _pick(&cum_restart[0], d * k, u[r, 0])
                x = j // k
                a = j % k
                out_b[r] = 1
            else:
                x = _pick(&cum_m[a, x, 0], d, u[r, 0])
                if n_sched > 0:
                    if sched_periodic:
                        a = sched[i % n_sched]
                    else:
                        a = sched[i]
                elif upsilon >= 0.0 and u[r, 2] < upsilon:
                    a = <int64_t>(u[r, 1] * k)
                    if a >= k:
                        a = k - 1
                    out_w[r] = 1
                else:
                    if tab_mod > 0:
                        t = i % tab_mod
                    else:
                        t = i if i < n_tab - 1 else n_tab - 1
                    a = _pick(&cum_tab[t, x, 0], k, u[r, 1])
            out_x[r] = <int32_t>x
            out_a[r] = <int32_t>a
    return x, a
