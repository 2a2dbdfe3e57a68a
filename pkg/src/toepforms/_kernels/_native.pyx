# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

The quadratic-form double sums are grouped by constant (anti)diagonals --
every term of the double sum appears exactly once -- with a compensated
(Kahan) outer accumulation across diagonals. The Cantor products follow the
self-similar angle ladder until the truncation cutoff.
"""

import numpy as np

from libc.math cimport cos, fabs, M_PI
from libc.stdint cimport int64_t

DEF CANTOR_ANGLE_CUTOFF = 1e-8


def toeplitz_form(const double complex[::1] t, const double complex[::1] g):
    """Full double sum sum_{n,m} t_{n-m} g_m conj(g_n) over the support of g.

    `t` is the one-sided Hermitian storage t_0..t_N with N >= len(g) - 1.
    """
    cdef Py_ssize_t L = g.shape[0]
    cdef Py_ssize_t d, m
    cdef double complex s, term, y, upd
    cdef double complex acc = 0
    cdef double complex comp = 0
    cdef double nrm = 0.0
    for m in range(L):
        nrm += g[m].real * g[m].real + g[m].imag * g[m].imag
    acc = t[0] * nrm
    for d in range(1, L):
        s = 0
        for m in range(L - d):
            s = s + g[m] * g[m + d].conjugate()
        term = t[d] * s
        term = term + term.conjugate()
        y = term - comp
        upd = acc + y
        comp = (upd - acc) - y
        acc = upd
    return complex(acc)


def hankel_form(const double[::1] q, const double complex[::1] g):
    """Double sum sum_{n,m} q_{n+m} g_m conj(g_n).

    Each antidiagonal sum b_s = sum_m g_m conj(g_{s-m}) is real, so only the
    lower half of each antidiagonal is accumulated.
    """
    cdef Py_ssize_t L = g.shape[0]
    cdef Py_ssize_t s, m, lo, hi
    cdef double complex partial
    cdef double b, term, y, upd
    cdef double acc = 0.0
    cdef double comp = 0.0
    for s in range(2 * L - 1):
        lo = s - L + 1 if s >= L else 0
        hi = s // 2
        partial = 0
        for m in range(lo, hi + 1 if s % 2 else hi):
            partial = partial + g[m] * g[s - m].conjugate()
        b = 2.0 * partial.real
        if s % 2 == 0:
            m = s // 2
            b += g[m].real * g[m].real + g[m].imag * g[m].imag
        term = q[s] * b
        y = term - comp
        upd = acc + y
        comp = (upd - acc) - y
        acc = upd
    return complex(acc)


def cantor_products(const int64_t[::1] ns):
    """prod_{k>=1} cos(2 pi n 3^{-k}) for each integer n, truncated once the
    angle drops below CANTOR_ANGLE_CUTOFF."""
    cdef Py_ssize_t i, count = ns.shape[0]
    out = np.ones(count)
    cdef double[::1] ov = out
    cdef double angle, p
    for i in range(count):
        angle = 2.0 * M_PI * fabs(<double> ns[i]) / 3.0
        p = 1.0
        while fabs(angle) >= CANTOR_ANGLE_CUTOFF:
            p *= cos(angle)
            angle /= 3.0
        ov[i] = p
    return out
