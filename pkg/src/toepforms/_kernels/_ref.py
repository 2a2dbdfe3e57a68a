"""Pure-numpy reference implementations of the hot kernels.

The quadratic-form double sums are grouped by constant (anti)diagonals, so
every term appears exactly once while the accumulation stays inside
vectorized, pairwise-summing numpy reductions.
"""

import numpy as np

# Factors with |2 pi n / 3^k| below this bound multiply to 1 within 1e-15
# and are dropped.
CANTOR_ANGLE_CUTOFF = 1e-8


def toeplitz_form(t, g):
    """Full double sum sum_{n,m} t_{n-m} g_m conj(g_n) over the support of g.

    `t` is the one-sided Hermitian storage t_0..t_N with N >= len(g) - 1.
    Returns the complex value; the caller checks the imaginary residue.
    """
    L = g.shape[0]
    if L == 0:
        return 0j
    acc = t[0] * np.vdot(g, g)
    for d in range(1, L):
        # all pairs with n - m = -d, plus their mirrored n - m = +d partners
        s = np.sum(g[: L - d] * np.conj(g[d:]))
        term = t[d] * s
        acc += term + np.conj(term)
    return complex(acc)


def hankel_form(q, g):
    """Double sum sum_{n,m} q_{n+m} g_m conj(g_n) grouped by antidiagonals."""
    L = g.shape[0]
    if L == 0:
        return 0j
    # b[s] = sum_m g_m conj(g_{s-m}) is the autoconvolution of g with conj(g)
    b = np.convolve(g, np.conj(g))
    return complex(np.dot(q[: 2 * L - 1], b))


def cantor_products(ns):
    """prod_{k>=1} cos(2 pi n 3^{-k}) for each integer n, truncated once the
    angle drops below CANTOR_ANGLE_CUTOFF."""
    angle = 2.0 * np.pi * np.abs(ns).astype(np.float64) / 3.0
    out = np.ones(ns.shape[0])
    # divide the angle ladder step by step (matches the compiled kernel's
    # rounding), masking factors that fall below the truncation cutoff
    while True:
        live = angle >= CANTOR_ANGLE_CUTOFF
        if not live.any():
            return out
        out[live] *= np.cos(angle[live])
        angle = angle / 3.0
