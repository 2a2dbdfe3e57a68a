"""Toeplitz quadratic forms, fast operator application, finite sections.

All operations act on a Hermitian coefficient sequence and finitely supported
vectors. The quadratic form is the literal double sum (hot kernel); operator
application embeds the Toeplitz matrix in a circulant and multiplies through
the FFT; finite sections are dense Hermitian matrices probed with LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from toepforms import _kernels
from toepforms.errors import InsufficientCutoffError, NumericalError

#: dense eigensolves are the only spectral path; keep them at desk scale
MAX_SECTION_ORDER = 2048
#: relative imaginary residue allowed before a "real" form value is rejected
FORM_IMAG_RTOL = 1e-10
#: scale factor for the Cholesky pivot tolerance -tol * t_0 * N
PSD_PIVOT_RTOL = 1e-10


def _as_vector(g):
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if g.ndim != 1:
        raise ValueError("vectors must be 1-dimensional")
    return g


def _check_cutoff(coeffs, needed, what):
    if coeffs.n_max < needed:
        raise InsufficientCutoffError(
            f"{what} needs coefficients up to |n| = {needed}, cutoff is {coeffs.n_max}"
        )


def quadratic_form_direct(coeffs, g):
    """t[g, g] = sum_{n,m} t_{n-m} g_m conj(g_n) by the direct double sum.

    The rounding-level imaginary residue is checked against
    FORM_IMAG_RTOL * scale * ||g||^2 and discarded.
    """
    g = _as_vector(g)
    if g.size == 0:
        return 0.0
    _check_cutoff(coeffs, g.size - 1, "quadratic form")
    value = _kernels.toeplitz_form(coeffs.entries[: g.size], g)
    norm_sq = float(np.real(np.vdot(g, g)))
    scale = max(abs(coeffs.t0), float(np.abs(coeffs.entries[: g.size]).max()))
    if abs(value.imag) > FORM_IMAG_RTOL * max(scale * norm_sq, np.finfo(float).tiny):
        raise NumericalError(
            f"quadratic form imaginary residue {value.imag} exceeds tolerance"
        )
    return float(value.real)


def toeplitz_apply(coeffs, g, out_len, fft_size=None):
    """(T g)_n = sum_m t_{n-m} g_m for 0 <= n < out_len, via circulant
    embedding and one FFT round trip.

    The embedding size defaults to the next power of two >= out_len + L - 1;
    any explicit ``fft_size`` at least that large gives the same result to
    rounding.
    """
    g = _as_vector(g)
    out_len = int(out_len)
    if out_len < 1:
        raise ValueError("out_len must be >= 1")
    if g.size == 0:
        return np.zeros(out_len, dtype=np.complex128)
    _check_cutoff(coeffs, max(g.size - 1, out_len - 1), "toeplitz_apply")
    min_size = out_len + g.size - 1
    size = 1 << int(min_size - 1).bit_length() if fft_size is None else int(fft_size)
    if size < min_size:
        raise ValueError(f"fft_size {size} below embedding minimum {min_size}")
    column = np.zeros(size, dtype=np.complex128)
    column[:out_len] = coeffs.entries[:out_len]
    if g.size > 1:
        column[-(g.size - 1):] = np.conj(coeffs.entries[1:g.size])[::-1]
    spectrum = np.fft.fft(column) * np.fft.fft(g, n=size)
    return np.fft.ifft(spectrum)[:out_len]


@dataclass(frozen=True)
class FiniteSection:
    """Dense Hermitian N x N section with entries t_{i-j}."""

    order: int
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def from_coeffs(cls, coeffs, order):
        order = int(order)
        if order < 1:
            raise ValueError("section order must be >= 1")
        if order > MAX_SECTION_ORDER:
            raise ValueError(
                f"section order {order} beyond dense-solver cap {MAX_SECTION_ORDER}"
            )
        _check_cutoff(coeffs, order - 1, f"finite section of order {order}")
        first_col = np.array(coeffs.entries[:order])
        matrix = scipy.linalg.toeplitz(first_col, np.conj(first_col))
        matrix.setflags(write=False)
        return cls(order=order, matrix=matrix)

    @cached_property
    def min_eig(self):
        return float(np.linalg.eigvalsh(self.matrix)[0])


def section_min_eig(coeffs, order):
    """Minimal eigenvalue of the order-N finite section (nonincreasing in N)."""
    return FiniteSection.from_coeffs(coeffs, order).min_eig


@dataclass(frozen=True)
class PsdReport:
    """Outcome of the tolerant Cholesky positivity check."""

    is_psd: bool
    order: int
    tolerance: float
    failed_pivot: float | None = None
    pivot_index: int | None = None
    certificate: np.ndarray | None = field(default=None, repr=False)
    certificate_form: float | None = None

    def to_dict(self):
        out = {
            "is_psd": self.is_psd,
            "order": self.order,
            "tolerance": self.tolerance,
        }
        if not self.is_psd:
            out["failed_pivot"] = self.failed_pivot
            out["pivot_index"] = self.pivot_index
            out["certificate"] = [[z.real, z.imag] for z in self.certificate]
            out["certificate_form"] = self.certificate_form
        return out


def semidefinite_cholesky(matrix, tolerance):
    """Outer-product Cholesky that treats pivots in (-tolerance, 0] as exact
    zeros (their columns are skipped), as rank-deficient PSD matrices demand.

    Returns (ok, pivot_index, pivot_value); pivot data is None on success.
    """
    matrix = np.asarray(matrix)
    order = matrix.shape[0]
    lower = np.zeros((order, order), dtype=np.complex128)
    for j in range(order):
        pivot = float(matrix[j, j].real - np.real(np.vdot(lower[j, :j], lower[j, :j])))
        if pivot < -tolerance:
            return False, j, pivot
        if pivot <= 0.0:
            continue
        lower[j, j] = np.sqrt(pivot)
        if j + 1 < order:
            lower[j + 1:, j] = (
                matrix[j + 1:, j] - lower[j + 1:, :j] @ np.conj(lower[j, :j])
            ) / lower[j, j]
    return True, None, None


def psd_check(coeffs, order, *, pivot_rtol=PSD_PIVOT_RTOL):
    """Positivity of the order-N section via tolerant Cholesky.

    On failure the report carries a violating vector g (minimal eigenvector
    of the leading block that broke the factorization) together with its
    directly evaluated quadratic-form value.
    """
    section = FiniteSection.from_coeffs(coeffs, order)
    scale = max(abs(coeffs.t0), float(np.abs(coeffs.entries[:order]).max()), 1e-300)
    tolerance = pivot_rtol * scale * order
    ok, index, pivot = semidefinite_cholesky(section.matrix, tolerance)
    if ok:
        return PsdReport(is_psd=True, order=order, tolerance=tolerance)
    block = section.matrix[: index + 1, : index + 1]
    eigvals, eigvecs = np.linalg.eigh(block)
    certificate = np.ascontiguousarray(eigvecs[:, 0])
    form_value = quadratic_form_direct(coeffs, certificate)
    return PsdReport(
        is_psd=False,
        order=order,
        tolerance=tolerance,
        failed_pivot=pivot,
        pivot_index=index,
        certificate=certificate,
        certificate_form=form_value,
    )
