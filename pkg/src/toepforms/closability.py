"""Closability analysis of measure-generated Toeplitz forms.

A semibounded Toeplitz form is closable exactly when its generating measure
has no singular part, so the measure-level classifier is a structural check.
The coefficient-level diagnostics mirror the genuine logical gap between the
necessary condition (coefficients tend to zero) and the sufficient one
(square-summable coefficients): raw coefficient data can be Indeterminate.
For measures with a point mass, an explicit witness family certifies
non-closability numerically: vanishing norms, Cauchy in the form norm, form
values bounded away from zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from toepforms.errors import (
    InsufficientCutoffError,
    InvalidMeasureError,
    NotApplicableError,
)
from toepforms.measures import coefficient_table, gamma_floor
from toepforms.toeplitz import quadratic_form_direct

CLOSABLE = "closable"
NOT_CLOSABLE = "not_closable"
INDETERMINATE = "indeterminate"

#: coefficient magnitudes below NOISE_RTOL * |t_0| count as numerically zero
NOISE_RTOL = 1e-12
#: "no decay": window sups stay above this fraction of the early level
NONDECAY_FRACTION = 0.5
#: "square-summable": two-sided tail mass below this fraction of the total
L2_TAIL_RATIO = 1e-6
#: adjoint sequences whose last-quartile mass ratio is below this are
#: reported as plausibly square-summable
DSTAR_TAIL_RATIO = 1e-4


@dataclass(frozen=True)
class ClosabilityVerdict:
    """Classification outcome with machine-readable evidence."""

    status: str
    evidence: dict

    def to_dict(self):
        return {"status": self.status, "evidence": self.evidence}


def classify_measure(measure):
    """Closable iff the measure has no atoms and no Cantor component.

    The evidence names the symbol (the density) for closable measures and
    the singular parts otherwise; this classifier never returns
    Indeterminate.
    """
    if measure.is_singular_free:
        symbol = measure.ac.describe() if measure.ac is not None else {"kind": "zero"}
        return ClosabilityVerdict(
            CLOSABLE,
            {"symbol": symbol, "gamma_floor": gamma_floor(measure)},
        )
    evidence = {
        "atoms": [a.describe() for a in measure.atoms],
        "cantor_mass": measure.cantor_mass,
    }
    return ClosabilityVerdict(NOT_CLOSABLE, evidence)


def decay_diagnostics(coeffs, tail_start, *, nondecay_fraction=NONDECAY_FRACTION,
                      l2_tail_ratio=L2_TAIL_RATIO):
    """Coefficient-level diagnostics over two doubling tail windows.

    Not closable when the tail sup stays at the early-coefficient level
    across both windows (a non-decaying subsequence); closable when the
    two-sided tail is square-summably small; otherwise Indeterminate,
    because decay alone cannot distinguish singular-continuous measures
    from absolutely continuous ones.
    """
    tail_start = int(tail_start)
    if tail_start < 1:
        raise ValueError("tail_start must be >= 1")
    if tail_start >= coeffs.n_max:
        raise InsufficientCutoffError(
            f"tail_start {tail_start} must be below the cutoff {coeffs.n_max}"
        )
    magnitudes = np.abs(coeffs.entries)
    t0 = abs(coeffs.t0)
    split = min(2 * tail_start, coeffs.n_max)
    early_level = magnitudes[1:tail_start].max() if tail_start > 1 else t0
    sup1 = magnitudes[tail_start: split + 1].max()
    sup2 = magnitudes[split + 1:].max() if split < coeffs.n_max else None

    tail_mass = 2.0 * float(np.sum(magnitudes[tail_start:] ** 2))
    total_mass = float(magnitudes[0] ** 2 + 2.0 * np.sum(magnitudes[1:] ** 2))
    evidence = {
        "tail_start": tail_start,
        "windows": [[tail_start, split], [split + 1, coeffs.n_max]],
        "early_level": float(early_level),
        "window_sups": [float(sup1), None if sup2 is None else float(sup2)],
        "tail_mass_ratio": tail_mass / total_mass if total_mass > 0 else 0.0,
        "thresholds": {
            "nondecay_fraction": nondecay_fraction,
            "l2_tail_ratio": l2_tail_ratio,
        },
    }
    significant = early_level > NOISE_RTOL * max(t0, 1e-300)
    if (
        significant
        and sup2 is not None
        and sup1 >= nondecay_fraction * early_level
        and sup2 >= nondecay_fraction * early_level
    ):
        evidence["non_decaying_subsequence"] = {
            "window_1_argmax": int(tail_start + magnitudes[tail_start: split + 1].argmax()),
            "window_2_argmax": int(split + 1 + magnitudes[split + 1:].argmax()),
        }
        return ClosabilityVerdict(NOT_CLOSABLE, evidence)
    if total_mass == 0.0 or tail_mass < l2_tail_ratio * total_mass:
        evidence["square_summable_tail"] = True
        return ClosabilityVerdict(CLOSABLE, evidence)
    return ClosabilityVerdict(INDETERMINATE, evidence)


@dataclass(frozen=True)
class WitnessReport:
    """Numerical record of the non-closability witness pair (k, l)."""

    k: int
    l: int
    norm_sq_k: float
    form_k: float
    form_diff: float

    def to_dict(self):
        return {
            "k": self.k,
            "l": self.l,
            "norm_sq_k": self.norm_sq_k,
            "form_k": self.form_k,
            "form_diff": self.form_diff,
        }


def witness_vector(k, angle):
    """g_n = e^{-i n angle} / k for 0 <= n < k: unit form value at the atom,
    vanishing norm as k grows."""
    return np.exp(-1j * angle * np.arange(k)) / k


def nonclosability_witness(measure, k, l, grid=None):
    """Evaluate the witness family against the measure's first atom.

    Reports ||g^{(k)}||^2 (= 1/k), the form value t[g^{(k)}, g^{(k)}] (at
    least the atom mass), and the form value of the difference
    g^{(k)} - g^{(l)} (tending to zero when the rest of the measure is a
    multiple of Lebesgue measure).
    """
    k, l = int(k), int(l)
    if k < 1 or l < 1:
        raise ValueError("witness indices must be >= 1")
    if k == l:
        raise ValueError("witness indices must differ")
    if not measure.atoms:
        raise NotApplicableError(
            "the witness construction needs a measure with at least one atom"
        )
    angle = measure.atoms[0].angle
    length = max(k, l)
    coeffs = coefficient_table(measure, length - 1, grid=grid)
    g_k = witness_vector(k, angle)
    g_l = witness_vector(l, angle)
    diff = np.zeros(length, dtype=np.complex128)
    diff[:k] += g_k
    diff[:l] -= g_l
    return WitnessReport(
        k=k,
        l=l,
        norm_sq_k=float(np.real(np.vdot(g_k, g_k))),
        form_k=quadratic_form_direct(coeffs, g_k),
        form_diff=quadratic_form_direct(coeffs, diff),
    )


@dataclass(frozen=True)
class AdjointReport:
    """Coefficient sequence u_n = integral of u(z) z^{-n} dM(z), n >= 0."""

    entries: np.ndarray = field(repr=False)
    in_dstar: bool = False
    tail_ratio: float = 0.0

    threshold: float = DSTAR_TAIL_RATIO

    def to_dict(self):
        return {
            "entries": [[z.real, z.imag] for z in self.entries],
            "in_dstar": self.in_dstar,
            "tail_ratio": self.tail_ratio,
            "tail_ratio_threshold": self.threshold,
        }


def adjoint_coefficients(u_samples, measure, n_max, grid=None, *,
                         dstar_ratio=DSTAR_TAIL_RATIO):
    """Adjoint-operator coefficients of the trigonometric interpolant of u.

    ``u_samples`` lives on the midpoint grid theta_j = 2 pi (j + 1/2) / S.
    Writing u = sum_k c_k z^k for the interpolant, each coefficient is the
    convolution u_n = sum_k c_k t_{n-k} against the measure's table, which
    covers the density part (quadrature), atoms (interpolant evaluated at the
    atom), and the Cantor part in one identity. The membership flag reports
    whether the computed prefix looks square-summable: last-quartile mass
    ratio below DSTAR_TAIL_RATIO.
    """
    u = np.ascontiguousarray(u_samples, dtype=np.complex128)
    if u.ndim != 1 or u.size < 8 or u.size % 2:
        raise InvalidMeasureError("u needs an even number (>= 8) of samples")
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    size = u.size
    half = size // 2
    # interpolant coefficients c_k, k = -half .. half-1, from the midpoint grid
    bins = np.fft.fft(u) / size
    ks = np.concatenate([np.arange(half), np.arange(-half, 0)])
    c = bins * np.exp(-1j * np.pi * ks / size)
    c_ordered = np.concatenate([c[half:], c[:half]])  # k = -half .. half-1
    table = coefficient_table(measure, n_max + half, grid=grid)
    t_two_sided = table.two_sided()  # indices -(n_max+half) .. n_max+half
    full = scipy.signal.fftconvolve(c_ordered, t_two_sided)
    # c offset -half, t offset -(n_max + half): u_n sits at n + n_max + 2*half
    start = n_max + 2 * half
    entries = np.ascontiguousarray(full[start: start + n_max + 1])
    quart = n_max + 1 - (n_max + 1) // 4
    total = float(np.sum(np.abs(entries) ** 2))
    tail = float(np.sum(np.abs(entries[quart:]) ** 2))
    ratio = tail / total if total > 0 else 0.0
    entries.setflags(write=False)
    return AdjointReport(entries=entries, in_dstar=ratio < dstar_ratio,
                         tail_ratio=ratio, threshold=dstar_ratio)
