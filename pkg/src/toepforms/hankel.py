"""Hankel companion: power moments on the line, Hankel forms, closability.

Measures live on a bounded interval (piecewise-linear density through
uniform samples) plus finitely many atoms anywhere on the line. Moments are
integrated cell by cell with Gauss-Legendre rules sized for exactness, so
polynomial test cases reproduce their closed forms to rounding. The
closability criterion is geometric: everything inside (-1, 1) up to an
absolutely continuous boundary, no mass at the endpoints or beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from toepforms import _kernels
from toepforms.errors import (
    InsufficientMomentsError,
    InvalidMeasureError,
    NumericalError,
    QuadratureDegreeError,
)
from toepforms.closability import (
    CLOSABLE,
    NOT_CLOSABLE,
    ClosabilityVerdict,
)
from toepforms.toeplitz import PSD_PIVOT_RTOL, PsdReport, semidefinite_cholesky

#: |x -+ 1| below this counts as an endpoint atom
ENDPOINT_ATOL = 1e-12
#: default moment cutoff for the decay diagnostic in hankel_classify
CLASSIFY_N_MAX = 32
FORM_IMAG_RTOL = 1e-10


@dataclass(frozen=True)
class LineAtom:
    """Point mass on the real line."""

    x: float
    mass: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.mass)):
            raise InvalidMeasureError("atom position and mass must be finite")
        if self.mass <= 0:
            raise InvalidMeasureError(f"atom mass must be positive, got {self.mass}")

    def describe(self):
        return {"x": self.x, "mass": self.mass}


@dataclass(frozen=True)
class IntervalDensity:
    """Piecewise-linear density through uniform samples on [a, b]."""

    a: float
    b: float
    samples: tuple

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.b <= self.a:
            raise InvalidMeasureError("interval needs finite a < b")
        values = np.asarray(self.samples, dtype=np.float64)
        if values.ndim != 1 or values.size < 2 or not np.all(np.isfinite(values)):
            raise InvalidMeasureError("density needs >= 2 finite samples")
        if values.min() < -1e-12:
            raise InvalidMeasureError(f"density sample {values.min()} is negative")
        values = np.where(values < 0.0, 0.0, values)
        object.__setattr__(self, "samples", tuple(float(v) for v in values))

    def describe(self):
        return {"a": self.a, "b": self.b, "samples": list(self.samples)}


@dataclass(frozen=True)
class LineMeasure:
    """Finite nonnegative measure on the line: density part + atoms."""

    ac: IntervalDensity | None = None
    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, LineAtom) else LineAtom(*a) for a in self.atoms)
        xs = [a.x for a in atoms]
        if len(set(xs)) != len(xs):
            raise InvalidMeasureError("atom positions must be pairwise distinct")
        object.__setattr__(self, "atoms", atoms)

    def to_dict(self):
        out = {}
        if self.ac is not None:
            out["ac"] = self.ac.describe()
        if self.atoms:
            out["atoms"] = [a.describe() for a in self.atoms]
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or set(data) - {"ac", "atoms"}:
            raise InvalidMeasureError("line-measure JSON must hold 'ac' and/or 'atoms'")
        ac = None
        if data.get("ac") is not None:
            spec = data["ac"]
            if not isinstance(spec, dict) or set(spec) != {"a", "b", "samples"}:
                raise InvalidMeasureError("'ac' needs exactly 'a', 'b', 'samples'")
            if not isinstance(spec["samples"], list):
                raise InvalidMeasureError("'samples' must be a list")
            ac = IntervalDensity(float(spec["a"]), float(spec["b"]),
                                 tuple(float(s) for s in spec["samples"]))
        atoms = []
        for entry in data.get("atoms", []):
            if not isinstance(entry, dict) or set(entry) != {"x", "mass"}:
                raise InvalidMeasureError("each atom needs exactly 'x' and 'mass'")
            atoms.append(LineAtom(float(entry["x"]), float(entry["mass"])))
        return cls(ac=ac, atoms=tuple(atoms))


@dataclass(frozen=True)
class MomentSequence:
    """Real power moments q_0..q_{n_max}."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0 or not np.all(np.isfinite(values)):
            raise InvalidMeasureError("moments must form a nonempty finite sequence")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_max(self):
        return self.values.size - 1

    @property
    def q0(self):
        return float(self.values[0])


def power_moments(measure, n_max, nodes_per_cell=None):
    """q_n = integral of x^n dM(x) for 0 <= n <= n_max.

    The density part integrates cell by cell with a Gauss-Legendre rule
    whose degree covers x^n times the linear interpolant exactly; atoms sum
    exactly.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    needed = (n_max + 3) // 2  # exactness for degree n_max + 1 per cell
    if nodes_per_cell is None:
        nodes_per_cell = needed
    elif nodes_per_cell < needed:
        raise QuadratureDegreeError(
            f"{nodes_per_cell} Gauss nodes per cell integrate degree "
            f"{2 * nodes_per_cell - 1} < {n_max + 1} exactly"
        )
    moments = np.zeros(n_max + 1)
    if measure.ac is not None:
        density = np.asarray(measure.ac.samples)
        edges = np.linspace(measure.ac.a, measure.ac.b, density.size)
        ref_nodes, ref_weights = np.polynomial.legendre.leggauss(int(nodes_per_cell))
        left, right = edges[:-1], edges[1:]
        half = 0.5 * (right - left)
        nodes = 0.5 * (left + right)[:, None] + half[:, None] * ref_nodes[None, :]
        frac = 0.5 * (ref_nodes + 1.0)
        dens = density[:-1, None] * (1.0 - frac)[None, :] + density[1:, None] * frac[None, :]
        weighted = (dens * ref_weights[None, :] * half[:, None]).ravel()
        flat = nodes.ravel()
        powers = np.ones_like(flat)
        for n in range(n_max + 1):
            moments[n] += float(np.dot(powers, weighted))
            powers = powers * flat
    for atom in measure.atoms:
        moments += atom.mass * float(atom.x) ** np.arange(n_max + 1)
    return MomentSequence(moments)


def hankel_form(moments, g):
    """q[g, g] = sum_{n,m} q_{n+m} g_m conj(g_n) by the direct double sum."""
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if g.ndim != 1:
        raise ValueError("vectors must be 1-dimensional")
    if g.size == 0:
        return 0.0
    if moments.n_max < 2 * (g.size - 1):
        raise InsufficientMomentsError(
            f"form needs moments up to {2 * (g.size - 1)}, cutoff is {moments.n_max}"
        )
    value = _kernels.hankel_form(moments.values, g)
    norm_sq = float(np.real(np.vdot(g, g)))
    scale = float(np.abs(moments.values[: 2 * g.size - 1]).max())
    if abs(value.imag) > FORM_IMAG_RTOL * max(scale * norm_sq, np.finfo(float).tiny):
        raise NumericalError(
            f"hankel form imaginary residue {value.imag} exceeds tolerance"
        )
    return float(value.real)


def hankel_section(moments, order):
    """Dense Hankel matrix H[n, m] = q_{n+m} of the given order."""
    order = int(order)
    if order < 1:
        raise ValueError("section order must be >= 1")
    if moments.n_max < 2 * (order - 1):
        raise InsufficientMomentsError(
            f"order-{order} section needs moments up to {2 * (order - 1)}"
        )
    q = moments.values
    return scipy.linalg.hankel(q[:order], q[order - 1: 2 * order - 1])


def hankel_psd_check(moments, order, *, pivot_rtol=PSD_PIVOT_RTOL):
    """Tolerant-Cholesky positivity check of the order-N Hankel section."""
    matrix = hankel_section(moments, order)
    scale = max(float(np.abs(matrix).max()), 1e-300)
    tolerance = pivot_rtol * scale * order
    ok, index, pivot = semidefinite_cholesky(matrix.astype(np.complex128), tolerance)
    if ok:
        return PsdReport(is_psd=True, order=order, tolerance=tolerance)
    block = matrix[: index + 1, : index + 1]
    eigvals, eigvecs = np.linalg.eigh(block)
    certificate = np.ascontiguousarray(eigvecs[:, 0])
    form_value = hankel_form(moments, certificate)
    return PsdReport(
        is_psd=False,
        order=order,
        tolerance=tolerance,
        failed_pivot=pivot,
        pivot_index=index,
        certificate=certificate,
        certificate_form=form_value,
    )


def _moment_decay_diagnostic(moments):
    """Three-valued decay reading of a computed moment prefix."""
    q = np.abs(moments.values)
    n_max = moments.n_max
    if n_max < 8:
        return {"verdict": "inconclusive", "reason": "too few moments"}
    early = float(q[1: max(2, n_max // 4 + 1)].max())
    late = float(q[n_max - n_max // 4:].max())
    out = {"early_sup": early, "late_sup": late, "n_max": n_max}
    if late <= 1e-12 * max(moments.q0, 1e-300) or (early > 0 and late < 0.5 * early):
        out["verdict"] = "decaying"
    elif late >= 0.9 * max(moments.q0, early):
        out["verdict"] = "not_decaying"
    else:
        out["verdict"] = "inconclusive"
    return out


def hankel_classify(measure, n_max=CLASSIFY_N_MAX, *, endpoint_atol=ENDPOINT_ATOL):
    """Closable iff the measure is supported in [-1, 1] with no mass at the
    endpoints; the evidence carries the violating atom or interval, plus a
    moment-decay diagnostic computed alongside.
    """
    violations = []
    for atom in measure.atoms:
        if abs(abs(atom.x) - 1.0) <= endpoint_atol:
            violations.append({"endpoint_atom": atom.describe()})
        elif abs(atom.x) > 1.0:
            violations.append({"outside_atom": atom.describe()})
    if measure.ac is not None:
        if measure.ac.a < -1.0 - endpoint_atol or measure.ac.b > 1.0 + endpoint_atol:
            violations.append(
                {"outside_interval": {"a": measure.ac.a, "b": measure.ac.b}}
            )
    diagnostic = _moment_decay_diagnostic(power_moments(measure, n_max))
    evidence = {
        "endpoint_atol": endpoint_atol,
        "moment_diagnostic": diagnostic,
    }
    if violations:
        evidence["violations"] = violations
        return ClosabilityVerdict(NOT_CLOSABLE, evidence)
    evidence["support"] = "contained in [-1, 1] with no endpoint mass"
    return ClosabilityVerdict(CLOSABLE, evidence)
