"""Semibounded Toeplitz quadratic forms on the unit circle.

Builds Hermitian Toeplitz coefficient sequences from measures, evaluates and
spectrally probes the associated quadratic forms, classifies closability,
constructs explicit non-closability witnesses, evaluates weighted closures
through the analytic extension, estimates the Muckenhoupt functional, and
mirrors the whole story for Hankel forms and power moments on the line.
"""

from toepforms.closability import (
    CLOSABLE,
    INDETERMINATE,
    NOT_CLOSABLE,
    AdjointReport,
    ClosabilityVerdict,
    WitnessReport,
    adjoint_coefficients,
    classify_measure,
    decay_diagnostics,
    nonclosability_witness,
    witness_vector,
)
from toepforms.errors import (
    GridResolutionError,
    InsufficientCutoffError,
    InsufficientMomentsError,
    InvalidMeasureError,
    NotApplicableError,
    NumericalError,
    QuadratureDegreeError,
    ToepformsError,
)
from toepforms.hankel import (
    IntervalDensity,
    LineAtom,
    LineMeasure,
    MomentSequence,
    hankel_classify,
    hankel_form,
    hankel_psd_check,
    hankel_section,
    power_moments,
)
from toepforms.measures import (
    Atom,
    BuiltinDensity,
    CircleMeasure,
    CoeffSequence,
    FourierDensity,
    GridDensity,
    coefficient_table,
    fourier_coefficient,
    gamma_floor,
    midpoint_nodes,
)
from toepforms.toeplitz import (
    FiniteSection,
    PsdReport,
    psd_check,
    quadratic_form_direct,
    section_min_eig,
    toeplitz_apply,
)
from toepforms.weights import (
    AnalyticExtension,
    MuckenhouptReport,
    ProjectionResult,
    analytic_extension_eval,
    closed_form_eval,
    laurent_form_eval,
    muckenhoupt_estimate,
    radial_ladder,
    riesz_project,
)

__version__ = "0.1.0"
