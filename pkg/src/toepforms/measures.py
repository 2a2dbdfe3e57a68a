"""Finite nonnegative measures on the unit circle and their Fourier data.

A measure is stored in up to three parts: an absolutely continuous density
w(e^{i theta}) >= 0, finitely many point masses, and a multiple of the
symmetric middle-thirds Cantor measure pushed onto the circle. Coefficients

    t_n = integral of z^{-n} dM(z)

are computed part by part: spectrally accurate periodic-trapezoid quadrature
for the density (a single FFT pass for whole tables), the exact exponential
sum for atoms, and the self-similar cosine product for the Cantor part.

The quadrature nodes for analytically described densities sit at cell
midpoints theta_j = 2 pi (j + 1/2) / G. On a periodic domain this is the same
trapezoid rule (exact for trigonometric polynomials of degree < G) while
keeping integrable singularities such as |theta/pi|^alpha, alpha in (-1, 0),
off the node set. Grid-sampled densities use their own aligned nodes.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from toepforms import _kernels
from toepforms.errors import (
    GridResolutionError,
    InsufficientCutoffError,
    InvalidMeasureError,
)

DEFAULT_GRID = 4096
GRID_ENV_VAR = "TOEPFORMS_GRID"
#: minimum ratio of grid size to requested frequency cutoff
MIN_OVERSAMPLING = 8
#: density samples in [-NEG_DENSITY_TOL, 0) are clamped to 0; below is an error
NEG_DENSITY_TOL = 1e-12

BUILTIN_NAMES = ("lebesgue", "constant", "2+2cos", "power")


def default_grid():
    """Grid size used when none is requested: TOEPFORMS_GRID or 4096."""
    raw = os.environ.get(GRID_ENV_VAR)
    if raw is None:
        return DEFAULT_GRID
    try:
        value = int(raw)
    except ValueError as exc:
        raise GridResolutionError(f"{GRID_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value < 8 or value % 2:
        raise GridResolutionError(f"{GRID_ENV_VAR} must be even and >= 8, got {value}")
    return value


def _next_pow2(n):
    return 1 << max(3, int(n - 1).bit_length())


def midpoint_nodes(grid):
    """Angular quadrature nodes theta_j = 2 pi (j + 1/2) / grid."""
    return 2.0 * np.pi * (np.arange(grid) + 0.5) / grid


def _clamp_density(values, what):
    values = np.asarray(values, dtype=np.float64)
    if np.any(np.isnan(values)):
        raise InvalidMeasureError(f"{what}: density samples must not be NaN")
    low = values.min(initial=np.inf)
    if low < -NEG_DENSITY_TOL:
        raise InvalidMeasureError(f"{what}: density sample {low} below -{NEG_DENSITY_TOL}")
    if low < 0.0:
        values = np.where(values < 0.0, 0.0, values)
    return values


@dataclass(frozen=True)
class BuiltinDensity:
    """Named closed-form density.

    ``lebesgue`` is w = 1, ``constant`` is w = value, ``2+2cos`` is
    w(theta) = 2 + 2 cos(theta), and ``power`` is w(theta) = |theta/pi|^alpha
    on the principal branch, with alpha > -1 for integrability.
    """

    name: str
    value: float = 1.0
    alpha: float | None = None

    def __post_init__(self):
        if self.name not in BUILTIN_NAMES:
            raise InvalidMeasureError(f"unknown builtin density {self.name!r}")
        if self.name == "constant" and (not math.isfinite(self.value) or self.value < 0):
            raise InvalidMeasureError("constant density needs a finite value >= 0")
        if self.name == "power":
            if self.alpha is None or not math.isfinite(self.alpha) or self.alpha <= -1:
                raise InvalidMeasureError("power density needs alpha > -1")

    def sample(self, thetas):
        thetas = np.asarray(thetas, dtype=np.float64)
        if self.name == "lebesgue":
            return np.ones_like(thetas)
        if self.name == "constant":
            return np.full_like(thetas, self.value)
        if self.name == "2+2cos":
            return 2.0 + 2.0 * np.cos(thetas)
        folded = np.abs(np.angle(np.exp(1j * thetas))) / np.pi
        with np.errstate(divide="ignore"):
            return folded ** self.alpha

    def degree_hint(self):
        # frequency content relevant for alias-free quadrature
        return 1 if self.name == "2+2cos" else 0

    def describe(self):
        out = {"kind": "builtin", "name": self.name}
        if self.name == "constant":
            out["value"] = self.value
        if self.name == "power":
            out["alpha"] = self.alpha
        return out


@dataclass(frozen=True)
class FourierDensity:
    """Density given by a finite one-sided Fourier coefficient list.

    ``coeffs = (c_0, c_1, ..., c_m)`` describes the real trigonometric
    polynomial w(theta) = c_0 + 2 Re sum_{k>=1} c_k e^{i k theta}; c_0 must be
    real and the resulting samples nonnegative.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise InvalidMeasureError("fourier density needs at least c_0")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coeffs):
            raise InvalidMeasureError("fourier density coefficients must be finite")
        scale = max(abs(c) for c in coeffs)
        if abs(coeffs[0].imag) > 1e-10 * max(scale, 1.0):
            raise InvalidMeasureError("fourier density c_0 must be real")
        coeffs = (complex(coeffs[0].real, 0.0),) + coeffs[1:]
        object.__setattr__(self, "coeffs", coeffs)

    def sample(self, thetas):
        thetas = np.asarray(thetas, dtype=np.float64)
        values = np.full_like(thetas, self.coeffs[0].real)
        for k in range(1, len(self.coeffs)):
            values += 2.0 * np.real(self.coeffs[k] * np.exp(1j * k * thetas))
        return _clamp_density(values, "fourier density")

    def degree_hint(self):
        return len(self.coeffs) - 1

    def describe(self):
        return {
            "kind": "fourier",
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }


@dataclass(frozen=True)
class GridDensity:
    """Density known only through samples at theta_j = 2 pi j / len(samples)."""

    samples: tuple

    def __post_init__(self):
        values = _clamp_density(np.asarray(self.samples, dtype=np.float64), "grid density")
        if values.ndim != 1 or values.size < 8 or values.size % 2:
            raise InvalidMeasureError("grid density needs an even number (>= 8) of samples")
        if not np.all(np.isfinite(values)):
            raise InvalidMeasureError("grid density samples must be finite")
        object.__setattr__(self, "samples", tuple(float(v) for v in values))

    @property
    def grid(self):
        return len(self.samples)

    def sample(self, thetas):
        # periodic linear interpolation between the stored aligned nodes
        values = np.asarray(self.samples, dtype=np.float64)
        grid = values.size
        pos = np.mod(np.asarray(thetas, dtype=np.float64), 2.0 * np.pi) * grid / (2.0 * np.pi)
        left = np.floor(pos).astype(np.int64) % grid
        frac = pos - np.floor(pos)
        return values[left] * (1.0 - frac) + values[(left + 1) % grid] * frac

    def degree_hint(self):
        return 0

    def describe(self):
        return {"kind": "grid", "samples": list(self.samples)}


def _quadrature_nodes(density, grid):
    """Return (theta_0, samples) with nodes theta_j = theta_0 + 2 pi j / G."""
    if isinstance(density, GridDensity):
        values = np.asarray(density.samples, dtype=np.float64)
        return 0.0, values
    step = 2.0 * np.pi / grid
    values = _clamp_density(density.sample(midpoint_nodes(grid)), "density")
    if np.any(np.isinf(values)):
        raise InvalidMeasureError("density is singular at a quadrature node")
    return 0.5 * step, values


@dataclass(frozen=True)
class Atom:
    """Point mass on the circle at angle theta in [0, 2 pi)."""

    angle: float
    mass: float

    def __post_init__(self):
        if not (math.isfinite(self.angle) and math.isfinite(self.mass)):
            raise InvalidMeasureError("atom angle and mass must be finite")
        if self.mass <= 0:
            raise InvalidMeasureError(f"atom mass must be positive, got {self.mass}")
        object.__setattr__(self, "angle", float(self.angle) % (2.0 * np.pi))

    def describe(self):
        return {"angle": self.angle, "mass": self.mass}


@dataclass(frozen=True)
class CircleMeasure:
    """Finite nonnegative measure: density part + atoms + Cantor multiple.

    Instances are immutable after construction; every operation on them is a
    pure function, so values can be shared freely across threads.
    """

    ac: BuiltinDensity | FourierDensity | GridDensity | None = None
    atoms: tuple = ()
    cantor_mass: float = 0.0

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms)
        angles = [a.angle for a in atoms]
        if len(set(angles)) != len(angles):
            raise InvalidMeasureError("atom angles must be pairwise distinct")
        if not math.isfinite(self.cantor_mass) or self.cantor_mass < 0:
            raise InvalidMeasureError("cantor mass must be finite and >= 0")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "cantor_mass", float(self.cantor_mass))

    @property
    def is_singular_free(self):
        return not self.atoms and self.cantor_mass == 0.0

    def total_mass(self, grid=None):
        """integral of dM = integral of w dm + sum of atom masses + cantor mass."""
        return float(np.real(fourier_coefficient(self, 0, grid=grid)))

    def to_dict(self):
        out = {}
        if self.ac is not None:
            out["ac"] = self.ac.describe()
        if self.atoms:
            out["atoms"] = [a.describe() for a in self.atoms]
        if self.cantor_mass > 0:
            out["cantor"] = {"mass": self.cantor_mass}
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidMeasureError("measure JSON must be an object")
        known = {"ac", "atoms", "cantor"}
        extra = set(data) - known
        if extra:
            raise InvalidMeasureError(f"unknown measure fields {sorted(extra)}")
        ac = _density_from_dict(data.get("ac"))
        atoms = data.get("atoms", [])
        if not isinstance(atoms, list):
            raise InvalidMeasureError("'atoms' must be a list")
        parsed_atoms = []
        for entry in atoms:
            if not isinstance(entry, dict) or set(entry) != {"angle", "mass"}:
                raise InvalidMeasureError("each atom needs exactly 'angle' and 'mass'")
            parsed_atoms.append(Atom(_as_float(entry["angle"], "atom angle"),
                                     _as_float(entry["mass"], "atom mass")))
        cantor = data.get("cantor", {})
        if not isinstance(cantor, dict) or set(cantor) - {"mass"}:
            raise InvalidMeasureError("'cantor' must be an object with a 'mass' field")
        mass = _as_float(cantor.get("mass", 0.0), "cantor mass")
        return cls(ac=ac, atoms=tuple(parsed_atoms), cantor_mass=mass)


def _as_float(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidMeasureError(f"{what} must be a number, got {value!r}")
    return float(value)


def _density_from_dict(data):
    if data is None:
        return None
    if not isinstance(data, dict):
        raise InvalidMeasureError("'ac' must be an object")
    kind = data.get("kind")
    if kind == "builtin":
        extra = set(data) - {"kind", "name", "value", "alpha"}
        if extra:
            raise InvalidMeasureError(f"unknown builtin fields {sorted(extra)}")
        name = data.get("name")
        if name not in BUILTIN_NAMES:
            raise InvalidMeasureError(f"unknown builtin density {name!r}")
        kwargs = {}
        if "value" in data:
            kwargs["value"] = _as_float(data["value"], "builtin value")
        if "alpha" in data:
            kwargs["alpha"] = _as_float(data["alpha"], "builtin alpha")
        return BuiltinDensity(name, **kwargs)
    if kind == "fourier":
        if set(data) != {"kind", "coeffs"} or not isinstance(data["coeffs"], list):
            raise InvalidMeasureError("fourier density needs a 'coeffs' list")
        coeffs = []
        for c in data["coeffs"]:
            if isinstance(c, (int, float)) and not isinstance(c, bool):
                coeffs.append(complex(c))
            elif isinstance(c, list) and len(c) == 2:
                coeffs.append(complex(_as_float(c[0], "coeff"), _as_float(c[1], "coeff")))
            else:
                raise InvalidMeasureError("fourier coeffs must be numbers or [re, im] pairs")
        return FourierDensity(tuple(coeffs))
    if kind == "grid":
        if set(data) != {"kind", "samples"} or not isinstance(data["samples"], list):
            raise InvalidMeasureError("grid density needs a 'samples' list")
        return GridDensity(tuple(_as_float(s, "grid sample") for s in data["samples"]))
    raise InvalidMeasureError(f"unknown density kind {kind!r}")


@dataclass(frozen=True)
class CoeffSequence:
    """Hermitian two-sided coefficient sequence stored one-sided.

    ``entries[n]`` holds t_n for 0 <= n <= n_max; t_{-n} is recovered as the
    exact conjugate, so Hermitian symmetry holds by construction.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 1 or entries.size == 0:
            raise InvalidMeasureError("coefficients must form a nonempty 1-d sequence")
        if not np.all(np.isfinite(entries)):
            raise InvalidMeasureError("coefficients must be finite")
        scale = np.abs(entries).max()
        if abs(entries[0].imag) > 1e-10 * max(scale, 1.0):
            raise InvalidMeasureError(f"t_0 must be real, got {entries[0]}")
        entries[0] = entries[0].real
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n_max(self):
        return self.entries.size - 1

    @property
    def t0(self):
        return float(self.entries[0].real)

    def at(self, n):
        """t_n for any |n| <= n_max, via Hermitian symmetry."""
        if abs(n) > self.n_max:
            raise InsufficientCutoffError(f"|n|={abs(n)} beyond cutoff {self.n_max}")
        return complex(self.entries[n]) if n >= 0 else complex(np.conj(self.entries[-n]))

    def two_sided(self, n_max=None):
        """Array [t_{-N}, ..., t_0, ..., t_N] for N = n_max (default: cutoff)."""
        n = self.n_max if n_max is None else int(n_max)
        if n > self.n_max:
            raise InsufficientCutoffError(f"requested |n|<={n} beyond cutoff {self.n_max}")
        pos = self.entries[: n + 1]
        return np.concatenate([np.conj(pos[1:][::-1]), pos])


def _resolve_grid(measure_or_density, n_max, grid):
    """Pick a quadrature grid resolving frequency n_max, or validate the
    caller's explicit choice."""
    density = measure_or_density
    if isinstance(density, CircleMeasure):
        density = density.ac
    need = MIN_OVERSAMPLING * max(
        int(n_max), density.degree_hint() if density is not None else 0, 1
    )
    if isinstance(density, GridDensity):
        if grid is not None and grid != density.grid:
            raise GridResolutionError(
                f"grid {grid} conflicts with the density's own grid {density.grid}"
            )
        if density.grid < need:
            raise GridResolutionError(
                f"grid {density.grid} too coarse for |n| <= {n_max} "
                f"(needs >= {need})"
            )
        return density.grid
    if grid is None:
        return max(default_grid(), _next_pow2(need))
    grid = int(grid)
    if grid < 8 or grid % 2:
        raise GridResolutionError(f"grid must be even and >= 8, got {grid}")
    if grid < need:
        raise GridResolutionError(
            f"grid {grid} too coarse for |n| <= {n_max} (needs >= {need})"
        )
    return grid


def _ac_table(density, n_max, grid):
    """One FFT pass of the periodic trapezoid rule: t_n for 0 <= n <= n_max."""
    theta0, values = _quadrature_nodes(density, grid)
    G = values.size
    bins = np.fft.fft(values)[: n_max + 1] / G
    if theta0:
        bins = bins * np.exp(-1j * theta0 * np.arange(n_max + 1))
    return bins


def fourier_coefficient(measure, n, grid=None):
    """t_n = integral of z^{-n} dM(z), additive over the measure's parts."""
    n = int(n)
    grid = _resolve_grid(measure, abs(n), grid)
    total = 0j
    if measure.ac is not None:
        theta0, values = _quadrature_nodes(measure.ac, grid)
        G = values.size
        nodes = theta0 + 2.0 * np.pi * np.arange(G) / G
        total += np.sum(values * np.exp(-1j * n * nodes)) / G
    for atom in measure.atoms:
        total += atom.mass * np.exp(-1j * n * atom.angle)
    if measure.cantor_mass > 0:
        total += measure.cantor_mass * _kernels.cantor_products(np.array([n]))[0]
    return complex(total)


def coefficient_table(measure, n_max, grid=None):
    """CoeffSequence with entries t_0..t_{n_max} (t_{-n} by conjugation)."""
    n_max = int(n_max)
    if n_max < 0:
        raise InvalidMeasureError(f"n_max must be >= 0, got {n_max}")
    grid = _resolve_grid(measure, n_max, grid)
    entries = np.zeros(n_max + 1, dtype=np.complex128)
    if measure.ac is not None:
        entries += _ac_table(measure.ac, n_max, grid)
    if measure.atoms:
        ns = np.arange(n_max + 1)
        for atom in measure.atoms:
            entries += atom.mass * np.exp(-1j * ns * atom.angle)
    if measure.cantor_mass > 0:
        entries += measure.cantor_mass * _kernels.cantor_products(np.arange(n_max + 1))
    # the parts are real measures, so t_0 picks up no imaginary residue
    return CoeffSequence(entries)


def gamma_floor(measure, grid=None):
    """Largest gamma with M(X) >= gamma * m(X) for all Borel X.

    Only the density part can hold the measure above a multiple of Lebesgue
    measure, so this is its minimum over a doubled grid (which contains both
    the aligned and the midpoint nodes); 0 without a density part.
    """
    if measure.ac is None:
        return 0.0
    if isinstance(measure.ac, GridDensity):
        return float(min(measure.ac.samples))
    grid = _resolve_grid(measure, 1, grid)
    thetas = np.pi * np.arange(2 * grid) / grid
    values = _clamp_density(measure.ac.sample(thetas), "density")
    return float(values.min())
