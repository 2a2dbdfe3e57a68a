import numpy as np
import pytest

import toepforms
from toepforms import _kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=_kernels.available_backends())
def kernel_backend(request, monkeypatch):
    """Run the test under each available kernel backend."""
    impl = _kernels.load_backend(request.param)
    monkeypatch.setattr(_kernels, "_impl", impl)
    monkeypatch.setattr(_kernels, "_impl_name", request.param)
    return request.param


@pytest.fixture
def lebesgue():
    return toepforms.CircleMeasure(ac=toepforms.BuiltinDensity("lebesgue"))


@pytest.fixture
def two_two_cos():
    return toepforms.CircleMeasure(ac=toepforms.BuiltinDensity("2+2cos"))


@pytest.fixture
def atom_plus_lebesgue():
    return toepforms.CircleMeasure(
        ac=toepforms.BuiltinDensity("lebesgue"),
        atoms=(toepforms.Atom(0.0, 1.0),),
    )


@pytest.fixture
def cantor_unit():
    return toepforms.CircleMeasure(cantor_mass=1.0)


def random_trig_density(rng, degree=5, scale=1.0):
    """Random nonnegative trigonometric-polynomial density w = |p|^2."""
    p = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    p *= scale
    # one-sided coefficients of |p(z)|^2: c_k = sum_j p_{j+k} conj(p_j)
    coeffs = [complex(np.sum(p[k:] * np.conj(p[: p.size - k]))) for k in range(p.size)]
    return toepforms.FourierDensity(tuple(coeffs))


def random_mixture(rng, max_atoms=3, with_cantor=False):
    """Random measure built from smooth densities and a few atoms."""
    choice = rng.integers(0, 3)
    if choice == 0:
        ac = toepforms.BuiltinDensity("constant", value=float(rng.uniform(0.1, 3.0)))
    elif choice == 1:
        ac = toepforms.BuiltinDensity("2+2cos")
    else:
        ac = random_trig_density(rng)
    n_atoms = int(rng.integers(0, max_atoms + 1))
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n_atoms)
    masses = rng.uniform(0.1, 2.0, size=n_atoms)
    atoms = tuple(toepforms.Atom(float(a), float(m)) for a, m in zip(angles, masses))
    cantor = float(rng.uniform(0.2, 1.5)) if with_cantor else 0.0
    return toepforms.CircleMeasure(ac=ac, atoms=atoms, cantor_mass=cantor)


def oracle_coefficients(measure, ns):
    """Independent coefficient oracle: closed forms per component, scalar
    python loops for the transcendental parts."""
    import cmath
    import math

    out = []
    for n in ns:
        total = 0j
        ac = measure.ac
        if isinstance(ac, toepforms.BuiltinDensity):
            if ac.name in ("lebesgue", "constant"):
                value = 1.0 if ac.name == "lebesgue" else ac.value
                total += value if n == 0 else 0.0
            elif ac.name == "2+2cos":
                total += {0: 2.0, 1: 1.0, -1: 1.0}.get(n, 0.0)
            else:
                raise NotImplementedError("no closed form for power weights")
        elif isinstance(ac, toepforms.FourierDensity):
            if abs(n) < len(ac.coeffs):
                c = ac.coeffs[abs(n)]
                total += c if n >= 0 else c.conjugate()
        elif ac is not None:
            raise NotImplementedError(type(ac))
        for atom in measure.atoms:
            total += atom.mass * cmath.exp(-1j * n * atom.angle)
        if measure.cantor_mass:
            product = 1.0
            angle = 2.0 * math.pi * abs(n) / 3.0
            while abs(angle) >= 1e-8:
                product *= math.cos(angle)
                angle /= 3.0
            total += measure.cantor_mass * product
        out.append(total)
    return np.asarray(out, dtype=np.complex128)
