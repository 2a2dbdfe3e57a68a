"""Kernel backend selection.

The hot inner loops (quadratic-form double sums, Cantor coefficient
products) exist twice: a compiled Cython extension (``_native``) and a
pure-numpy fallback (``_ref``). The compiled backend is selected at import
when present; set ``TOEPFORMS_PURE_PYTHON=1`` to force the fallback. Both
backends are exercised by the test suite and timed against each other in
``benchmarks/kernel_bench.py``.
"""

import importlib
import os

import numpy as np

from toepforms._kernels import _ref

BACKEND_NAMES = ("native", "python")


def load_backend(name):
    """Import a kernel backend by name ('native' or 'python')."""
    if name == "python":
        return _ref
    if name == "native":
        return importlib.import_module("toepforms._kernels._native")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends():
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        load_backend("native")
    except ImportError:
        pass
    else:
        names.insert(0, "native")
    return tuple(names)


def _select():
    if os.environ.get("TOEPFORMS_PURE_PYTHON"):
        return _ref, "python"
    try:
        return load_backend("native"), "native"
    except ImportError:
        return _ref, "python"


_impl, _impl_name = _select()


def backend_name():
    """Name of the backend currently dispatching the kernels."""
    return _impl_name


def toeplitz_form(t, g):
    """sum_{n,m} t_{n-m} g_m conj(g_n) with one-sided Hermitian t_0..t_N."""
    t = np.ascontiguousarray(t, dtype=np.complex128)
    g = np.ascontiguousarray(g, dtype=np.complex128)
    return _impl.toeplitz_form(t, g)


def hankel_form(q, g):
    """sum_{n,m} q_{n+m} g_m conj(g_n) with real moments q_0..q_M."""
    q = np.ascontiguousarray(q, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.complex128)
    return _impl.hankel_form(q, g)


def cantor_products(ns):
    """prod_{k>=1} cos(2 pi n 3^{-k}) for each integer n in ns."""
    ns = np.ascontiguousarray(ns, dtype=np.int64)
    return _impl.cantor_products(ns)
