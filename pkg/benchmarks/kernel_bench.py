"""Time the compiled kernel backend against the pure-numpy fallback.

Usage:
    python benchmarks/kernel_bench.py [--sizes 64,256,1024,2048] [--repeats 5]

Each kernel runs on identical inputs under every available backend; the
table reports the best-of-repeats wall time and the speedup of the compiled
core over the fallback.
"""

import argparse
import time

import numpy as np

from toepforms import _kernels


def _best_time(func, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def _bench_case(name, make_args, backends, repeats):
    rows = []
    args = make_args()
    results = {}
    for backend_name in backends:
        impl = _kernels.load_backend(backend_name)
        func = getattr(impl, name)
        results[backend_name] = func(*args)
        rows.append((backend_name, _best_time(lambda: func(*args), repeats)))
    if len(results) == 2:
        a, b = results.values()
        drift = np.max(np.abs(np.atleast_1d(a) - np.atleast_1d(b)))
        scale = max(np.max(np.abs(np.atleast_1d(a))), 1.0)
        assert drift <= 1e-12 * scale, f"{name}: backends disagree by {drift}"
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="64,256,1024,2048")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=2024)
    opts = parser.parse_args()

    sizes = [int(s) for s in opts.sizes.split(",")]
    backends = _kernels.available_backends()
    rng = np.random.default_rng(opts.seed)
    print(f"backends: {', '.join(backends)} (active: {_kernels.backend_name()})")
    header = f"{'kernel':<16} {'size':>6} " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for size in sizes:
        t = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        t[0] = abs(t[0])
        g = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        q = rng.standard_normal(2 * size - 1)
        ns = rng.integers(0, 3**12, size=size)
        cases = [
            ("toeplitz_form", lambda: (t.copy(), g.copy())),
            ("hankel_form", lambda: (q.copy(), g.copy())),
            ("cantor_products", lambda: (ns.copy(),)),
        ]
        for name, make_args in cases:
            rows = _bench_case(name, make_args, backends, opts.repeats)
            line = f"{name:<16} {size:>6} "
            line += "".join(f"{seconds * 1e3:>10.3f}ms" for _, seconds in rows)
            if len(rows) == 2:
                line += f"{rows[1][1] / rows[0][1]:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
