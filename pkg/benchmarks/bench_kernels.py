"""Benchmark the Cython kernels against the pure-NumPy fallback.

Run:  python benchmarks/bench_kernels.py
"""
import time

import numpy as np

from drivephase.kernels import _ref

try:
    from drivephase.kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, *args, repeats=5, number=20):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(number):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def make_slices(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 0.01, n), rng.uniform(-0.05, 0.05, n)


def make_cache(seed=1):
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(2):
        q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        mats.append(q)
    return np.array(mats)


def main():
    rho = np.array([[1, 0], [0, 0]], dtype=complex)
    theta, phi = make_slices(1200)       # one 1.2 us pulse at 1 ns steps
    cache = make_cache()
    rng = np.random.default_rng(2)
    idx = rng.integers(0, 2, size=50_000).astype(np.int64)   # ~50k RB pulses
    axes = rng.uniform(-np.pi, np.pi, size=50_000)

    cases = [
        ("pulse unitary (1200 slices)", "su2_product", (theta, phi)),
        ("density pulse (1200 slices)", "density_product", (theta, phi, 0.9999, rho)),
        ("RB product (50k pulses)", "conjugated_product", (cache, idx, axes)),
    ]
    print(f"{'kernel':32s} {'numpy':>12s} {'cython':>12s} {'speedup':>9s}")
    for label, name, args in cases:
        t_ref = timeit(getattr(_ref, name), *args)
        if _fast is None:
            print(f"{label:32s} {t_ref * 1e3:9.3f} ms {'n/a':>12s}")
            continue
        t_fast = timeit(getattr(_fast, name), *args)
        a = getattr(_ref, name)(*args)
        b = getattr(_fast, name)(*args)
        assert np.abs(a - b).max() < 1e-11, f"{name}: backends disagree"
        print(
            f"{label:32s} {t_ref * 1e3:9.3f} ms {t_fast * 1e3:9.3f} ms "
            f"{t_ref / t_fast:8.1f}x"
        )


if __name__ == "__main__":
    main()
