"""Benchmark: compiled kernels versus the pure NumPy backend.

Times the two hot loops on representative sizes:

* the separable implicit-addition solver (per-node monotone bisection),
* the brute-force Legendre envelope behind the polar dual.

Run with ``python benchmarks/bench_kernels.py``. The compiled backend
must be built (``pip install -e .``); the script imports both modules
directly so no environment variable juggling is needed.
"""

import time

import numpy as np

from orliczmeasure._kernels import _solve_py

try:
    from orliczmeasure._kernels import _solve
except ImportError:
    _solve = None


def _time(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_solver():
    rng = np.random.default_rng(0)
    print("separable implicit solver (m=3, power exponents 0.5/2/-1 mixed)")
    alphas = np.array([1.0, 0.7, 1.3])
    powers = np.array([2.0, 0.5, 3.0])
    tau = 0.5  # any valid upper-bracket normalizer works for timing
    for n in (10_000, 100_000, 400_000):
        vals = rng.uniform(0.1, 5.0, size=(3, n))
        t_py, out_py = _time(_solve_py.solve_separable, alphas, powers, vals, tau, False)
        line = f"  n={n:>7}: numpy {t_py * 1e3:8.1f} ms"
        if _solve is not None:
            t_c, out_c = _time(_solve.solve_separable, alphas, powers, vals, tau, False)
            agree = np.max(np.abs(out_py - out_c) / out_py)
            line += f" | compiled {t_c * 1e3:8.1f} ms | speedup {t_py / t_c:5.1f}x" \
                    f" | max rel diff {agree:.1e}"
        print(line)


def bench_legendre():
    rng = np.random.default_rng(1)
    print("brute-force Legendre envelope (polar dual inner loop)")
    for n_nodes, dim in ((512, 1), (4096, 1), (64 * 64, 2), (128 * 128, 2)):
        if dim == 1:
            xs = np.linspace(-8, 8, n_nodes)[:, None]
        else:
            side = int(round(n_nodes ** 0.5))
            ax = np.linspace(-8, 8, side)
            xx, yy = np.meshgrid(ax, ax, indexing="ij")
            xs = np.column_stack([xx.ravel(), yy.ravel()])
        psi = 0.5 * np.sum(xs * xs, axis=1) + rng.normal(scale=0.01, size=len(xs))
        t_py, (v_py, i_py) = _time(_solve_py.legendre_envelope, xs, psi, xs)
        line = f"  N={len(xs):>6} (dim {dim}): numpy {t_py * 1e3:8.1f} ms"
        if _solve is not None:
            t_c, (v_c, i_c) = _time(_solve.legendre_envelope, xs, psi, xs)
            agree = np.max(np.abs(v_py - v_c))
            line += f" | compiled {t_c * 1e3:8.1f} ms | speedup {t_py / t_c:5.1f}x" \
                    f" | max abs diff {agree:.1e}"
        print(line)


if __name__ == "__main__":
    if _solve is None:
        print("compiled backend not available; timing the NumPy backend only\n")
    bench_solver()
    print()
    bench_legendre()
