"""Benchmark the numba and numpy kernel backends against each other.

Times the two hot paths (Euler-Maruyama stepping and polynomial grid
evaluation) on each available backend and prints a small table, plus the
max cross-backend deviation as a sanity check.

Run:  python3 benchmarks/bench_kernels.py [--paths 200000] [--steps 200]
"""

import argparse
import time

import numpy as np

from ou_spectral import GaussianDensity, build_model, expand_gaussian, kernels
from ou_spectral.spectral import _combined_poly


def time_call(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=200000)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--grid", type=int, default=250000)
    ap.add_argument("--order", type=int, default=8)
    args = ap.parse_args()

    A = np.array([[-1.0, -2.0], [2.0, -1.0]])
    model = build_model(A, np.eye(2))
    LB = np.linalg.cholesky(model.B)
    L0 = np.linalg.cholesky(model.Sigma)
    mean0 = np.array([0.3, 0.0])

    F0 = GaussianDensity(np.array([0.5, -0.3]), 0.6 * model.Sigma)
    expansion = expand_gaussian(model, F0, args.order)
    poly = _combined_poly(expansion, 0.5)
    exps, coeffs = poly.to_arrays()
    rng = np.random.default_rng(0)
    points = rng.normal(size=(args.grid, 2))

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    if not kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy backend is timed")

    em_times, em_outs = {}, {}
    ev_times, ev_outs = {}, {}
    for backend in backends:
        kernels.set_backend(backend)
        # one untimed call absorbs JIT compilation
        kernels.em_paths(A, LB, mean0, L0, 100, 10, 0.01, 0)
        kernels.eval_poly_grid(exps, coeffs, points[:100])
        em_times[backend], em_outs[backend] = time_call(
            lambda: kernels.em_paths(A, LB, mean0, L0, args.paths, args.steps, 0.005, 1)
        )
        ev_times[backend], ev_outs[backend] = time_call(
            lambda: kernels.eval_poly_grid(exps, coeffs, points)
        )

    print(f"\nem_paths: {args.paths} paths x {args.steps} steps, dim 2")
    print(f"eval_poly_grid: {len(coeffs)} terms x {args.grid} points")
    print(f"\n{'kernel':<16}" + "".join(f"{b:>12}" for b in backends))
    print(f"{'em_paths':<16}" + "".join(f"{em_times[b]:>11.3f}s" for b in backends))
    print(f"{'eval_poly_grid':<16}" + "".join(f"{ev_times[b]:>11.3f}s" for b in backends))
    if len(backends) == 2:
        em_diff = np.max(np.abs(em_outs["numba"] - em_outs["numpy"]))
        ev_diff = np.max(np.abs(ev_outs["numba"] - ev_outs["numpy"]))
        print(f"\nmax cross-backend |diff|: em_paths {em_diff:.3e}, "
              f"eval_poly_grid {ev_diff:.3e}")
        print(f"speedup numba/numpy: em_paths {em_times['numpy'] / em_times['numba']:.2f}x, "
              f"eval_poly_grid {ev_times['numpy'] / ev_times['numba']:.2f}x")


if __name__ == "__main__":
    main()
