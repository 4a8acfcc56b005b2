"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run as ``python -m dgff.bench``. Rough desk-scale sizes by default; pass
``--quick`` for a fast smoke run.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import kernels


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _report(name, numpy_s, numba_s):
    if numba_s is None:
        print(f"{name:28s} numpy {numpy_s * 1e3:9.2f} ms   numba unavailable")
    else:
        print(f"{name:28s} numpy {numpy_s * 1e3:9.2f} ms   numba {numba_s * 1e3:9.2f} ms"
              f"   speedup {numpy_s / numba_s:6.1f}x")


def run(quick: bool = False) -> None:
    dim = 40 if quick else 120
    draws = 20_000 if quick else 1_000_000
    rng = np.random.default_rng(7)
    sym = rng.normal(size=(dim, dim))
    sym = (sym + sym.T) / 2.0
    spd = sym @ sym.T + dim * np.eye(dim)
    rhs = rng.normal(size=(dim, dim))
    streams = np.arange(64)

    if kernels.HAVE_NUMBA:
        kernels.jacobi_sweeps_numba(spd.copy(), 1e-12, 100)
        low, _ = kernels.cholesky_numba(spd)
        kernels.cholesky_solve_numba(low, rhs)
        kernels.normal_block_numba(1, streams, 0, 16)

    print(f"kernel benchmark  (dim={dim}, draws={draws}, numba "
          f"{'on' if kernels.HAVE_NUMBA else 'missing'}, "
          f"dispatch={'numpy' if not kernels.USE_NUMBA else 'numba'})")

    nb = None
    if kernels.HAVE_NUMBA:
        nb = _time(lambda: kernels.jacobi_sweeps_numba(spd.copy(), 1e-12, 100))
    _report("jacobi_sweeps", _time(lambda: kernels.jacobi_sweeps_numpy(spd.copy(), 1e-12, 100)), nb)

    nb = None
    if kernels.HAVE_NUMBA:
        nb = _time(lambda: kernels.cholesky_numba(spd))
    _report("cholesky", _time(lambda: kernels.cholesky_numpy(spd)), nb)

    low, _ = kernels.cholesky_numpy(spd)
    nb = None
    if kernels.HAVE_NUMBA:
        nb = _time(lambda: kernels.cholesky_solve_numba(low, rhs))
    _report("cholesky_solve", _time(lambda: kernels.cholesky_solve_numpy(low, rhs)), nb)

    per_stream = max(draws // len(streams), 1)
    nb = None
    if kernels.HAVE_NUMBA:
        nb = _time(lambda: kernels.normal_block_numba(1, streams, 0, per_stream))
    _report("normal_block", _time(lambda: kernels.normal_block_numpy(1, streams, 0, per_stream)), nb)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args(argv)
    run(quick=args.quick)


if __name__ == "__main__":
    main()
