#!/usr/bin/env python3
"""Benchmark the hot Gram-series kernels: numba JIT vs numpy fallback.

Both implementations live in todahess._kernels and are callable directly, so
this compares them in one process.  Run with TODAHESS_NUMBA=0 to check the
dispatch path itself falls back.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import math
import sys
import time

import numpy as np

from todahess import _kernels
from todahess.maps import thresholds


def time_call(fn, *args, repeats=3):
    best = math.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_entry_series(quick):
    print("== single-entry series (s=3, p_a=1, p_b=4, delta=1)")
    print(f"{'eta':>9} {'terms':>9} {'numpy (s)':>11} {'numba (s)':>11} {'speedup':>8}")
    zc = float(thresholds(3).zeta_c)
    etas = (0.9, 0.99, 0.999) if quick else (0.9, 0.99, 0.999, 0.9999, 0.99999)
    for eta in etas:
        args = (3, 1, 4, 1, eta * zc, 1e-12, 0.0, eta * eta, 50_000_000)
        t_np, (v_np, n_terms, _) = time_call(_kernels._gram_series_np, *args)
        if _kernels.HAS_NUMBA:
            _kernels._gram_series_nb(*args)  # warm the JIT
            t_nb, (v_nb, _, _) = time_call(_kernels._gram_series_nb, *args)
            rel = abs(v_nb - v_np) / abs(v_np)
            assert rel < 1e-9, f"paths disagree: rel={rel:.2e}"
            print(f"{eta:>9} {n_terms:>9} {t_np:>11.4f} {t_nb:>11.4f} "
                  f"{t_np / t_nb:>7.1f}x")
        else:
            print(f"{eta:>9} {n_terms:>9} {t_np:>11.4f} {'-':>11} {'-':>8}")


def bench_block_matrix(quick):
    print("\n== block matrix assembly (s=3, q=1, beta=1)")
    print(f"{'eta':>9} {'N':>4} {'numpy (s)':>11} {'numba (s)':>11} {'speedup':>8}")
    zc = float(thresholds(3).zeta_c)
    cases = [(0.99, 20)] if quick else [(0.99, 20), (0.999, 30), (0.9999, 30)]
    for eta, n in cases:
        log_m = math.log(1.5)
        args_common = (3, 1, 1.0, eta * zc, 1e-12)

        def run_np():
            out = np.empty((n, n))
            for j2 in range(n):
                for j1 in range(j2 + 1):
                    pa, pb = 1 + j1 * 3, 1 + j2 * 3
                    log_pref = (
                        -(2.5) * (math.log(pa) + math.log(pb))
                        - (pa + pb) * log_m
                        - 0.5 * (math.log(pa) + math.log(pb))
                    )
                    val, _, _ = _kernels._gram_series_np(
                        3, pa, pb, j2 - j1, eta * zc, 1e-12, log_pref,
                        eta * eta, 50_000_000,
                    )
                    out[j1, j2] = out[j2, j1] = val
            return out

        t_np, m_np = time_call(run_np, repeats=1)
        if _kernels.HAS_NUMBA:
            _kernels._block_matrix_nb(
                *args_common, log_m, eta * eta, n, 50_000_000
            )
            t_nb, m_nb = time_call(
                _kernels._block_matrix_nb,
                *args_common, log_m, eta * eta, n, 50_000_000,
                repeats=1,
            )
            rel = np.max(np.abs(m_nb - m_np)) / np.max(np.abs(m_np))
            assert rel < 1e-9, f"paths disagree: rel={rel:.2e}"
            print(f"{eta:>9} {n:>4} {t_np:>11.3f} {t_nb:>11.3f} "
                  f"{t_np / t_nb:>7.1f}x")
        else:
            print(f"{eta:>9} {n:>4} {t_np:>11.3f} {'-':>11} {'-':>8}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    print(f"numba active: {_kernels.HAS_NUMBA}")
    bench_entry_series(args.quick)
    bench_block_matrix(args.quick)
    return 0


if __name__ == "__main__":
    sys.exit(main())
