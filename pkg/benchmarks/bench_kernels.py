#!/usr/bin/env python3
"""Timing comparison of the numba kernels against their pure-numpy twins.

Run as `python benchmarks/bench_kernels.py [--n 64] [--reps 20]`. Setting
CRITNS_DISABLE_NUMBA=1 makes the dispatched path identical to the numpy
column (useful to confirm the env flag works end to end).
"""

import argparse
import time

import numpy as np

from critns import _kernels as K


def timeit(fn, reps):
    fn()
    start = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - start) / reps


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=64)
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()
    n = args.n
    rng = np.random.default_rng(0)
    phys = rng.standard_normal((3, n, n, n))
    nz = n // 2 + 1
    spec = (rng.standard_normal((3, n, n, nz))
            + 1j * rng.standard_normal((3, n, n, nz)))
    t6 = (rng.standard_normal((6, n, n, nz))
          + 1j * rng.standard_normal((6, n, n, nz)))
    k1 = np.fft.fftfreq(n, d=1.0 / n)
    kx, ky, kz = np.meshgrid(k1, k1, k1[:nz], indexing="ij")
    k2 = kx * kx + ky * ky + kz * kz
    inv_k2 = np.where(k2 > 0, 1.0 / np.maximum(k2, 1e-300), 0.0)
    weight = np.full(k2.shape, 2.0)
    weight[:, :, 0] = 1.0
    weight[:, :, -1] = 1.0
    keep = k2 <= (2.0 / 3.0 * (n // 2)) ** 2
    tail = ~keep
    e_half = np.exp(-k2 * 5e-4)
    e_full = e_half * e_half
    stages = [spec, spec * 0.5, spec * 0.25, spec * 0.125]

    cases = [
        ("tensor_products", K.tensor_products, K.tensor_products_np,
         (phys[0], phys[1], phys[2])),
        ("magnitude_max", K.magnitude_max, K.magnitude_max_np,
         (phys[0], phys[1], phys[2])),
        ("weighted_spectral_sum", K.weighted_spectral_sum,
         K.weighted_spectral_sum_np, (spec, k2, weight, -1.0)),
        ("assemble_divergence", K.assemble_divergence,
         K.assemble_divergence_np, (t6, kx, ky, kz, keep)),
        ("leray_apply", K.leray_apply, K.leray_apply_np,
         (spec, kx, ky, kz, inv_k2)),
        ("ifrk4_combine", K.ifrk4_combine, K.ifrk4_combine_np,
         (spec, *stages, e_half, e_full, 1e-3)),
        ("health_stats", K.health_stats, K.health_stats_np, (spec, tail)),
    ]

    print(f"kernel timings at n={n} (numba enabled: {K.NUMBA_ENABLED})")
    print(f"{'kernel':24s} {'dispatched':>12s} {'numpy':>12s} {'speedup':>8s}")
    for name, fast, slow, arg in cases:
        t_fast = timeit(lambda: fast(*arg), args.reps)
        t_slow = timeit(lambda: slow(*arg), args.reps)
        print(f"{name:24s} {t_fast * 1e3:9.2f} ms {t_slow * 1e3:9.2f} ms "
              f"{t_slow / t_fast:7.2f}x")


if __name__ == "__main__":
    main()
