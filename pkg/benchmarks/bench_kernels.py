#!/usr/bin/env python3
"""Benchmark the numba transport kernel against the pure-numpy fallback.

Times the hot path (per-edge products of matrix exponentials) on mesh-scale
workloads, plus one end-to-end curvature run for context.  The numba path is
in play whenever the package imports it; setting MASLOVCW_NO_NUMBA=1 makes
the library itself fall back to the numpy implementation benchmarked here.
"""

import time

import numpy as np

from maslovcw import _kernels
from maslovcw.connections import build_collar_connection
from maslovcw.curvature import chern_weil_index, edge_transports
from maslovcw.loops import random_frame_loop
from maslovcw.mesh import Mesh2D


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_transport_chain():
    rng = np.random.default_rng(0)
    print(f"{'workload':<28}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for E, s, n in ((4096, 1, 2), (16384, 1, 4), (32768, 2, 4), (65536, 1, 8)):
        G = rng.normal(size=(E, s, n, n)) + 1j * rng.normal(size=(E, s, n, n))
        G = 0.2 * (G - G.conj().transpose(0, 1, 3, 2))
        t_np = timeit(_kernels.transport_chain_numpy, G)
        row = f"E={E} s={s} n={n}"
        if _kernels.USING_NUMBA:
            _kernels.transport_chain(G)  # compile before timing
            t_nb = timeit(_kernels.transport_chain, G)
            print(f"{row:<28}{t_np*1e3:>10.1f}ms{t_nb*1e3:>10.1f}ms{t_np/t_nb:>9.2f}x")
        else:
            print(f"{row:<28}{t_np*1e3:>10.1f}ms{'n/a':>12}{'':>10}")


def bench_end_to_end():
    rng = np.random.default_rng(1)
    loop, _ = random_frame_loop(rng, 4, 512)
    spec = build_collar_connection(loop)
    mesh = Mesh2D("disc", 32, 512)

    def run():
        from fractions import Fraction

        D = edge_transports(spec, mesh, substeps=2)
        chern_weil_index(D, Fraction(1))

    run()
    print(f"\nend-to-end curvature run (rank 4, 32x512 mesh, 2 substeps): "
          f"{timeit(run, repeats=3)*1e3:.0f} ms "
          f"[{'numba' if _kernels.USING_NUMBA else 'numpy'} backend]")


if __name__ == "__main__":
    print(f"backend in use: {'numba' if _kernels.USING_NUMBA else 'numpy fallback'}")
    bench_transport_chain()
    bench_end_to_end()
