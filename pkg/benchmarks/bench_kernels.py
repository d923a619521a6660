"""Throughput benchmark: compiled vs pure sweep kernels, and full ensembles.

Usage:
    python benchmarks/bench_kernels.py [--countries N ...] [--runs R] [--repeat K]

Reports, for each network size:
  * single-sweep time per backend (median of --repeat timed batches),
  * full-ensemble wall clock per backend,
  * the compiled/pure speedup.

The numbers are indicative only; both backends are exercised against the
same matrices and identical RNG streams, so relative timings are fair.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from wtncur import (
    CurrencyConfig,
    EnsembleSpec,
    TcpState,
    TradeCoupling,
    flow_statistics,
    run_ensemble,
    sweep,
    synthetic_wtn,
    weight_vectors,
)
from wtncur.backends import compiled_available, get_kernels

DEFAULT_BLOCKS = ((9.0, 2.0), (6.0, 1.0), (3.0, 1.0))


def bench_sweep(coupling: TradeCoupling, backend: str, batches: int, sweeps: int) -> float:
    """Median seconds per sweep over `batches` timed batches."""
    kernels = get_kernels(backend)
    n = coupling.matrix_t.shape[0]
    rng = np.random.default_rng(2024)
    times = []
    for _ in range(batches):
        state = TcpState(
            prefs=rng.integers(0, 3, n).astype(np.int8),
            frozen=np.zeros(n, dtype=bool),
            n_currencies=3,
        )
        orders = [rng.permutation(n) for _ in range(sweeps)]
        t0 = time.perf_counter()
        for order in orders:
            sweep(coupling, state, order=order, kernels=kernels)
        times.append((time.perf_counter() - t0) / sweeps)
    return statistics.median(times)


def bench_ensemble(stats, cfg: CurrencyConfig, backend: str) -> float:
    t0 = time.perf_counter()
    run_ensemble(EnsembleSpec.from_config(cfg), cfg, stats, backend=backend)
    return time.perf_counter() - t0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--countries", type=int, nargs="+", default=[50, 100, 194],
        help="Network sizes to benchmark.",
    )
    parser.add_argument(
        "--runs", type=int, default=2000, help="Ensemble runs per backend."
    )
    parser.add_argument(
        "--repeat", type=int, default=5, help="Timed batches per sweep benchmark."
    )
    parser.add_argument(
        "--sweeps", type=int, default=200, help="Sweeps per timed batch."
    )
    args = parser.parse_args()

    backends = ["pure"] + (["compiled"] if compiled_available() else [])
    print(f"available backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("note: compiled backend unavailable; showing pure timings only")

    for n in args.countries:
        m = synthetic_wtn(n, DEFAULT_BLOCKS, rng=12345, year=2019)
        stats = flow_statistics(m)
        coupling = TradeCoupling.from_statistics(stats, weight_vectors(stats))
        cfg = CurrencyConfig(tau_max=10, n_runs=args.runs)

        print(f"\nN={n} ({args.runs} ensemble runs, tau_max=10)")
        per_sweep = {}
        for backend in backends:
            per_sweep[backend] = bench_sweep(coupling, backend, args.repeat, args.sweeps)
            rate = 1.0 / per_sweep[backend]
            print(f"  sweep     {backend:>8}: {per_sweep[backend] * 1e6:9.1f} us/sweep "
                  f"({rate:,.0f} sweeps/s)")
        for backend in backends:
            elapsed = bench_ensemble(stats, cfg, backend)
            print(f"  ensemble  {backend:>8}: {elapsed:9.2f} s")
        if "compiled" in per_sweep and "pure" in per_sweep:
            print(f"  sweep speedup compiled vs pure: "
                  f"{per_sweep['pure'] / per_sweep['compiled']:.1f}x")


if __name__ == "__main__":
    main()
