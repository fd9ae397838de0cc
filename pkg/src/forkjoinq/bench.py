"""Backend benchmark: numba-compiled kernels versus the numpy fallback.

Run with `python -m forkjoinq.bench [--jobs N] [--fanout N]`. Times one
non-purging, one purging and one split-merge workload on every available
backend and reports throughput plus the worst mean-sojourn disagreement.
The first numba call pays JIT compilation; a warm-up run is excluded from
the timing.
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

from .analytic import QueueSpec
from .sim import SimConfig, available_backends, get_backend, run


def _config(variant: str, n: int, k: int, jobs: int) -> SimConfig:
    spec = QueueSpec(n=n, k=k, lam=Fraction(7, 10), mu=1, variant=variant)
    # sample_rate tuned so the run consumes roughly `jobs` jobs
    target = max(200, jobs // 100)
    return SimConfig(spec=spec, seed=42, sample_rate=0.01, target_samples=target)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="compare simulation backends")
    parser.add_argument("--jobs", type=int, default=300_000, help="approximate jobs per run")
    parser.add_argument("--fanout", type=int, default=10)
    args = parser.parse_args(argv)

    n = args.fanout
    workloads = [
        ("non-purging", _config("non-purging", n, max(1, n - 2), args.jobs)),
        ("purging", _config("purging", n, max(1, n // 2), args.jobs)),
        ("split-merge", _config("split-merge", n, max(1, n // 2), args.jobs)),
    ]
    backends = available_backends()
    print(f"backends: {', '.join(backends)}; fanout n={n}; ~{args.jobs} jobs per run\n")
    timings: dict[tuple[str, str], float] = {}
    means: dict[tuple[str, str], float] = {}
    for name in backends:
        be = get_backend(name)
        for label, config in workloads:
            run(config, backend=be)  # warm-up: JIT compile + page in
            t0 = time.perf_counter()
            result = run(config, backend=be)
            dt = time.perf_counter() - t0
            timings[(label, name)] = dt
            means[(label, name)] = result.mean_sojourn
            rate = result.job_count_total / dt / 1e6
            print(
                f"{label:12s} {name:6s} {dt:8.3f} s  {rate:7.2f} Mjobs/s  "
                f"mean={result.mean_sojourn:.5f} (samples={result.sample_count})"
            )
    if len(backends) == 2:
        print()
        for label, _ in workloads:
            speedup = timings[(label, "numpy")] / timings[(label, "numba")]
            drift = abs(means[(label, "numba")] - means[(label, "numpy")])
            print(f"{label:12s} numba speedup x{speedup:6.1f}   |mean drift| = {drift:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
