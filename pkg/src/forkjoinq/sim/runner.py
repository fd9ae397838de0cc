"""Simulation orchestration: RNG streams, sampling protocol, results.

Randomness comes from counter-based Philox generators keyed (seed, stream):
stream 0 drives arrivals, streams 1..n drive the n sub-queue service times,
stream n+1 drives job sampling. Fixing the seed therefore fixes every draw
independently of the variant, so basic / non-purging / purging / split-merge
runs at the same seed consume identical arrival and service values (common
random numbers), and the sampling stream never perturbs the trace.

Protocol: every job is simulated; a job is sampled with probability
``sample_rate`` once the warm-up prefix has passed; the run stops after
``target_samples`` sampled jobs (default 10000 at a 1% rate). If the job
budget runs out first the result is flagged non-convergent. Warm-up defaults
to 10 n/(1-rho) jobs, clamped at rho = 0.99 since the simulator may run
unstable regimes on purpose; the value used is recorded on the result.

The confidence half-width uses 20-batch batch means with the normal 1.96
quantile, which respects the autocorrelation of queue sojourns where a plain
iid formula would not. Fewer than 20 samples give an infinite half-width.

lam = 0 is the exact zero-load limit: every job meets an empty system, so
sojourns are order statistics of fresh service draws (exponential
interarrival times are undefined at rate zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..analytic import QueueSpec
from ..errors import DomainError
from .backend import Backend, get_backend

__all__ = ["SimConfig", "SimResult", "SamplePaths", "run", "run_joint", "sample_paths"]

_ARRIVAL_STREAM = 0
_SAMPLING_OFFSET = 1  # sampling stream id is n + 1


@dataclass(frozen=True)
class SimConfig:
    """One simulation: queue spec plus the sampling protocol knobs."""

    spec: QueueSpec
    seed: int = 0
    sample_rate: float = 0.01
    target_samples: int = 10_000
    warmup_jobs: int | None = None
    job_budget: int = 10_000_000
    arrival: str = "poisson"

    def __post_init__(self):
        if not 0 < self.sample_rate <= 1:
            raise DomainError(f"sample_rate must be in (0, 1], got {self.sample_rate}")
        if self.target_samples < 1:
            raise DomainError("target_samples must be >= 1")
        if self.job_budget < 1:
            raise DomainError("job_budget must be >= 1")
        if self.arrival not in ("poisson", "deterministic"):
            raise DomainError(f"arrival must be poisson or deterministic, got {self.arrival!r}")

    @property
    def effective_warmup(self) -> int:
        if self.warmup_jobs is not None:
            return self.warmup_jobs
        rho = min(float(self.spec.rho), 0.99)
        return int(10 * self.spec.n / (1.0 - rho))


@dataclass(frozen=True)
class SimResult:
    """Sampled mean sojourn time with its batch-means confidence half-width."""

    mean_sojourn: float
    sample_count: int
    half_width_95: float
    seed: int
    job_count_total: int
    warmup_jobs: int
    converged: bool
    backend: str
    rank: int


@dataclass(frozen=True)
class SamplePaths:
    """Per-sampled-job detail of one basic/non-purging run.

    Column r-1 of ``sorted_sojourns`` is the rank-r job sojourn; column i-1
    of ``prefix_maxima`` is the sub-task sojourn maximum over sub-queues
    1..i, so column 0 is sub-queue 1's own sojourn.
    """

    config: SimConfig
    backend: str
    sorted_sojourns: np.ndarray
    prefix_maxima: np.ndarray
    sample_count: int
    job_count_total: int
    warmup_jobs: int
    converged: bool

    def result_for_rank(self, k: int) -> SimResult:
        if not 1 <= k <= self.config.spec.n:
            raise DomainError(f"rank must be in [1, {self.config.spec.n}], got {k}")
        samples = self.sorted_sojourns[:, k - 1]
        return SimResult(
            mean_sojourn=float(samples.mean()) if samples.size else math.nan,
            sample_count=self.sample_count,
            half_width_95=batch_means_half_width(samples),
            seed=self.config.seed,
            job_count_total=self.job_count_total,
            warmup_jobs=self.warmup_jobs,
            converged=self.converged,
            backend=self.backend,
            rank=k,
        )


def batch_means_half_width(samples: np.ndarray, batches: int = 20, z: float = 1.96) -> float:
    """95% half-width from consecutive batch means; inf below ``batches`` samples."""
    m = samples.size
    if m < batches:
        return math.inf
    per = m // batches
    bm = samples[: batches * per].reshape(batches, per).mean(axis=1)
    return float(z * bm.std(ddof=1) / math.sqrt(batches))


def _stream(seed: int, stream_id: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream_id)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _service_matrix(config: SimConfig, n_jobs: int) -> np.ndarray:
    spec = config.spec
    mu = float(spec.mu)
    svc = np.empty((n_jobs, spec.n))
    kind, _, shape_txt = spec.service.partition(":")
    for i in range(spec.n):
        gen = _stream(config.seed, 1 + i)
        if kind == "exponential":
            svc[:, i] = gen.exponential(1.0 / mu, n_jobs)
        elif kind == "deterministic":
            svc[:, i] = np.full(n_jobs, 1.0 / mu)
        elif kind == "weibull":
            shape = float(shape_txt)
            if shape <= 0:
                raise DomainError("weibull shape must be positive")
            scale = 1.0 / (mu * math.gamma(1.0 + 1.0 / shape))  # unit mean at rate mu
            svc[:, i] = scale * gen.weibull(shape, n_jobs)
        else:
            raise DomainError(f"unknown service distribution {spec.service!r}")
    return svc


def _arrival_times(config: SimConfig, n_jobs: int) -> np.ndarray:
    lam = float(config.spec.lam)
    gen = _stream(config.seed, _ARRIVAL_STREAM)
    if config.arrival == "poisson":
        gaps = gen.exponential(1.0 / lam, n_jobs)
    else:
        gaps = np.full(n_jobs, 1.0 / lam)
    return np.cumsum(gaps)


def _sample_mask(config: SimConfig, n_jobs: int, warmup: int) -> np.ndarray:
    gen = _stream(config.seed, config.spec.n + _SAMPLING_OFFSET)
    mask = gen.random(n_jobs) < config.sample_rate
    mask[:warmup] = False
    return mask


def _initial_jobs(config: SimConfig, warmup: int) -> int:
    need = warmup + math.ceil(config.target_samples / config.sample_rate * 1.05) + 1000
    return min(need, config.job_budget)


def _zero_load(config: SimConfig, warmup: int, backend_name: str) -> SamplePaths:
    n_jobs = _initial_jobs(config, warmup)
    mask = _sample_mask(config, n_jobs, warmup)
    idx = np.flatnonzero(mask)
    converged = idx.size >= config.target_samples
    idx = idx[: config.target_samples]
    svc = _service_matrix(config, int(idx[-1]) + 1 if idx.size else 0)
    rows = svc[idx]
    return SamplePaths(
        config=config,
        backend=backend_name,
        sorted_sojourns=np.sort(rows, axis=1),
        prefix_maxima=np.maximum.accumulate(rows, axis=1),
        sample_count=int(idx.size),
        job_count_total=int(idx[-1]) + 1 if idx.size else 0,
        warmup_jobs=warmup,
        converged=converged,
    )


def sample_paths(config: SimConfig, backend: str | Backend | None = None) -> SamplePaths:
    """Simulate a basic or non-purging queue, keeping all ranks per sampled job."""
    spec = config.spec
    if spec.variant not in ("basic", "non-purging"):
        raise DomainError(
            f"joint per-rank paths require a basic or non-purging queue, got {spec.variant!r}"
        )
    be = backend if isinstance(backend, Backend) else get_backend(backend)
    warmup = config.effective_warmup
    if spec.lam == 0:
        return _zero_load(config, warmup, be.name)
    n_jobs = _initial_jobs(config, warmup)
    while True:
        t_arr = _arrival_times(config, n_jobs)
        svc = _service_matrix(config, n_jobs)
        mask = _sample_mask(config, n_jobs, warmup)
        out_sorted = np.empty((config.target_samples, spec.n))
        out_prefmax = np.empty((config.target_samples, spec.n))
        written, jobs_done = be.nonpurging_paths(t_arr, svc, mask, out_sorted, out_prefmax)
        if written >= config.target_samples or n_jobs >= config.job_budget:
            break
        n_jobs = min(n_jobs * 2, config.job_budget)
    return SamplePaths(
        config=config,
        backend=be.name,
        sorted_sojourns=out_sorted[:written],
        prefix_maxima=out_prefmax[:written],
        sample_count=int(written),
        job_count_total=int(jobs_done),
        warmup_jobs=warmup,
        converged=written >= config.target_samples,
    )


def run(config: SimConfig, backend: str | Backend | None = None) -> SimResult:
    """Simulate one queue and return the sampled mean sojourn time."""
    spec = config.spec
    be = backend if isinstance(backend, Backend) else get_backend(backend)
    if spec.variant in ("basic", "non-purging"):
        paths = sample_paths(config, backend=be)
        return paths.result_for_rank(spec.n if spec.variant == "basic" else spec.k)

    warmup = config.effective_warmup
    if spec.lam == 0:
        paths = _zero_load(config, warmup, be.name)
        return paths.result_for_rank(spec.k)
    kernel = be.purging_sojourns if spec.variant == "purging" else be.splitmerge_sojourns
    n_jobs = _initial_jobs(config, warmup)
    while True:
        t_arr = _arrival_times(config, n_jobs)
        svc = _service_matrix(config, n_jobs)
        mask = _sample_mask(config, n_jobs, warmup)
        out = np.empty(config.target_samples)
        written, jobs_done = kernel(t_arr, svc, spec.k, mask, out)
        if written >= config.target_samples or n_jobs >= config.job_budget:
            break
        n_jobs = min(n_jobs * 2, config.job_budget)

    samples = out[:written]
    return SimResult(
        mean_sojourn=float(samples.mean()) if written else math.nan,
        sample_count=int(written),
        half_width_95=batch_means_half_width(samples),
        seed=config.seed,
        job_count_total=int(jobs_done),
        warmup_jobs=warmup,
        converged=written >= config.target_samples,
        backend=be.name,
        rank=spec.k,
    )


def run_joint(config: SimConfig, ranks, backend: str | Backend | None = None) -> dict[int, SimResult]:
    """One basic/non-purging run, per-rank results from the same sample paths.

    Purging queues change dynamics with k and cannot share a run; requesting
    one raises DomainError.
    """
    paths = sample_paths(config, backend=backend)
    out = {}
    for k in sorted(set(int(r) for r in ranks)):
        out[k] = paths.result_for_rank(k)
    return out
