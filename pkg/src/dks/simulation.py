# simulation.py
# Seeded Monte Carlo engine: draw samples from a known p.m.f., select a
# bandwidth per replicate, estimate, and score against the truth.
#
# Reproducibility contract: each (sample size, replicate index) pair gets
# its own counter-based Philox stream derived from the study seed, so
# replicates are order-independent, parallel-safe, and every kernel sees
# the same sample at a given (n, replicate).

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimation import (
    PmfEstimate,
    Sample,
    SearchConfig,
    default_eval_hi,
    default_search_config,
    kernel_estimate_raw,
    normalize_estimate,
    select_bandwidth,
)
from .kernels import KernelFamily, KernelSpec
from .risk import TruePmf

__all__ = [
    "SimulationConfig",
    "ReplicateResult",
    "StudyCell",
    "StudyReport",
    "replicate_stream",
    "sample_from_pmf",
    "ise",
    "run_replicate",
    "run_study",
]


@dataclass
class SimulationConfig:
    """Study protocol: truth, sizes, replicate count, kernels, seed.

    ``search`` of None means each kernel uses its family default domain;
    a mapping from family to SearchConfig overrides per family.
    ``normalize`` controls whether replicate estimates are rescaled to unit
    mass before scoring.
    """

    true_pmf: TruePmf
    sample_sizes: tuple[int, ...]
    replicates: int
    kernels: tuple[KernelSpec, ...]
    seed: int
    search: dict[KernelFamily, SearchConfig] | None = None
    normalize: bool = True

    def __post_init__(self):
        self.sample_sizes = tuple(int(n) for n in self.sample_sizes)
        self.kernels = tuple(self.kernels)
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if any(n < 2 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 2")

    def search_for(self, kernel: KernelSpec) -> SearchConfig:
        if self.search and kernel.family in self.search:
            return self.search[kernel.family]
        return default_search_config(kernel.family)


@dataclass
class ReplicateResult:
    h_cv: float
    ise: float
    estimate: PmfEstimate


@dataclass
class StudyCell:
    """Aggregates for one (kernel, sample size) pair."""

    kernel: str
    n: int
    mean_mise: float
    ibias: float
    ivar: float
    h_mean: float
    h_sd: float
    h_values: list[float] = field(default_factory=list)


@dataclass
class StudyReport:
    truth: str
    replicates: int
    seed: int
    normalize: bool
    cells: list[StudyCell] = field(default_factory=list)

    def cell(self, kernel_label: str, n: int) -> StudyCell:
        for c in self.cells:
            if c.kernel == kernel_label and c.n == n:
                return c
        raise KeyError(f"no cell for ({kernel_label!r}, {n})")


def replicate_stream(seed: int, n: int, replicate_index: int) -> np.random.Generator:
    """Independent Philox stream for one (sample size, replicate) pair."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(n, replicate_index))
    return np.random.Generator(np.random.Philox(ss))


def sample_from_pmf(f: TruePmf, n: int, rng: np.random.Generator) -> Sample:
    """Draw n observations by inversion: for each uniform u, the smallest x
    with CDF(x) >= u."""
    if n < 1:
        raise ValueError("n must be >= 1")
    hi = f.tail_cutoff(1e-15)
    cdf = np.cumsum(f.pmf(np.arange(0, hi + 1)))
    u = rng.random(n)
    draws = np.minimum(np.searchsorted(cdf, u, side="left"), hi)
    return Sample.from_values(draws)


def ise(estimate: PmfEstimate, reference) -> float:
    """Integrated squared error against a PmfEstimate or a TruePmf.

    Both sides are extended (by zeros, or by the reference tail) to the
    union of their ranges.
    """
    if isinstance(reference, TruePmf):
        lo = min(estimate.eval_lo, 0)
        hi = max(estimate.eval_hi, reference.tail_cutoff(1e-12))
        xs = np.arange(lo, hi + 1)
        ref_vals = reference.pmf(xs)
    elif isinstance(reference, PmfEstimate):
        lo = min(estimate.eval_lo, reference.eval_lo)
        hi = max(estimate.eval_hi, reference.eval_hi)
        ref_vals = np.zeros(hi - lo + 1)
        ref_vals[reference.eval_lo - lo : reference.eval_hi - lo + 1] = reference.values
    else:
        raise TypeError(f"unsupported reference type: {type(reference)!r}")
    est_vals = np.zeros(hi - lo + 1)
    est_vals[estimate.eval_lo - lo : estimate.eval_hi - lo + 1] = estimate.values
    diff = est_vals - ref_vals
    return float(np.dot(diff, diff))


def run_replicate(config: SimulationConfig, kernel: KernelSpec, n: int, replicate_index: int) -> ReplicateResult:
    """One draw-select-estimate-score cycle.

    The sample depends only on (seed, n, replicate_index), never on the
    kernel, so results are paired across kernels.
    """
    rng = replicate_stream(config.seed, n, replicate_index)
    sample = sample_from_pmf(config.true_pmf, n, rng)
    if kernel.family is KernelFamily.DIRAC:
        h = 0.0
    else:
        h = select_bandwidth(sample, kernel, config.search_for(kernel)).h_cv
    est = kernel_estimate_raw(sample, kernel, h, 0, default_eval_hi(sample))
    if config.normalize:
        est = normalize_estimate(est)
    return ReplicateResult(h, ise(est, config.true_pmf), est)


def _worker(args) -> tuple[int, float, float, np.ndarray]:
    config, kernel, n, rep = args
    r = run_replicate(config, kernel, n, rep)
    return rep, r.h_cv, r.ise, r.estimate.values


def _workers_from_env() -> int:
    raw = os.environ.get("DKS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_study(config: SimulationConfig) -> StudyReport:
    """Run the full kernels-by-sizes-by-replicates grid.

    Per cell: mean of the replicate ISEs, the pointwise-mean bias/variance
    decomposition of those estimates, and the bandwidth statistics.
    Replicates may execute in parallel (DKS_THREADS); aggregation is a
    deterministic reduction in replicate order either way.
    """
    workers = _workers_from_env()
    report = StudyReport(
        truth=config.true_pmf.label(),
        replicates=config.replicates,
        seed=config.seed,
        normalize=config.normalize,
    )
    truth_hi = config.true_pmf.tail_cutoff(1e-12)
    for kernel in config.kernels:
        for n in config.sample_sizes:
            jobs = [(config, kernel, n, rep) for rep in range(config.replicates)]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as ex:
                    chunk = max(1, config.replicates // (workers * 4))
                    results = list(ex.map(_worker, jobs, chunksize=chunk))
            else:
                results = [_worker(j) for j in jobs]
            results.sort(key=lambda t: t[0])
            hs = np.array([r[1] for r in results])
            ises = np.array([r[2] for r in results])
            width = max(max(len(r[3]) for r in results), truth_hi + 1)
            total = np.zeros(width)
            total_sq = np.zeros(width)
            for _, _, _, vals in results:
                total[: len(vals)] += vals
                total_sq[: len(vals)] += vals * vals
            R = config.replicates
            mean_vals = total / R
            xs = np.arange(0, width)
            fx = config.true_pmf.pmf(xs)
            ibias = float(np.sum((mean_vals - fx) ** 2))
            ivar = float(np.sum(total_sq / R - mean_vals**2))
            report.cells.append(
                StudyCell(
                    kernel=kernel.label,
                    n=n,
                    mean_mise=float(np.mean(ises)),
                    ibias=ibias,
                    ivar=max(ivar, 0.0),
                    h_mean=float(np.mean(hs)),
                    h_sd=float(np.std(hs, ddof=1)) if R > 1 else 0.0,
                    h_values=[float(h) for h in hs],
                )
            )
    return report
