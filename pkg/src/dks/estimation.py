# estimation.py
# Nonparametric p.m.f. estimation on the non-negative integers.
#
# The smoothed estimate at x averages the kernel mass each observation
# receives from a kernel targeted at x:
#
#   f~(x) = (1/n) * sum_i K_{x,h}(X_i)
#
# With the dirac kernel this is the plain frequency estimate.  For the other
# families f~ does not sum to 1; its total over the evaluation range is kept
# as the normalization constant so the estimate can be rescaled into a
# proper p.m.f.
#
# Bandwidths are selected by minimising the leave-one-out cross-validation
# score
#
#   CV(h) = sum_x f~(x)^2 - 2/(n(n-1)) * sum_i sum_{j != i} K_{X_i,h}(X_j)
#
# over a log-spaced grid followed by golden-section refinement.

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelFamily, KernelSpec, pmf_grid, validate_bandwidth

__all__ = [
    "Sample",
    "PmfEstimate",
    "SearchConfig",
    "BandwidthSelection",
    "default_eval_hi",
    "default_search_config",
    "frequency_estimate",
    "kernel_estimate_raw",
    "normalize_estimate",
    "cv_score",
    "select_bandwidth",
]


class Sample:
    """Multiset of non-negative integer observations.

    Stored as a value -> count map; ``n`` is the total number of
    observations.
    """

    __slots__ = ("counts", "n", "_values", "_weights")

    def __init__(self, counts):
        clean: dict[int, int] = {}
        for value, count in counts.items():
            v = int(value)
            c = int(count)
            if v != value or c != count:
                raise ValueError("sample values and counts must be integers")
            if v < 0:
                raise ValueError(f"sample values must be >= 0, got {v}")
            if c < 0:
                raise ValueError(f"counts must be >= 0, got {c} for value {v}")
            if c > 0:
                clean[v] = clean.get(v, 0) + c
        if not clean:
            raise ValueError("sample must contain at least one observation")
        self.counts = dict(sorted(clean.items()))
        self.n = sum(self.counts.values())
        self._values = np.array(list(self.counts), dtype=np.int64)
        self._weights = np.array(list(self.counts.values()), dtype=np.float64)

    @classmethod
    def from_values(cls, values) -> "Sample":
        return cls(Counter(int(v) for v in values))

    @classmethod
    def from_counts(cls, mapping) -> "Sample":
        return cls(mapping)

    @property
    def min_value(self) -> int:
        return int(self._values[0])

    @property
    def max_value(self) -> int:
        return int(self._values[-1])

    @property
    def distinct_values(self) -> np.ndarray:
        return self._values

    @property
    def value_counts(self) -> np.ndarray:
        return self._weights

    def __eq__(self, other) -> bool:
        return isinstance(other, Sample) and self.counts == other.counts

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, counts={self.counts})"


@dataclass
class PmfEstimate:
    """Estimated mass on the integer range [eval_lo, eval_hi].

    ``normalization_constant`` is the total raw mass over the range; for a
    normalized estimate it records the constant that was divided out.
    """

    eval_lo: int
    eval_hi: int
    values: np.ndarray
    normalization_constant: float
    normalized: bool

    def grid(self) -> np.ndarray:
        return np.arange(self.eval_lo, self.eval_hi + 1)

    def total(self) -> float:
        return float(self.values.sum())

    def value_at(self, x: int) -> float:
        if self.eval_lo <= x <= self.eval_hi:
            return float(self.values[x - self.eval_lo])
        return 0.0


@dataclass(frozen=True)
class SearchConfig:
    """Bandwidth search domain: coarse log grid plus golden-section rounds."""

    h_min: float
    h_max: float
    grid_points: int = 64
    refine_iterations: int = 40

    def __post_init__(self):
        if not 0.0 < self.h_min < self.h_max:
            raise ValueError("need 0 < h_min < h_max")
        if self.grid_points < 16:
            raise ValueError("grid_points must be >= 16")
        if self.refine_iterations < 0:
            raise ValueError("refine_iterations must be >= 0")


@dataclass
class BandwidthSelection:
    """Selected bandwidth and every (h, CV(h)) pair evaluated on the way."""

    h_cv: float
    cv_curve: list[tuple[float, float]] = field(default_factory=list)


def default_eval_hi(sample: Sample) -> int:
    """Default upper evaluation bound, wide enough to capture kernel mass
    leaking beyond the largest observation."""
    m = sample.max_value
    return int(m + math.ceil(3.0 * math.sqrt(m + 1.0)) + 2)


def default_search_config(family: KernelFamily) -> SearchConfig:
    """Family-specific CV search domains covering all plausible bandwidths."""
    if family is KernelFamily.BINOMIAL:
        return SearchConfig(1e-4, 1.0)
    if family in (KernelFamily.POISSON, KernelFamily.NEGBIN):
        return SearchConfig(1e-4, 5.0)
    if family is KernelFamily.TRIANGULAR:
        return SearchConfig(1e-4, 10.0)
    raise ValueError("the dirac kernel has no bandwidth to select")


def frequency_estimate(sample: Sample, eval_lo: int = 0, eval_hi: int | None = None) -> PmfEstimate:
    """Empirical proportions count(x)/n on [eval_lo, eval_hi]."""
    if eval_hi is None:
        eval_hi = sample.max_value
    if eval_lo > sample.min_value or eval_hi < sample.max_value:
        raise ValueError(
            f"evaluation range [{eval_lo}, {eval_hi}] must cover the observed "
            f"values [{sample.min_value}, {sample.max_value}]"
        )
    values = np.zeros(eval_hi - eval_lo + 1)
    for v, c in sample.counts.items():
        values[v - eval_lo] = c / sample.n
    return PmfEstimate(eval_lo, eval_hi, values, 1.0, True)


def kernel_estimate_raw(
    sample: Sample,
    kernel: KernelSpec,
    h: float,
    eval_lo: int = 0,
    eval_hi: int | None = None,
) -> PmfEstimate:
    """Unnormalized smoothed estimate on [eval_lo, eval_hi].

    The normalization constant is the sum of the values over the range, so
    the range should be wide enough for that sum to be stable (the default
    upper bound takes care of this).
    """
    if eval_hi is None:
        eval_hi = default_eval_hi(sample)
    if eval_lo < 0:
        raise ValueError("evaluation range must lie in the non-negative integers")
    if eval_hi < eval_lo:
        raise ValueError("eval_hi must be >= eval_lo")
    xs = np.arange(eval_lo, eval_hi + 1)
    grid = pmf_grid(kernel, xs, h, sample.distinct_values)
    values = grid @ sample.value_counts / sample.n
    return PmfEstimate(eval_lo, eval_hi, values, float(values.sum()), False)


def normalize_estimate(raw: PmfEstimate) -> PmfEstimate:
    """Rescale a raw estimate into a proper p.m.f. over its range.

    The constant that was divided out stays on the result for reporting.
    """
    if raw.normalized:
        raise ValueError("estimate is already normalized")
    total = raw.total()
    if total <= 0.0:
        raise ValueError("cannot normalize an estimate with zero total mass")
    return PmfEstimate(raw.eval_lo, raw.eval_hi, raw.values / total, total, True)


def _cv_first_term_values(sample: Sample, kernel: KernelSpec, h: float, tail_eps: float) -> np.ndarray:
    # Raw estimate over [0, B] where B starts at the default bound and grows
    # until the summand is below tail_eps; matters for the diffuse families
    # whose mass extends well beyond the largest observation.
    us = sample.distinct_values
    cs = sample.value_counts
    hi = default_eval_hi(sample)
    xs = np.arange(0, hi + 1)
    vals = pmf_grid(kernel, xs, h, us) @ cs / sample.n
    while vals[-1] > tail_eps:
        if hi > 100_000:
            raise RuntimeError("cross-validation sum failed to truncate")
        ext = np.arange(hi + 1, hi + 17)
        more = pmf_grid(kernel, ext, h, us) @ cs / sample.n
        vals = np.concatenate([vals, more])
        hi += 16
    return vals


def cv_score(sample: Sample, kernel: KernelSpec, h: float, tail_eps: float = 1e-12) -> float:
    """Leave-one-out cross-validation score CV(h).

    The pair sum runs over ordered pairs of distinct observations, grouped
    through the value -> count map.  Requires n >= 2.
    """
    if sample.n < 2:
        raise ValueError("cross-validation needs at least two observations")
    validate_bandwidth(kernel, h)
    n = sample.n
    vals = _cv_first_term_values(sample, kernel, h, tail_eps)
    term1 = float(np.dot(vals, vals))
    us = sample.distinct_values
    cs = sample.value_counts
    pair_grid = pmf_grid(kernel, us, h, us)
    pair_sum = float(cs @ pair_grid @ cs - np.dot(cs, np.diag(pair_grid)))
    return term1 - 2.0 * pair_sum / (n * (n - 1.0))


def select_bandwidth(
    sample: Sample,
    kernel: KernelSpec,
    config: SearchConfig | None = None,
) -> BandwidthSelection:
    """Minimise CV(h): coarse log-spaced scan, then golden-section refinement
    inside the bracket around the grid minimum.

    Returns the best bandwidth over every evaluated point; exact ties go to
    the smaller h.
    """
    cfg = config if config is not None else default_search_config(kernel.family)
    if kernel.family is KernelFamily.BINOMIAL and cfg.h_max > 1.0:
        raise ValueError("binomial kernel needs h_max <= 1")
    hs = np.geomspace(cfg.h_min, cfg.h_max, cfg.grid_points)
    evaluated = [(float(h), cv_score(sample, kernel, float(h))) for h in hs]
    scores = [s for _, s in evaluated]
    i = int(np.argmin(scores))

    if cfg.refine_iterations > 0:
        a = math.log(hs[max(i - 1, 0)])
        b = math.log(hs[min(i + 1, len(hs) - 1)])
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc = cv_score(sample, kernel, math.exp(c))
        fd = cv_score(sample, kernel, math.exp(d))
        evaluated.append((math.exp(c), fc))
        evaluated.append((math.exp(d), fd))
        for _ in range(cfg.refine_iterations):
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = cv_score(sample, kernel, math.exp(c))
                evaluated.append((math.exp(c), fc))
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = cv_score(sample, kernel, math.exp(d))
                evaluated.append((math.exp(d), fd))

    best_h, _ = min(evaluated, key=lambda t: (t[1], t[0]))
    return BandwidthSelection(float(best_h), sorted(evaluated))
