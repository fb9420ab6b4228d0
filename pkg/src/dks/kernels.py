# kernels.py
# Discrete associated kernels for count-data smoothing.
#
# A kernel is the p.m.f. of an integer random variable indexed by a target
# x >= 0 and a bandwidth h, concentrated near x:
#
#   dirac        point mass at x; h fixed at 0
#   poisson      Poisson(x + h) on {0, 1, ...}; h > 0
#   binomial     Binomial(x + 1, (x + h)/(x + 1)) on {0, ..., x + 1}; h in (0, 1]
#   negbin       NegBin(x + 1, (x + 1)/(2x + 1 + h)) on {0, 1, ...}; h > 0
#   triangular   symmetric triangular with arm p on {x - p, ..., x + p}; h > 0
#
# The three "standard" families (poisson, binomial, negbin) share mean x + h
# but keep a non-degenerate shape as h -> 0; the triangular kernel collapses
# onto its target.  All mass functions are evaluated through log-gamma so
# targets up to a few thousand stay overflow-free.

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats
from scipy.special import gammaln, xlog1py, xlogy

__all__ = [
    "KernelFamily",
    "KernelSpec",
    "SupportRange",
    "dirac",
    "binomial",
    "poisson",
    "negbin",
    "triangular",
    "validate_bandwidth",
    "kernel_pmf",
    "pmf_grid",
    "kernel_support",
    "modal_probability",
    "modal_limit",
    "kernel_mean",
    "kernel_variance",
    "modal_limit_ratio_poisson_binomial",
    "modal_limit_ratio_negbin_poisson",
    "triangular_small_h_coeffs",
]


class KernelFamily(str, Enum):
    DIRAC = "dirac"
    BINOMIAL = "binomial"
    POISSON = "poisson"
    NEGBIN = "negbin"
    TRIANGULAR = "triangular"


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its fixed shape parameters.

    ``arm`` is the half-width p of the triangular kernel and must be given
    for (and only for) the triangular family.
    """

    family: KernelFamily
    arm: int | None = None

    def __post_init__(self):
        if self.family is KernelFamily.TRIANGULAR:
            if self.arm is None or self.arm < 1:
                raise ValueError("triangular kernel needs an integer arm >= 1")
        elif self.arm is not None:
            raise ValueError(f"{self.family.value} kernel takes no arm parameter")

    @property
    def label(self) -> str:
        if self.family is KernelFamily.TRIANGULAR:
            return f"triangular(p={self.arm})"
        return self.family.value


def dirac() -> KernelSpec:
    return KernelSpec(KernelFamily.DIRAC)


def binomial() -> KernelSpec:
    return KernelSpec(KernelFamily.BINOMIAL)


def poisson() -> KernelSpec:
    return KernelSpec(KernelFamily.POISSON)


def negbin() -> KernelSpec:
    return KernelSpec(KernelFamily.NEGBIN)


def triangular(arm: int = 1) -> KernelSpec:
    return KernelSpec(KernelFamily.TRIANGULAR, arm=arm)


@dataclass(frozen=True)
class SupportRange:
    """Support of one kernel, with the effective bound used for summation.

    ``hi`` is None for families supported on all non-negative integers; the
    kernel mass outside [lo, truncation_hi] is at most ``tail_mass_bound``.
    """

    lo: int
    hi: int | None
    truncation_hi: int
    tail_mass_bound: float


def validate_bandwidth(kernel: KernelSpec, h: float) -> None:
    """Raise ValueError unless h is a valid bandwidth for the family."""
    if not np.isfinite(h):
        raise ValueError(f"bandwidth must be finite, got {h!r}")
    fam = kernel.family
    if fam is KernelFamily.DIRAC:
        if h != 0.0:
            raise ValueError("dirac kernel has no bandwidth; h must be 0")
    elif fam is KernelFamily.BINOMIAL:
        if not 0.0 < h <= 1.0:
            raise ValueError(f"binomial kernel needs h in (0, 1], got {h!r}")
    else:
        if h <= 0.0:
            raise ValueError(f"{fam.value} kernel needs h > 0, got {h!r}")


def _validate_targets(xs: np.ndarray) -> None:
    if xs.size and (np.any(xs < 0) or np.any(xs != np.floor(xs))):
        raise ValueError("kernel targets must be non-negative integers")


def pmf_grid(kernel: KernelSpec, xs, h: float, ys) -> np.ndarray:
    """Kernel mass K_{x,h}(y) on the grid targets-by-points.

    Parameters
    ----------
    xs : array-like of non-negative integer targets (rows).
    h : bandwidth, validated against the family.
    ys : array-like of integer evaluation points (columns); points outside
        the family's support get exactly 0.

    Returns
    -------
    ndarray of shape (len(xs), len(ys)).
    """
    validate_bandwidth(kernel, h)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    _validate_targets(xs)
    X = xs[:, None]
    Y = ys[None, :]
    fam = kernel.family

    if fam is KernelFamily.DIRAC:
        return (X == Y).astype(np.float64)

    if fam is KernelFamily.TRIANGULAR:
        p = kernel.arm
        d = np.abs(Y - X)
        denom = (2 * p + 1) * (p + 1.0) ** h - 2.0 * np.sum(
            np.arange(1.0, p + 1.0) ** h
        )
        out = ((p + 1.0) ** h - d**h) / denom
        return np.where(d <= p, out, 0.0)

    if fam is KernelFamily.POISSON:
        lam = X + h
        Yc = np.maximum(Y, 0.0)
        logp = xlogy(Yc, lam) - lam - gammaln(Yc + 1.0)
        return np.where(Y >= 0, np.exp(logp), 0.0)

    if fam is KernelFamily.BINOMIAL:
        m = X + 1.0
        p = (X + h) / m
        Yc = np.minimum(np.maximum(Y, 0.0), m)
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = (
                gammaln(m + 1.0)
                - gammaln(Yc + 1.0)
                - gammaln(m - Yc + 1.0)
                + xlogy(Yc, p)
                + xlog1py(m - Yc, -p)
            )
        return np.where((Y >= 0) & (Y <= m), np.exp(logp), 0.0)

    # negative binomial: r = x + 1 successes with probability q
    r = X + 1.0
    q = r / (2.0 * X + 1.0 + h)
    Yc = np.maximum(Y, 0.0)
    logp = (
        gammaln(Yc + r)
        - gammaln(Yc + 1.0)
        - gammaln(r)
        + r * np.log(q)
        + xlogy(Yc, 1.0 - q)
    )
    return np.where(Y >= 0, np.exp(logp), 0.0)


def kernel_pmf(kernel: KernelSpec, x: int, h: float, y: int) -> float:
    """Pr(K_{x,h} = y) for a single target and point."""
    return float(pmf_grid(kernel, [x], h, [y])[0, 0])


def _tail_index(dist, mean: float, var: float, tail_eps: float) -> tuple[int, float]:
    # Smallest k with survival mass P(Y > k) <= tail_eps, scanned downward
    # from a generous starting bound.
    hi = int(math.ceil(mean + 10.0 * math.sqrt(max(var, 1.0)))) + 1
    while dist.sf(hi) > tail_eps:
        hi = 2 * hi + 8
    sf = dist.sf(np.arange(0, hi + 1))
    idx = int(np.argmax(sf <= tail_eps))
    return idx, float(sf[idx])


def kernel_support(kernel: KernelSpec, x: int, h: float, tail_eps: float = 1e-12) -> SupportRange:
    """Exact support bounds, with an effective upper bound for infinite ones.

    For the poisson and negbin families ``truncation_hi`` is the smallest
    integer whose upper-tail mass is at most ``tail_eps``.
    """
    validate_bandwidth(kernel, h)
    _validate_targets(np.asarray([x], dtype=float))
    if not 0.0 < tail_eps < 1.0:
        raise ValueError(f"tail_eps must be in (0, 1), got {tail_eps!r}")
    fam = kernel.family
    if fam is KernelFamily.DIRAC:
        return SupportRange(x, x, x, 0.0)
    if fam is KernelFamily.BINOMIAL:
        return SupportRange(0, x + 1, x + 1, 0.0)
    if fam is KernelFamily.TRIANGULAR:
        p = kernel.arm
        return SupportRange(x - p, x + p, x + p, 0.0)
    if fam is KernelFamily.POISSON:
        lam = x + h
        hi, tail = _tail_index(stats.poisson(lam), lam, lam, tail_eps)
        return SupportRange(0, None, hi, tail)
    r = x + 1.0
    q = r / (2.0 * x + 1.0 + h)
    mean = x + h
    var = (x + h) * (2.0 * x + 1.0 + h) / (x + 1.0)
    hi, tail = _tail_index(stats.nbinom(r, q), mean, var, tail_eps)
    return SupportRange(0, None, hi, tail)


def modal_probability(kernel: KernelSpec, x: int, h: float) -> float:
    """Mass the kernel places on its own target, Pr(K_{x,h} = x)."""
    return kernel_pmf(kernel, x, h, x)


def modal_limit(kernel: KernelSpec, x: int) -> float:
    """h -> 0 limit of the modal probability.

    The triangular and dirac kernels collapse onto the target (limit 1); the
    three standard families keep a limit below 1 for every x >= 1.
    """
    _validate_targets(np.asarray([x], dtype=float))
    fam = kernel.family
    xf = float(x)
    if fam in (KernelFamily.DIRAC, KernelFamily.TRIANGULAR):
        return 1.0
    if fam is KernelFamily.POISSON:
        return float(np.exp(xlogy(xf, xf) - xf - gammaln(xf + 1.0)))
    if fam is KernelFamily.BINOMIAL:
        return float(np.exp(xlogy(xf, xf / (xf + 1.0))))
    return float(
        np.exp(
            gammaln(2.0 * xf + 1.0)
            - 2.0 * gammaln(xf + 1.0)
            + xlogy(xf, xf / (2.0 * xf + 1.0))
            + (xf + 1.0) * np.log((xf + 1.0) / (2.0 * xf + 1.0))
        )
    )


def kernel_mean(kernel: KernelSpec, x: int, h: float) -> float:
    """Closed-form kernel expectation: x for dirac/triangular, x + h otherwise."""
    validate_bandwidth(kernel, h)
    _validate_targets(np.asarray([x], dtype=float))
    if kernel.family in (KernelFamily.DIRAC, KernelFamily.TRIANGULAR):
        return float(x)
    return float(x + h)


def kernel_variance(kernel: KernelSpec, x: int, h: float) -> float:
    """Closed-form kernel variance."""
    validate_bandwidth(kernel, h)
    _validate_targets(np.asarray([x], dtype=float))
    fam = kernel.family
    xf = float(x)
    if fam is KernelFamily.DIRAC:
        return 0.0
    if fam is KernelFamily.POISSON:
        return xf + h
    if fam is KernelFamily.BINOMIAL:
        return (xf + h) * (1.0 - h) / (xf + 1.0)
    if fam is KernelFamily.NEGBIN:
        return (xf + h) * (2.0 * xf + 1.0 + h) / (xf + 1.0)
    p = kernel.arm
    k = np.arange(1.0, p + 1.0)
    denom = (2 * p + 1) * (p + 1.0) ** h - 2.0 * np.sum(k**h)
    return float(2.0 * np.sum(k**2 * ((p + 1.0) ** h - k**h)) / denom)


def modal_limit_ratio_poisson_binomial(x: int) -> float:
    """Ratio of the poisson to binomial modal limits; 1 at x = 0, decreasing."""
    _validate_targets(np.asarray([x], dtype=float))
    xf = float(x)
    return float(np.exp(xlogy(xf, xf + 1.0) - xf - gammaln(xf + 1.0)))


def modal_limit_ratio_negbin_poisson(x: int) -> float:
    """Ratio of the negbin to poisson modal limits; 1 at x = 0, decreasing."""
    _validate_targets(np.asarray([x], dtype=float))
    xf = float(x)
    log_nb = (
        gammaln(2.0 * xf + 1.0)
        - 2.0 * gammaln(xf + 1.0)
        + xlogy(xf, xf / (2.0 * xf + 1.0))
        + (xf + 1.0) * np.log((xf + 1.0) / (2.0 * xf + 1.0))
    )
    log_p = xlogy(xf, xf) - xf - gammaln(xf + 1.0)
    return float(np.exp(log_nb - log_p))


def triangular_small_h_coeffs(arm: int) -> tuple[float, float]:
    """First-order coefficients of the triangular kernel as h -> 0.

    Returns (a, v) such that the modal probability is 1 - 2*h*a + O(h^2)
    and the variance is 2*h*v + O(h^2).
    """
    if arm < 1:
        raise ValueError("arm must be >= 1")
    k = np.arange(1.0, arm + 1.0)
    logs = np.log(k)
    a = arm * math.log(arm + 1.0) - float(np.sum(logs))
    v = (arm * (2.0 * arm**2 + 3.0 * arm + 1.0) / 6.0) * math.log(arm + 1.0) - float(
        np.sum(k**2 * logs)
    )
    return a, v
