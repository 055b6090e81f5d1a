"""Prefix missing-mass estimators computed from a sample path alone.

For a path X_0 .. X_{n-1} (0-based), a gauge g, a gap tau and an exception
set B of positions below n - tau, the profile entry j (j = 0 .. n-tau-1) is

    mins[j] = min{ g(X_{tau+j}, X_i) : 0 <= i <= j, i not in B }.

Candidates therefore lag the query by at least tau steps, and the profile is
computable online.  Two summaries matter:

    G   = mean of mins              (average gap to the admissible prefix)
    G_t = fraction of mins > t      (threshold exceedance rate)

G integrates G_t over t, so G = sum over the step levels of G_t, exactly.
For metric gauges G_t upper-estimates the missing mass at level t: the
probability that a fresh stationary draw lands farther than t from every
sample point.  The leave-one-out variant of that estimate is the generalized
Good-Turing estimator, also provided here, together with ground-truth
missing mass for validation against a known sampling distribution.

Summation order is fixed (ascending position, plain left-to-right), so
results are bit-reproducible.  All functions are pure; profiles are
immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import GaugeSpec, SamplePath, check_gauge_path, gauge_row

__all__ = [
    "ExceptionSet",
    "PrefixGaugeProfile",
    "EmptyPrefixError",
    "InfiniteGaugeError",
    "FiniteSupport",
    "SamplerOracle",
    "MissingMassEstimate",
    "prefix_min_profile",
    "missing_mass_G",
    "missing_mass_Gt",
    "good_turing",
    "leave_one_out_mins",
    "true_missing_mass",
]


class EmptyPrefixError(ValueError):
    """No admissible candidate index exists for some profile position."""


class InfiniteGaugeError(ValueError):
    """The profile contains +inf entries, so its mean is undefined."""


@dataclass(frozen=True)
class ExceptionSet:
    """Positions excluded from the prefix minima (and from the penalty max).

    indices are 0-based path positions, all below n_eff = n - tau.  The
    fraction alpha = |B| / n_eff is what the entropy penalty of the
    exception-tolerant bound is charged for.
    """

    indices: tuple[int, ...]
    n_eff: int

    def __post_init__(self):
        if self.n_eff < 1:
            raise ValueError("n_eff must be positive")
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("exception indices must be distinct")
        if idx and (idx[0] < 0 or idx[-1] >= self.n_eff):
            raise ValueError(f"exception indices must lie in [0, {self.n_eff})")
        object.__setattr__(self, "indices", idx)

    @property
    def alpha(self) -> float:
        return len(self.indices) / self.n_eff

    @classmethod
    def empty(cls, n_eff: int) -> "ExceptionSet":
        return cls(indices=(), n_eff=n_eff)

    @classmethod
    def worst_phi(cls, phi_values, alpha: float) -> "ExceptionSet":
        """Exclude the alpha * n_eff positions with the largest penalty
        values.  alpha * n_eff must scale to an integer count; ties break
        toward the earlier position, so the selection is deterministic."""
        phi = np.asarray(phi_values, dtype=np.float64)
        if phi.ndim != 1 or phi.size == 0:
            raise ValueError("phi_values must be a nonempty 1-d array")
        n_eff = phi.size
        count_f = alpha * n_eff
        count = int(round(count_f))
        if abs(count_f - count) > 1e-9:
            raise ValueError(f"alpha * n_eff = {count_f} is not an integer")
        if not 0 <= count < n_eff:
            raise ValueError("alpha must lie in [0, 1) after scaling by n_eff")
        order = np.argsort(-phi, kind="stable")
        return cls(indices=tuple(int(i) for i in order[:count]), n_eff=n_eff)


@dataclass(frozen=True)
class PrefixGaugeProfile:
    """The raw material of G and G_t: per-position admissible prefix minima."""

    n: int
    tau: int
    exceptions: tuple[int, ...]
    mins: np.ndarray  # (n - tau,) float64, possibly +inf

    def __post_init__(self):
        mins = np.ascontiguousarray(np.asarray(self.mins, dtype=np.float64))
        if mins.shape != (self.n - self.tau,):
            raise ValueError("mins must have length n - tau")
        if np.isnan(mins).any() or (mins < 0).any():
            raise ValueError("mins entries must be nonnegative (possibly +inf)")
        mins.setflags(write=False)
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "exceptions", tuple(int(i) for i in self.exceptions))

    @property
    def n_eff(self) -> int:
        return self.n - self.tau


def _keep_indices(n_eff: int, exceptions: ExceptionSet | None) -> np.ndarray:
    if exceptions is None:
        return np.arange(n_eff, dtype=np.intp)
    if exceptions.n_eff != n_eff:
        raise ValueError(f"exception set sized for n_eff={exceptions.n_eff}, path gives {n_eff}")
    keep = np.ones(n_eff, dtype=bool)
    if exceptions.indices:
        keep[np.asarray(exceptions.indices, dtype=np.intp)] = False
    return np.flatnonzero(keep).astype(np.intp)


def naive_prefix_mins(
    path: SamplePath,
    gauge: GaugeSpec,
    tau: int,
    exceptions: ExceptionSet | None = None,
    count_sink: list | None = None,
) -> np.ndarray:
    """Definitional quadratic scan; the oracle every backend must match.

    count_sink, when given, receives the number of gauge evaluations
    appended as a single integer.
    """
    n = len(path)
    if tau < 1:
        raise ValueError("tau must be a positive integer")
    if tau >= n:
        raise ValueError(f"tau={tau} must be smaller than the path length {n}")
    check_gauge_path(gauge, path)
    n_eff = n - tau
    keep = _keep_indices(n_eff, exceptions)
    if keep.size == 0 or keep[0] != 0:
        raise EmptyPrefixError(
            f"no admissible prefix index for path position {tau} "
            "(position 0 is excluded); the estimator is undefined there"
        )
    mins = np.empty(n_eff, dtype=np.float64)
    evaluations = 0
    if keep.size == n_eff:
        # no exceptions: candidate sets are contiguous prefixes, so slices
        # (views) replace fancy indexing; the arithmetic is unchanged
        for j in range(n_eff):
            row = gauge_row(gauge, path, tau + j, slice(0, j + 1))
            mins[j] = row.min()
            evaluations += j + 1
    else:
        # number of admissible candidates for entry j is the count of keep <= j
        upto = np.searchsorted(keep, np.arange(n_eff), side="right")
        for j in range(n_eff):
            cand = keep[: upto[j]]
            row = gauge_row(gauge, path, tau + j, cand)
            mins[j] = row.min()
            evaluations += cand.size
    if count_sink is not None:
        count_sink.append(evaluations)
    return mins


def prefix_min_profile(
    path: SamplePath,
    gauge: GaugeSpec,
    tau: int,
    exceptions: ExceptionSet | None = None,
) -> PrefixGaugeProfile:
    """Exact admissible-prefix minima, straight from the definition."""
    mins = naive_prefix_mins(path, gauge, tau, exceptions)
    exc = () if exceptions is None else exceptions.indices
    return PrefixGaugeProfile(n=len(path), tau=tau, exceptions=exc, mins=mins)


def _ordered_mean(values: np.ndarray) -> float:
    # plain left-to-right accumulation; the documented reference summation
    return sum(values.tolist()) / values.size


def missing_mass_G(profile: PrefixGaugeProfile) -> float:
    """Mean of the prefix minima, in ascending position order."""
    if np.isinf(profile.mins).any():
        raise InfiniteGaugeError(
            "profile contains infinite entries; the mean estimator is undefined, "
            "use missing_mass_Gt at a finite threshold instead"
        )
    return _ordered_mean(profile.mins)


def missing_mass_Gt(profile: PrefixGaugeProfile, t: float) -> float:
    """Fraction of prefix minima strictly above t (+inf entries count)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return float(np.count_nonzero(profile.mins > t)) / profile.mins.size


def leave_one_out_mins(path: SamplePath, gauge: GaugeSpec) -> np.ndarray:
    """min over i != k of g(X_k, X_i), for every k; the quadratic reference."""
    n = len(path)
    if n < 2:
        raise ValueError("need at least two points")
    check_gauge_path(gauge, path)
    out = np.empty(n, dtype=np.float64)
    idx = np.arange(n, dtype=np.intp)
    for k in range(n):
        cand = np.concatenate((idx[:k], idx[k + 1:]))
        out[k] = gauge_row(gauge, path, k, cand).min()
    return out


def good_turing(path: SamplePath, gauge: GaugeSpec, threshold: float) -> float:
    """Leave-one-out isolation fraction at the given gauge threshold.

    With the Lipschitz gauge the usual convention measures isolation at a
    loss level t; pass threshold = t / L (equivalently use L = 1).
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if gauge.kind not in ("lipschitz", "discrete"):
        raise ValueError("good_turing needs a metric-type gauge (lipschitz or discrete)")
    loo = leave_one_out_mins(path, gauge)
    return float(np.count_nonzero(loo > threshold)) / loo.size


@dataclass(frozen=True)
class FiniteSupport:
    """Sampling distribution with finite support: exact missing mass."""

    support: SamplePath
    probs: np.ndarray

    def __post_init__(self):
        probs = np.ascontiguousarray(np.asarray(self.probs, dtype=np.float64))
        if probs.shape != (len(self.support),):
            raise ValueError("one probability per support point required")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probs must be nonnegative and sum to 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class SamplerOracle:
    """Draws fresh points from the sampling distribution for Monte Carlo."""

    draw: Callable[[np.random.Generator, int], SamplePath]


@dataclass(frozen=True)
class MissingMassEstimate:
    value: float
    std_error: float
    exact: bool
    n_draws: int


def _min_gauge_to_path(gauge: GaugeSpec, path: SamplePath, fresh: SamplePath) -> np.ndarray:
    """min over sample points of g(fresh_point, X_i), per fresh point.

    Blocked and vectorized; only the minima are consumed downstream.
    """
    from .geometry import base_metric_kind, distance_transform

    if fresh.kind != path.kind or fresh.dim != path.dim:
        raise ValueError("fresh draws must live in the sample path's space")
    check_gauge_path(gauge, path)
    m = len(fresh)
    transform = distance_transform(gauge)

    if base_metric_kind(gauge) == "discrete":
        if path.kind == "symbol":
            unseen = ~np.isin(fresh.symbols, path.symbols)
        else:
            seen = {(row + 0.0).tobytes() for row in path.coords}
            unseen = np.fromiter(
                ((row + 0.0).tobytes() not in seen for row in fresh.coords),
                dtype=bool, count=m,
            )
        return np.asarray(transform(unseen.astype(np.float64)), dtype=np.float64)

    n = len(path)
    dim = path.dim
    out = np.empty(m, dtype=np.float64)
    block = max(1, 2_000_000 // max(1, n * dim))
    for lo in range(0, m, block):
        hi = min(m, lo + block)
        diff = fresh.coords[lo:hi, None, :] - path.coords[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
        vals = np.asarray(transform(dist), dtype=np.float64)
        if gauge.kind == "hinge":
            vals = np.where(fresh.labels[lo:hi, None] == path.labels[None, :], vals, np.inf)
        elif gauge.kind == "regression":
            vals = vals + np.abs(fresh.targets[lo:hi, None] - path.targets[None, :])
        out[lo:hi] = vals.min(axis=1)
    return out


def true_missing_mass(
    path: SamplePath,
    gauge: GaugeSpec,
    t: float,
    oracle: FiniteSupport | SamplerOracle,
    n_mc: int = 0,
    rng: np.random.Generator | None = None,
) -> MissingMassEstimate:
    """Probability that a fresh draw is farther than t (in gauge) from every
    point of the given path.

    Exact by enumeration for finite support; Monte Carlo with a binomial
    standard error otherwise.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(oracle, FiniteSupport):
        gaps = _min_gauge_to_path(gauge, path, oracle.support)
        value = float(oracle.probs[gaps > t].sum())
        return MissingMassEstimate(value=value, std_error=0.0, exact=True,
                                   n_draws=len(oracle.support))
    if n_mc < 1:
        raise ValueError("n_mc must be at least 1 for Monte Carlo estimation")
    if rng is None:
        raise ValueError("Monte Carlo estimation needs an explicit rng")
    fresh = oracle.draw(rng, n_mc)
    gaps = _min_gauge_to_path(gauge, path, fresh)
    p_hat = float(np.count_nonzero(gaps > t)) / n_mc
    se = math.sqrt(p_hat * (1.0 - p_hat) / n_mc)
    return MissingMassEstimate(value=p_hat, std_error=se, exact=False, n_draws=n_mc)
