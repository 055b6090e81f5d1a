"""Monte Carlo validation: probabilistic claims become statistical tests.

Each validator simulates many independent trials, counts violations of the
claim under test, and applies a one-sided exact binomial rule: a claim
"violation rate <= target" fails only when observing that many violations
under rate = target has probability below 0.001.  That keeps false alarms
out of CI while still catching real coverage breaks.

Everything is deterministic given (seed, trials): per-trial seeds expand
from one SeedSequence, and aggregation is order-independent counting, so
thread counts never change results.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .bounds import MixingProfile, excess_loss_probability_bound
from .estimators import (
    FiniteSupport,
    missing_mass_Gt,
    prefix_min_profile,
    true_missing_mass,
)
from .geometry import GaugeSpec
from .nnindex import PrefixNNBackend, prefix_min_indexed
from .processes import EmbeddingSpec, ProcessSpec, embed, mixing_bounds, mixing_time, simulate, stationary_oracle

__all__ = [
    "TrialReport",
    "GoodTuringReport",
    "DecayRow",
    "IidBernoulli",
    "MarkovModulatedBernoulli",
    "binomial_pass",
    "validate_martingale_tail",
    "validate_excess_loss_coverage",
    "validate_good_turing",
    "decay_study",
]

logger = logging.getLogger(__name__)

_PASS_LEVEL = 1e-3


@dataclass(frozen=True)
class TrialReport:
    trials: int
    violations: int
    violation_rate: float
    target: float
    passed: bool
    p_value: float

    def __post_init__(self):
        if self.violations > self.trials:
            raise ValueError("violations cannot exceed trials")


def binomial_pass(violations: int, trials: int, target: float,
                  level: float = _PASS_LEVEL) -> tuple[bool, float]:
    """Exact one-sided binomial upper test of rate <= target."""
    p_value = float(stats.binom.sf(violations - 1, trials, target))
    return p_value >= level, p_value


def _report(violations: int, trials: int, target: float) -> TrialReport:
    passed, p_value = binomial_pass(violations, trials, target)
    return TrialReport(
        trials=trials,
        violations=violations,
        violation_rate=violations / trials,
        target=target,
        passed=passed,
        p_value=p_value,
    )


def _philox(entropy) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _trial_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)


def _parallel(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# martingale tail
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IidBernoulli:
    """R_j iid Bernoulli(q); the conditional means are constantly q."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")


@dataclass(frozen=True)
class MarkovModulatedBernoulli:
    """Hidden two-state Markov chain; state s emits Bernoulli(q_s).

    The filtration includes the states, so the conditional mean before step j
    is exactly the transition-weighted emission mean given the previous
    state.  The hidden chain starts in its stationary distribution.
    """

    stay0: float
    stay1: float
    q0: float
    q1: float

    def __post_init__(self):
        for name in ("stay0", "stay1", "q0", "q1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if (1.0 - self.stay0) + (1.0 - self.stay1) <= 0.0:
            raise ValueError("the hidden chain must be able to move (some flip probability)")


def validate_martingale_tail(
    chain: IidBernoulli | MarkovModulatedBernoulli,
    n: int,
    delta: float,
    trials: int,
    seed: int = 0,
) -> TrialReport:
    """Check the doubled-empirical tail: the conditional-mean average V
    exceeds 2 * observed average + e ln(1/delta) / n in at most a delta
    fraction of trials."""
    if trials < 100:
        raise ValueError("need at least 100 trials for a meaningful rate")
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    rng = _philox(seed)
    threshold = math.e * math.log(1.0 / delta) / n

    if isinstance(chain, IidBernoulli):
        emissions = rng.random((trials, n)) < chain.q
        v_hat = emissions.mean(axis=1)
        v = np.full(trials, chain.q)
    else:
        flip0, flip1 = 1.0 - chain.stay0, 1.0 - chain.stay1
        pi1 = flip0 / (flip0 + flip1)
        emit = np.array([chain.q0, chain.q1])
        cond_means = np.empty((trials, n))
        state = (rng.random(trials) < pi1).astype(np.int64)
        cond_means[:, 0] = (1.0 - pi1) * chain.q0 + pi1 * chain.q1
        emissions = np.empty((trials, n), dtype=bool)
        emissions[:, 0] = rng.random(trials) < emit[state]
        stay = np.array([chain.stay0, chain.stay1])
        for j in range(1, n):
            stay_j = stay[state]
            cond_means[:, j] = stay_j * emit[state] + (1.0 - stay_j) * emit[1 - state]
            flips = rng.random(trials) < (1.0 - stay_j)
            state = np.where(flips, 1 - state, state)
            emissions[:, j] = rng.random(trials) < emit[state]
        v_hat = emissions.mean(axis=1)
        v = cond_means.mean(axis=1)

    violations = int(np.count_nonzero(v > 2.0 * v_hat + threshold))
    return _report(violations, trials, delta)


# ---------------------------------------------------------------------------
# excess-loss coverage
# ---------------------------------------------------------------------------

def validate_excess_loss_coverage(
    proc: ProcessSpec,
    emb: EmbeddingSpec | None,
    L: float,
    t: float,
    tau: int,
    n: int,
    delta: float,
    trials: int,
    mc_fresh: int = 2000,
    seed: int = 0,
    threads: int = 1,
) -> TrialReport:
    """Coverage of the excess-loss probability bound for Lipschitz classes.

    Per trial: simulate and embed a path, evaluate the bound from the
    threshold estimate at t, and compare against the true missing mass of
    the first n - tau points at radius t / L (which attains the supremum
    over the L-Lipschitz class).  The truth side is exact on finite state
    spaces and Monte Carlo (with a 3-standard-error allowance) otherwise.
    """
    if proc.kind == "iid":
        mixing = MixingProfile(tau=tau, phi_tau=0.0, alpha_tau=0.0)
    else:
        if proc.reset_p == 0.0:
            raise ValueError("p = 0 chains admit no finite dependence bound; coverage is untestable")
        mixing = mixing_bounds(proc, tau)
    emb = emb or EmbeddingSpec.identity()
    oracle = stationary_oracle(proc, emb)
    metric = "discrete" if (proc.kind == "cycle" or proc.space == "cycle") and \
        emb.kind == "identity" else "euclidean"
    gauge = GaugeSpec.lipschitz(L, metric=metric)
    seeds = _trial_seeds(seed, 2 * trials)

    def one_trial(i: int) -> bool:
        path = embed(emb, simulate(proc.with_seed(int(seeds[i])), n))
        profile = prefix_min_profile(path, gauge, tau)
        gt = missing_mass_Gt(profile, t)
        rhs = excess_loss_probability_bound(gt, mixing, n, delta).total
        head = path.head(n - tau)
        if isinstance(oracle, FiniteSupport):
            truth = true_missing_mass(head, gauge, t, oracle)
            slack = 0.0
        else:
            rng = _philox(int(seeds[trials + i]))
            truth = true_missing_mass(head, gauge, t, oracle, n_mc=mc_fresh, rng=rng)
            slack = 3.0 * truth.std_error
        return truth.value - slack > rhs

    flags = _parallel(one_trial, range(trials), threads)
    return _report(int(sum(flags)), trials, delta)


# ---------------------------------------------------------------------------
# Good-Turing concentration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoodTuringReport:
    rms: float
    bound: float
    passed: bool
    trials: int
    n: int
    n_symbols: int
    threshold: float


def validate_good_turing(
    n_symbols: int,
    n: int,
    threshold: float,
    trials: int,
    seed: int = 0,
    probs=None,
) -> GoodTuringReport:
    """Root-mean-square gap between exact missing mass and the leave-one-out
    isolation estimator, over iid samples from a finite alphabet; checked
    against the sqrt(7/n) concentration level.

    At a sub-unit threshold under the discrete metric, isolation means the
    symbol is unseen (for the missing mass) or a singleton (for the
    estimator), so both sides reduce to exact counting.
    """
    if n_symbols < 2:
        raise ValueError("need at least 2 symbols")
    if n < 2:
        raise ValueError("need n >= 2")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if probs is None:
        probs = np.full(n_symbols, 1.0 / n_symbols)
    else:
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != (n_symbols,) or (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probs must be a distribution over the symbols")
    rng = _philox(seed)
    if threshold >= 1.0:
        # no pair of distinct symbols is farther than 1, nothing is isolated
        return GoodTuringReport(rms=0.0, bound=math.sqrt(7.0 / n), passed=True,
                                trials=trials, n=n, n_symbols=n_symbols, threshold=threshold)
    draws = rng.choice(n_symbols, size=(trials, n), p=probs)
    counts = np.zeros((trials, n_symbols), dtype=np.int64)
    trial_idx = np.repeat(np.arange(trials), n)
    np.add.at(counts, (trial_idx, draws.ravel()), 1)
    gt = (counts[np.arange(trials)[:, None], draws] == 1).mean(axis=1)
    m_hat = ((counts == 0) * probs).sum(axis=1)
    rms = float(np.sqrt(np.mean((m_hat - gt) ** 2)))
    bound = math.sqrt(7.0 / n)
    return GoodTuringReport(rms=rms, bound=bound, passed=rms <= bound,
                            trials=trials, n=n, n_symbols=n_symbols, threshold=threshold)


# ---------------------------------------------------------------------------
# decay study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayRow:
    p: float
    n: int
    mean_g: float
    std_g: float
    n_seeds: int
    tau_mix: int | None      # smallest gap with (1-p)^gap <= eps
    tau_over_n: float | None


def decay_study(
    proc: ProcessSpec,
    emb: EmbeddingSpec | None,
    gauge: GaugeSpec,
    tau: int,
    sizes,
    p_list=None,
    n_seeds: int = 10,
    seed: int = 0,
    eps: float = 0.1,
    backend: str = "indexed",
    threads: int = 1,
) -> list[DecayRow]:
    """Mean and spread of the gap estimator G across sample sizes and reset
    probabilities, with the mixing-time reference column tau_mix / n.

    Per (p, seed) one maximal path is simulated and its prefix profile
    computed once; G at a smaller size is the mean of the leading profile
    entries, which equals the estimator on the prefix path exactly (the
    profile is prefix-causal).  Sharing the path across sizes removes
    between-size simulation noise from the decay comparison.

    Sizes not exceeding tau are skipped with a notice: the estimator is
    empty there.
    """
    emb = emb or EmbeddingSpec.identity()
    sizes = sorted(int(s) for s in sizes)
    if not sizes:
        raise ValueError("sizes must be nonempty")
    usable = [s for s in sizes if s > tau]
    skipped = [s for s in sizes if s <= tau]
    if skipped:
        logger.warning("skipping sizes %s: not larger than the gap tau=%d", skipped, tau)
    if not usable:
        return []
    if proc.kind == "iid":
        if p_list:
            raise ValueError("p_list applies to reset chains, not iid processes")
        variants = [(1.0, proc)]
    else:
        ps = list(p_list) if p_list else [proc.reset_p]
        variants = [(float(p), proc.with_reset_p(p)) for p in ps]
    if backend not in ("naive", "indexed"):
        raise ValueError("backend must be 'naive' or 'indexed'")
    n_max = usable[-1]
    seeds = _trial_seeds(seed, len(variants) * n_seeds)

    def one_run(job) -> tuple[int, np.ndarray]:
        vi, si = job
        spec = variants[vi][1].with_seed(int(seeds[vi * n_seeds + si]))
        path = embed(emb, simulate(spec, n_max))
        if backend == "indexed":
            profile = prefix_min_indexed(path, gauge, tau,
                                         backend=PrefixNNBackend.metric_indexed())
        else:
            profile = prefix_min_profile(path, gauge, tau)
        return vi, profile.mins

    jobs = [(vi, si) for vi in range(len(variants)) for si in range(n_seeds)]
    results = _parallel(one_run, jobs, threads)

    mins_by_variant: dict[int, list[np.ndarray]] = {}
    for vi, mins in results:
        mins_by_variant.setdefault(vi, []).append(mins)

    rows = []
    for vi, (p, _) in enumerate(variants):
        tau_mix = 1 if p >= 1.0 else mixing_time(p, eps)
        for s in usable:
            gs = [sum(m[: s - tau].tolist()) / (s - tau) for m in mins_by_variant[vi]]
            arr = np.asarray(gs)
            rows.append(DecayRow(
                p=p,
                n=s,
                mean_g=float(arr.mean()),
                std_g=float(arr.std(ddof=1)) if n_seeds > 1 else 0.0,
                n_seeds=n_seeds,
                tau_mix=tau_mix,
                tau_over_n=None if tau_mix is None else tau_mix / s,
            ))
    return rows
