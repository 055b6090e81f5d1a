#!/usr/bin/env python3
"""Monte Carlo validation of the probabilistic claims, plus a decay study.

Validators simulate many trials and count how often a claimed bound fails;
the pass rule is an exact one-sided binomial test, so CI stays quiet unless
coverage really breaks.  The decay study tracks the mean gap estimator G
against sample size for several reset probabilities, next to the
mixing-time reference tau_mix / n.
"""

from gaugebounds import (
    EmbeddingSpec,
    GaugeSpec,
    IidBernoulli,
    MarkovModulatedBernoulli,
    ProcessSpec,
    decay_study,
    validate_excess_loss_coverage,
    validate_good_turing,
    validate_martingale_tail,
)

# --- tail coverage -------------------------------------------------------------

rep = validate_martingale_tail(IidBernoulli(0.3), n=200, delta=0.05, trials=5000, seed=1)
print(f"martingale tail, iid:  {rep.violations}/{rep.trials} violations "
      f"(target {rep.target}) -> pass={rep.passed}")

chain = MarkovModulatedBernoulli(stay0=0.9, stay1=0.7, q0=0.1, q1=0.6)
rep = validate_martingale_tail(chain, n=200, delta=0.05, trials=5000, seed=2)
print(f"martingale tail, mmb:  {rep.violations}/{rep.trials} violations -> pass={rep.passed}")

# --- bound coverage --------------------------------------------------------------

rep = validate_excess_loss_coverage(
    ProcessSpec.cycle_chain(16, 0.5), None, L=1.0, t=0.5, tau=3, n=128,
    delta=0.1, trials=200, seed=3)
print(f"excess-loss coverage (exact branch): rate={rep.violation_rate:.3f} -> pass={rep.passed}")

# --- estimator concentration ------------------------------------------------------

gt = validate_good_turing(20, 100, 0.5, trials=1000, seed=4)
print(f"good-turing: rms={gt.rms:.4f} within {gt.bound:.4f} -> pass={gt.passed}")

# --- decay study -------------------------------------------------------------------

print("\ndecay of G on raster-embedded torus paths (5 seeds):")
rows = decay_study(
    ProcessSpec.torus_rotation(p=0.5),
    EmbeddingSpec.raster_rotation(with_scaling=True),
    GaugeSpec.lipschitz(1.0),
    tau=1,
    sizes=[2 ** k for k in range(4, 11)],
    p_list=[1.0, 0.001],
    n_seeds=5,
    seed=5,
)
print(f"{'p':>6} {'n':>5} {'mean G':>9} {'std G':>8} {'tau_mix/n':>10}")
for r in rows:
    ref = "" if r.tau_over_n is None else f"{r.tau_over_n:10.4f}"
    print(f"{r.p:>6} {r.n:>5} {r.mean_g:9.4f} {r.std_g:8.4f} {ref}")
