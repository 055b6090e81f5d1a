#!/usr/bin/env python3
"""Itemized bound reports: what each term costs and when a bound is vacuous.

Everything here is closed-form arithmetic; the estimator values would come
from demo 02 in a real pipeline.
"""

from gaugebounds import (
    ClassBounds,
    MixingProfile,
    covering_tail_bound,
    entropy_penalty,
    excess_loss_probability_bound,
    martingale_tail_threshold,
    risk_bound,
    risk_bound_with_exceptions,
)


def show(tag, rep):
    terms = "  ".join(f"{k.removesuffix('_term')}={v:.5f}" for k, v in rep.terms().items())
    flag = "  [VACUOUS]" if rep.vacuous else ""
    print(f"{tag:<26} total={rep.total:.5f}  ({terms}){flag}")


# confidence cost alone: e ln(1/delta) / n_eff
for n_eff in (100, 1000, 10000):
    print(f"confidence threshold, n_eff={n_eff:>5}:",
          round(martingale_tail_threshold(n_eff, 0.05), 6))

print()
mix = MixingProfile(tau=5, phi_tau=0.02)
cb = ClassBounds(sup_f=1.0, sup_g=1.0)

show("excess-loss, small G_t", excess_loss_probability_bound(0.05, mix, n=505, delta=0.05))
show("excess-loss, large G_t", excess_loss_probability_bound(0.45, mix, n=505, delta=0.05))

# the two mean-risk variants trade the estimator factor against the tail:
# with a dominant estimator term the factor-1 variant wins
show("risk martingale", risk_bound(0.2, cb, mix, n=505, delta=0.05, variant="martingale"))
show("risk azuma", risk_bound(0.2, cb, mix, n=505, delta=0.05, variant="azuma"))

# tolerating outliers: exclude a fraction alpha of positions, pay entropy
print()
for alpha in (0.0, 0.02, 0.1):
    h, rest = entropy_penalty(alpha, 500)
    rep = risk_bound_with_exceptions(0.05, cb, mix, n=505, delta=0.05, alpha=alpha)
    print(f"alpha={alpha:<5} H={h:.5f} Rest={rest:.2f} -> total={rep.total:.5f}")

# worst-case tail of G from a covering number of the support
print()
for n in (10**3, 10**4, 10**5):
    val = covering_tail_bound(n_cover=50, n=n, tau=10, t=0.2, alpha_tau=1e-4)
    print(f"covering tail at n={n:>6}: {val:.5f}")
