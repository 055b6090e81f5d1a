#!/usr/bin/env python3
"""Prefix gap estimators and their relatives, from a path alone.

The mean estimator G averages, over the path, the gauge from each point to
its admissible prefix (candidates at least tau steps older).  The threshold
estimator G_t counts how often that gap exceeds t.  Both are observable
without fresh data; the ground-truth missing mass needs the sampling
distribution, which simulated processes can provide.
"""

import numpy as np

from gaugebounds import (
    ExceptionSet,
    GaugeSpec,
    ProcessSpec,
    good_turing,
    missing_mass_G,
    missing_mass_Gt,
    prefix_min_profile,
    simulate,
    stationary_oracle,
    true_missing_mass,
)

gauge = GaugeSpec.lipschitz(1.0, metric="discrete")

# a lazily revisiting chain: 16 states, reset with probability 0.3
spec = ProcessSpec.cycle_chain(16, 0.3, seed=11)
path = simulate(spec, 200)
tau = 2

profile = prefix_min_profile(path, gauge, tau)
print("first profile entries:", profile.mins[:12])
print("G  =", round(missing_mass_G(profile), 4))
for t in (0.5, 0.9):
    print(f"G_t at t={t}:", round(missing_mass_Gt(profile, t), 4))

# leave-one-out flavor: the generalized Good-Turing estimator
print("good-turing at 0.5:", round(good_turing(path, gauge, 0.5), 4))

# ground truth, exact because the state space is finite
oracle = stationary_oracle(spec)
truth = true_missing_mass(path.head(len(path) - tau), gauge, 0.5, oracle)
print("true missing mass:", truth.value, "(exact:", truth.exact, ")")

# --- exception sets ----------------------------------------------------------

# excluding positions can only raise the profile entries; the bound pays an
# entropy penalty for that freedom, see demo 03
circle = simulate(ProcessSpec.circle_rotation(p=0.2, seed=4), 80)
euclid = GaugeSpec.lipschitz(1.0)
base = prefix_min_profile(circle, euclid, tau)
rng = np.random.default_rng(0)
phi_vals = rng.random(len(circle) - tau)   # stand-in for observed penalties
exc = ExceptionSet.worst_phi(phi_vals, alpha=13 / phi_vals.size)
excluded = prefix_min_profile(circle, euclid, tau, exceptions=exc)
print("\nexcluded positions:", exc.indices)
print("G grows under exclusions:",
      round(missing_mass_G(base), 4), "->", round(missing_mass_G(excluded), 4))
