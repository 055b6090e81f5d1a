#!/usr/bin/env python3
"""Reset chains, their dependence bounds, and ambient embeddings.

A reset chain follows a deterministic rotation and redraws its state from
the uniform distribution with probability p each step.  One reset anywhere
in a gap of tau steps makes the past irrelevant, so (1 - p)^tau bounds the
dependence coefficients at gap tau.
"""

import numpy as np

from gaugebounds import (
    EmbeddingSpec,
    ProcessSpec,
    embed,
    empirical_lipschitz,
    fourier_lipschitz_bracket,
    mixing_bounds,
    mixing_time,
    simulate,
    simulate_with_details,
)

# --- chains -------------------------------------------------------------------

spec = ProcessSpec.circle_rotation(p=0.1, seed=42)
path = simulate(spec, 8)
print("circle path:", np.round(path.coords.ravel(), 4))

for tau in (1, 10, 22, 50):
    print(f"dependence bound at gap {tau}:", round(mixing_bounds(spec, tau).phi_tau, 4))
print("gap needed for coefficient <= 0.1:", mixing_time(0.1))

# two chains sharing reset/redraw randomness couple exactly after one reset
a, resets = simulate_with_details(spec, 12, start=0.05)
b, _ = simulate_with_details(spec, 12, start=0.95)
first = resets[0] if resets.size else None
print("first reset at:", first,
      "| coincide after:", np.array_equal(a.coords[first:], b.coords[first:]))

# --- embeddings ---------------------------------------------------------------

# trigonometric features: analytic distortion bracket on small arcs
emb = EmbeddingSpec.fourier(8)
lo, hi, max_arc = fourier_lipschitz_bracket(8)
print(f"\nfourier D=8 slope bracket [{lo:.3f}, {hi:.3f}] on arcs <= {max_arc}")

# raster images: a fixed 16x16 template rotated (and scaled) by the phase,
# producing mean-centered points of norm 1/2 in dimension 256
torus = ProcessSpec.torus_rotation(p=0.001, seed=1)
raster = EmbeddingSpec.raster_rotation(with_scaling=True)
images = embed(raster, simulate(torus, 64))
norms = np.sqrt((images.coords ** 2).sum(axis=1))
print("raster image dim:", images.dim, "| norm spread:", norms.min(), "-", norms.max())
print("empirical embedding slope:", round(empirical_lipschitz(raster, n_pairs=500, seed=0), 3))
