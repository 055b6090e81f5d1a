"""Seeded simulators for stationary reset chains, plus ambient embeddings.

Chains.  Each process follows a deterministic map on its phase space (unit
step on the N-cycle, rotation by a fixed increment on the circle or torus)
and, independently at every step with probability p, forgets its state and
redraws it from the uniform invariant distribution.  The start is drawn from
the same distribution, so every marginal is exactly stationary.  p = 1 is
iid sampling; p = 0 is the bare deterministic motion.

Because one reset anywhere inside a gap of tau steps makes the conditional
law exactly stationary, the dependence coefficients obey

    phi(tau) <= (1 - p)^tau        (and likewise alpha(tau)),

which mixing_bounds reports as a chain-derived profile.

Randomness.  All draws come from numpy's Philox counter-based generator.
A simulator derives three sub-streams from its seed by SeedSequence spawning
(children 0, 1, 2 of SeedSequence(seed)): starts, reset coin flips, and
redraw values.  Identical seeds with different forced starts therefore
coincide from the first reset onward, exactly.

Embeddings map phase paths into ambient space: identity, truncated Fourier
features on the circle, and a 16x16 raster image rotated (and optionally
scaled) by the phase, mean-centered and normalized to Euclidean norm 1/2.

The default rotation increments are the golden irrational 1/phi^2 and
sqrt(2) - 1, chosen for their slow rational approximation (well-spread
orbits); recurrence behavior is measured, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._template import TEMPLATE_16
from .bounds import MixingProfile
from .estimators import FiniteSupport, SamplerOracle
from .geometry import SamplePath

__all__ = [
    "ProcessSpec",
    "EmbeddingSpec",
    "ZETA_GOLDEN",
    "ZETA_SILVER",
    "simulate",
    "simulate_with_details",
    "embed",
    "mixing_bounds",
    "mixing_time",
    "stationary_oracle",
    "phase_distance",
    "fourier_lipschitz_bracket",
    "empirical_lipschitz",
]

ZETA_GOLDEN = (3.0 - math.sqrt(5.0)) / 2.0   # 1/phi^2 = 0.3819660...
ZETA_SILVER = math.sqrt(2.0) - 1.0           # 0.4142135...


@dataclass(frozen=True)
class ProcessSpec:
    """Generative description of one stationary process plus its seed."""

    kind: str                      # "cycle" | "circle" | "torus" | "iid"
    seed: int = 0
    n_states: int | None = None    # cycle (and iid on the cycle)
    zeta: float | None = None      # circle increment
    zeta1: float | None = None     # torus increments
    zeta2: float | None = None
    reset_p: float | None = None   # reset probability p
    space: str | None = None       # iid: "cycle" | "circle" | "torus"

    def __post_init__(self):
        if self.kind not in ("cycle", "circle", "torus", "iid"):
            raise ValueError(f"unknown process kind {self.kind!r}")
        if self.kind != "iid":
            p = self.reset_p
            if p is None or not 0.0 <= p <= 1.0:
                raise ValueError("reset probability must lie in [0, 1]")
        if self.kind == "cycle" and (self.n_states is None or self.n_states < 2):
            raise ValueError("cycle chain needs at least 2 states")
        if self.kind == "iid":
            if self.space not in ("cycle", "circle", "torus"):
                raise ValueError("iid space must be 'cycle', 'circle' or 'torus'")
            if self.space == "cycle" and (self.n_states is None or self.n_states < 2):
                raise ValueError("iid on the cycle needs n_states >= 2")

    @classmethod
    def cycle_chain(cls, n_states: int, p: float, seed: int = 0) -> "ProcessSpec":
        return cls(kind="cycle", n_states=int(n_states), reset_p=float(p), seed=seed)

    @classmethod
    def circle_rotation(cls, zeta: float = ZETA_GOLDEN, p: float = 0.0, seed: int = 0) -> "ProcessSpec":
        if not 0.0 <= zeta < 1.0:
            raise ValueError("zeta must lie in [0, 1)")
        return cls(kind="circle", zeta=float(zeta), reset_p=float(p), seed=seed)

    @classmethod
    def torus_rotation(cls, zeta1: float = ZETA_GOLDEN, zeta2: float = ZETA_SILVER,
                       p: float = 0.0, seed: int = 0) -> "ProcessSpec":
        for z in (zeta1, zeta2):
            if not 0.0 <= z < 1.0:
                raise ValueError("increments must lie in [0, 1)")
        return cls(kind="torus", zeta1=float(zeta1), zeta2=float(zeta2),
                   reset_p=float(p), seed=seed)

    @classmethod
    def iid_uniform(cls, space: str, n_states: int | None = None, seed: int = 0) -> "ProcessSpec":
        return cls(kind="iid", space=space, n_states=n_states, seed=seed)

    def with_seed(self, seed: int) -> "ProcessSpec":
        return replace(self, seed=int(seed))

    def with_reset_p(self, p: float) -> "ProcessSpec":
        if self.kind == "iid":
            raise ValueError("iid processes have no reset probability")
        return replace(self, reset_p=float(p))

    @property
    def phase_dim(self) -> int:
        kind = self.space if self.kind == "iid" else self.kind
        return {"cycle": 0, "circle": 1, "torus": 2}[kind]


def _streams(seed: int):
    root = np.random.SeedSequence(seed)
    start_ss, reset_ss, redraw_ss = root.spawn(3)
    make = lambda ss: np.random.Generator(np.random.Philox(ss))
    return make(start_ss), make(reset_ss), make(redraw_ss)


def _draw_uniform(spec: ProcessSpec, gen: np.random.Generator, m: int):
    kind = spec.space if spec.kind == "iid" else spec.kind
    if kind == "cycle":
        return gen.integers(0, spec.n_states, size=m, dtype=np.int64)
    if kind == "circle":
        return gen.random(m)
    return gen.random((m, 2))


def simulate_with_details(
    spec: ProcessSpec, n: int, start=None
) -> tuple[SamplePath, np.ndarray]:
    """Simulate and also return the reset positions (for coupling tests)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    start_gen, reset_gen, redraw_gen = _streams(spec.seed)

    if spec.kind == "iid":
        draws = _draw_uniform(spec, redraw_gen, n)
        if spec.space == "cycle":
            path = SamplePath.from_symbols(draws)
        else:
            path = SamplePath.from_coords(draws.reshape(n, -1))
        return path, np.arange(1, n, dtype=np.int64)

    if start is None:
        start_val = _draw_uniform(spec, start_gen, 1)[0]
    else:
        start_val = np.asarray(start)
    p = spec.reset_p
    resets = reset_gen.random(n - 1) < p if n > 1 else np.zeros(0, dtype=bool)
    reset_pos = np.flatnonzero(resets) + 1
    m = reset_pos.size
    redraws = _draw_uniform(spec, redraw_gen, m)

    marker = np.zeros(n, dtype=np.int64)
    marker[reset_pos] = reset_pos
    anchor = np.maximum.accumulate(marker)
    steps = np.arange(n, dtype=np.int64) - anchor

    if spec.kind == "cycle":
        base = np.zeros(n, dtype=np.int64)
        base[0] = int(start_val)
        base[reset_pos] = redraws
        values = (base[anchor] + steps) % spec.n_states
        return SamplePath.from_symbols(values), reset_pos

    if spec.kind == "circle":
        base = np.zeros(n, dtype=np.float64)
        base[0] = float(start_val)
        base[reset_pos] = redraws
        values = (base[anchor] + steps * spec.zeta) % 1.0
        return SamplePath.from_coords(values.reshape(n, 1)), reset_pos

    base = np.zeros((n, 2), dtype=np.float64)
    base[0] = np.asarray(start_val, dtype=np.float64).reshape(2)
    if m:
        base[reset_pos] = redraws
    zeta = np.array([spec.zeta1, spec.zeta2])
    values = (base[anchor] + steps[:, None] * zeta) % 1.0
    return SamplePath.from_coords(values), reset_pos


def simulate(spec: ProcessSpec, n: int, start=None) -> SamplePath:
    """Stationary path of length n: uniform start, then n - 1 transitions.

    start overrides the drawn initial state (test hook; the path is no longer
    stationary at position 0 when forced)."""
    return simulate_with_details(spec, n, start=start)[0]


def mixing_time(p: float, eps: float = 0.1) -> int | None:
    """Smallest tau with (1 - p)^tau <= eps; None when p = 0, 1 when p = 1."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if p == 0.0:
        return None
    if p == 1.0:
        return 1
    tau = max(1, math.ceil(math.log(eps) / math.log(1.0 - p) - 1e-12))
    while (1.0 - p) ** tau > eps:
        tau += 1
    while tau > 1 and (1.0 - p) ** (tau - 1) <= eps:
        tau -= 1
    return tau


def mixing_bounds(spec: ProcessSpec, tau: int) -> MixingProfile:
    """Coupling bound phi(tau) = alpha(tau) = (1 - p)^tau for reset chains."""
    if spec.kind == "iid":
        raise ValueError("iid processes carry no reset coupling; use MixingProfile.iid()")
    if tau < 1:
        raise ValueError("tau must be a positive integer")
    coeff = (1.0 - spec.reset_p) ** tau
    return MixingProfile(tau=tau, phi_tau=coeff, alpha_tau=coeff, provenance="chain-derived")


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingSpec:
    """Map from phase space into ambient coordinates."""

    kind: str                      # "identity" | "fourier" | "raster"
    dim: int | None = None         # fourier output dimension (even)
    with_scaling: bool = False     # raster: modulate size from the 2nd phase
    template: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "fourier", "raster"):
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if self.kind == "fourier":
            if self.dim is None or self.dim < 2 or self.dim % 2:
                raise ValueError("fourier embedding needs an even dimension >= 2")
        if self.kind == "raster":
            tpl = TEMPLATE_16 if self.template is None else np.asarray(self.template, dtype=np.float64)
            if tpl.shape != (16, 16):
                raise ValueError("raster template must be a 16x16 grid")
            tpl = tpl.copy()
            tpl.setflags(write=False)
            object.__setattr__(self, "template", tpl)

    @classmethod
    def identity(cls) -> "EmbeddingSpec":
        return cls(kind="identity")

    @classmethod
    def fourier(cls, dim: int) -> "EmbeddingSpec":
        return cls(kind="fourier", dim=int(dim))

    @classmethod
    def raster_rotation(cls, with_scaling: bool = False, template=None) -> "EmbeddingSpec":
        return cls(kind="raster", with_scaling=with_scaling, template=template)

    @property
    def phase_dim(self) -> int | None:
        if self.kind == "identity":
            return None
        if self.kind == "fourier":
            return 1
        return 2 if self.with_scaling else 1


def _raster_render(template: np.ndarray, angles: np.ndarray, scales: np.ndarray) -> np.ndarray:
    size = 16
    center = (size - 1) / 2.0
    grid = np.arange(size, dtype=np.float64) - center
    px = np.tile(grid, size)            # column offsets, row-major pixels
    py = np.repeat(grid, size)          # row offsets
    cos = np.cos(angles)[:, None]
    sin = np.sin(angles)[:, None]
    inv_s = (1.0 / scales)[:, None]
    # inverse map: rotate by -angle, undo the scale, then bilinear-sample
    sx = (cos * px + sin * py) * inv_s + center
    sy = (-sin * px + cos * py) * inv_s + center
    x0 = np.floor(sx)
    y0 = np.floor(sy)
    fx = sx - x0
    fy = sy - y0
    out = np.zeros_like(sx)
    for dx, dy, w in ((0, 0, (1 - fx) * (1 - fy)), (1, 0, fx * (1 - fy)),
                      (0, 1, (1 - fx) * fy), (1, 1, fx * fy)):
        xi = (x0 + dx).astype(np.int64)
        yi = (y0 + dy).astype(np.int64)
        valid = (xi >= 0) & (xi < size) & (yi >= 0) & (yi < size)
        vals = template[np.clip(yi, 0, size - 1), np.clip(xi, 0, size - 1)]
        out += w * np.where(valid, vals, 0.0)
    return out


def embed(emb: EmbeddingSpec, path: SamplePath) -> SamplePath:
    """Pointwise embedding of a phase path into ambient coordinates."""
    if emb.kind == "identity":
        return path
    if path.kind != "coords":
        raise ValueError(f"{emb.kind} embedding needs coordinate phase points, got {path.kind!r}")
    if path.dim != emb.phase_dim:
        raise ValueError(
            f"{emb.kind} embedding expects phase dimension {emb.phase_dim}, got {path.dim}"
        )
    if emb.kind == "fourier":
        x = path.coords[:, 0]
        half = emb.dim // 2
        scale = math.sqrt(2.0 / emb.dim)
        out = np.empty((len(path), emb.dim), dtype=np.float64)
        for k in range(1, half + 1):
            arg = 2.0 * math.pi * k * x
            out[:, 2 * (k - 1)] = np.cos(arg) * scale
            out[:, 2 * k - 1] = np.sin(arg) * scale
        return SamplePath.from_coords(out)

    angles = 2.0 * math.pi * path.coords[:, 0]
    if emb.with_scaling:
        scales = 0.75 + np.cos(2.0 * math.pi * path.coords[:, 1]) / 4.0
    else:
        scales = np.ones(len(path), dtype=np.float64)
    imgs = _raster_render(emb.template, angles, scales)
    imgs = imgs - imgs.mean(axis=1, keepdims=True)
    norms = np.sqrt((imgs * imgs).sum(axis=1))
    if (norms < 1e-12).any():
        raise ValueError("degenerate raster image with zero contrast")
    imgs *= (0.5 / norms)[:, None]
    return SamplePath.from_coords(imgs)


def stationary_oracle(spec: ProcessSpec, emb: EmbeddingSpec | None = None):
    """Sampling handle for the invariant distribution, embedded if asked.

    Finite support (exact enumeration) for cycle state spaces, a fresh-draw
    sampler otherwise.
    """
    emb = emb or EmbeddingSpec.identity()
    kind = spec.space if spec.kind == "iid" else spec.kind
    if kind == "cycle":
        support = SamplePath.from_symbols(np.arange(spec.n_states, dtype=np.int64))
        support = embed(emb, support)
        probs = np.full(spec.n_states, 1.0 / spec.n_states)
        return FiniteSupport(support=support, probs=probs)

    phase_dim = 1 if kind == "circle" else 2

    def draw(rng: np.random.Generator, m: int) -> SamplePath:
        phase = SamplePath.from_coords(rng.random((m, phase_dim)))
        return embed(emb, phase)

    return SamplerOracle(draw=draw)


# ---------------------------------------------------------------------------
# phase metrics and embedding regularity
# ---------------------------------------------------------------------------

def phase_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Wraparound metric on the circle/torus: per-coordinate arc distance,
    Euclidean across coordinates."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    d = np.abs(a - b) % 1.0
    d = np.minimum(d, 1.0 - d)
    return np.sqrt((d * d).sum(axis=1))


def fourier_lipschitz_bracket(dim: int) -> tuple[float, float, float]:
    """(lower_slope, upper_slope, max_arc): on phase arcs up to max_arc the
    embedded distance divided by the arc lies inside the bracket; the upper
    slope is a global Lipschitz constant."""
    if dim < 2 or dim % 2:
        raise ValueError("dim must be an even integer >= 2")
    half = dim // 2
    s = math.sqrt(2.0 / dim)
    root_sum_sq = math.sqrt(sum(k * k for k in range(1, half + 1)))
    return 4.0 * s * root_sum_sq, 2.0 * math.pi * s * root_sum_sq, 1.0 / dim


def empirical_lipschitz(
    emb: EmbeddingSpec,
    n_pairs: int = 1000,
    seed: int = 0,
    near_scale: float = 1e-3,
) -> float:
    """Largest observed ratio of embedded distance to phase distance over
    seeded random pairs (half of them near pairs probing the local slope)."""
    if emb.phase_dim is None:
        raise ValueError("identity embedding has no fixed phase space to sample")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    d = emb.phase_dim
    a = rng.random((n_pairs, d))
    b = rng.random((n_pairs, d))
    half = n_pairs // 2
    b[:half] = (a[:half] + near_scale * (rng.random((half, d)) - 0.5)) % 1.0
    ea = embed(emb, SamplePath.from_coords(a)).coords
    eb = embed(emb, SamplePath.from_coords(b)).coords
    diff = ea - eb
    emb_dist = np.sqrt((diff * diff).sum(axis=1))
    ph_dist = phase_distance(a, b)
    mask = ph_dist > 1e-12
    return float((emb_dist[mask] / ph_dist[mask]).max())
