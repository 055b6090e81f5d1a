"""Point spaces, gauge functions, paired penalty rules and greedy covers.

A gauge g maps an ordered pair of points to [0, +inf] with g(y, x) = 0
exactly when y = x.  Each gauge variant carries a penalty rule phi so that
every function f of the matching loss class satisfies

    f(y) <= g(y, x) + phi(f, x)        for all points x, y.

The built-in variants:

==========================  =============================================
variant                     g(y, x)
==========================  =============================================
lipschitz (euclidean)       L * ||y - x||
lipschitz (discrete)        L * 1{y != x}
discrete                    1{y != x}
smooth(gamma, lam)          (1 + lam) * (gamma / 2) * ||y - x||^2
regression(L)               L * ||y - x|| + |y' - x'|   (paired points)
hinge_classification(L)     L * ||y - x|| if labels match, else +inf
local_lipschitz(r0)         ||y - x|| if ||y - x|| <= r0, else +inf
local_smooth(c)             (1/2) * (c * (1 + d^2))^2 * d^2,  d = ||y - x||
==========================  =============================================

The local_smooth form follows the construction g = (1/q) * (rho(d) * d)^q
with rho(r) = c * (1 + r^2) and q = 2.  An alternative reading with a
(c * (1 + d))^2 factor circulates; we implement the rho-consistent form
because it is the one the gauge-pair construction actually yields.

All gauge evaluations are pure functions of immutable inputs and safe for
concurrent use.  +inf is IEEE infinity, never a sentinel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Point",
    "SamplePath",
    "GaugeSpec",
    "FunctionSample",
    "GreedyCover",
    "eval_gauge",
    "eval_phi",
    "greedy_cover",
    "pairwise_gauge",
    "gauge_diameter",
]

_KINDS = ("coords", "symbol", "labeled", "paired")


def _as_float_vector(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"expected a flat coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite (no NaN/inf)")
    return arr


@dataclass(frozen=True)
class Point:
    """One observation: dense coordinates, a discrete symbol, or a product
    point carrying a classification label or a regression target."""

    kind: str
    coords: tuple[float, ...] | None = None
    symbol: int | None = None
    label: int | None = None
    target: float | None = None

    @classmethod
    def dense(cls, coords) -> "Point":
        return cls(kind="coords", coords=tuple(_as_float_vector(coords)))

    @classmethod
    def discrete(cls, symbol: int) -> "Point":
        if symbol < 0:
            raise ValueError("symbols are nonnegative integers")
        return cls(kind="symbol", symbol=int(symbol))

    @classmethod
    def with_label(cls, coords, label: int) -> "Point":
        if label not in (-1, 1):
            raise ValueError("label must be -1 or +1")
        return cls(kind="labeled", coords=tuple(_as_float_vector(coords)), label=int(label))

    @classmethod
    def with_target(cls, coords, target: float) -> "Point":
        if not math.isfinite(target):
            raise ValueError("target must be finite")
        return cls(kind="paired", coords=tuple(_as_float_vector(coords)), target=float(target))

    @property
    def dim(self) -> int:
        return 0 if self.kind == "symbol" else len(self.coords)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SamplePath:
    """Immutable ordered sequence of points sharing one variant and dimension."""

    kind: str
    coords: np.ndarray | None = None    # (n, D) float64
    symbols: np.ndarray | None = None   # (n,) int64
    labels: np.ndarray | None = None    # (n,) int64 in {-1, +1}
    targets: np.ndarray | None = None   # (n,) float64

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.kind == "symbol":
            sym = np.ascontiguousarray(np.asarray(self.symbols, dtype=np.int64))
            if sym.ndim != 1 or sym.size == 0:
                raise ValueError("symbol path needs a nonempty 1-d integer array")
            if (sym < 0).any():
                raise ValueError("symbols are nonnegative integers")
            object.__setattr__(self, "symbols", _freeze(sym))
            return
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        if coords.ndim == 1:
            coords = coords.reshape(-1, 1)
        if coords.ndim != 2 or coords.shape[0] == 0 or coords.shape[1] == 0:
            raise ValueError("coordinate path needs a nonempty (n, D) array")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite (no NaN/inf)")
        object.__setattr__(self, "coords", _freeze(coords))
        n = coords.shape[0]
        if self.kind == "labeled":
            lab = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
            if lab.shape != (n,):
                raise ValueError("labels must be one integer per point")
            if not np.isin(lab, (-1, 1)).all():
                raise ValueError("labels must be -1 or +1")
            object.__setattr__(self, "labels", _freeze(lab))
        elif self.kind == "paired":
            tgt = np.ascontiguousarray(np.asarray(self.targets, dtype=np.float64))
            if tgt.shape != (n,):
                raise ValueError("targets must be one real per point")
            if not np.all(np.isfinite(tgt)):
                raise ValueError("targets must be finite")
            object.__setattr__(self, "targets", _freeze(tgt))

    @classmethod
    def from_coords(cls, coords) -> "SamplePath":
        return cls(kind="coords", coords=np.asarray(coords, dtype=np.float64))

    @classmethod
    def from_symbols(cls, symbols) -> "SamplePath":
        return cls(kind="symbol", symbols=np.asarray(symbols, dtype=np.int64))

    @classmethod
    def from_labeled(cls, coords, labels) -> "SamplePath":
        return cls(kind="labeled", coords=np.asarray(coords, dtype=np.float64),
                   labels=np.asarray(labels, dtype=np.int64))

    @classmethod
    def from_paired(cls, coords, targets) -> "SamplePath":
        return cls(kind="paired", coords=np.asarray(coords, dtype=np.float64),
                   targets=np.asarray(targets, dtype=np.float64))

    @classmethod
    def from_points(cls, points: Sequence[Point]) -> "SamplePath":
        if not points:
            raise ValueError("empty point list")
        kind = points[0].kind
        if any(p.kind != kind for p in points):
            raise ValueError("all points in a path must share one variant")
        if kind == "symbol":
            return cls.from_symbols([p.symbol for p in points])
        coords = [p.coords for p in points]
        if kind == "labeled":
            return cls.from_labeled(coords, [p.label for p in points])
        if kind == "paired":
            return cls.from_paired(coords, [p.target for p in points])
        return cls.from_coords(coords)

    def __len__(self) -> int:
        return self.symbols.size if self.kind == "symbol" else self.coords.shape[0]

    @property
    def dim(self) -> int:
        return 0 if self.kind == "symbol" else self.coords.shape[1]

    def point(self, i: int) -> Point:
        if self.kind == "symbol":
            return Point.discrete(int(self.symbols[i]))
        coords = tuple(self.coords[i])
        if self.kind == "labeled":
            return Point(kind="labeled", coords=coords, label=int(self.labels[i]))
        if self.kind == "paired":
            return Point(kind="paired", coords=coords, target=float(self.targets[i]))
        return Point(kind="coords", coords=coords)

    def head(self, n: int) -> "SamplePath":
        """First n points, as a path."""
        if not 1 <= n <= len(self):
            raise ValueError(f"head length {n} out of range for path of length {len(self)}")
        if self.kind == "symbol":
            return SamplePath(kind="symbol", symbols=self.symbols[:n].copy())
        return SamplePath(
            kind=self.kind,
            coords=self.coords[:n].copy(),
            labels=None if self.labels is None else self.labels[:n].copy(),
            targets=None if self.targets is None else self.targets[:n].copy(),
        )

    def reversed(self) -> "SamplePath":
        if self.kind == "symbol":
            return SamplePath(kind="symbol", symbols=self.symbols[::-1].copy())
        return SamplePath(
            kind=self.kind,
            coords=self.coords[::-1].copy(),
            labels=None if self.labels is None else self.labels[::-1].copy(),
            targets=None if self.targets is None else self.targets[::-1].copy(),
        )


@dataclass(frozen=True)
class GaugeSpec:
    """Tagged description of one gauge variant and its parameters."""

    kind: str
    L: float | None = None
    metric: str = "euclidean"     # lipschitz base metric: "euclidean" | "discrete"
    gamma: float | None = None
    lam: float | None = None
    r0: float | None = None
    c: float | None = None

    @classmethod
    def lipschitz(cls, L: float, metric: str = "euclidean") -> "GaugeSpec":
        if L <= 0:
            raise ValueError("L must be positive")
        if metric not in ("euclidean", "discrete"):
            raise ValueError("base metric must be 'euclidean' or 'discrete'")
        return cls(kind="lipschitz", L=float(L), metric=metric)

    @classmethod
    def regression(cls, L: float) -> "GaugeSpec":
        if L <= 0:
            raise ValueError("L must be positive")
        return cls(kind="regression", L=float(L))

    @classmethod
    def hinge_classification(cls, L: float) -> "GaugeSpec":
        if L <= 0:
            raise ValueError("L must be positive")
        return cls(kind="hinge", L=float(L))

    @classmethod
    def smooth(cls, gamma: float, lam: float) -> "GaugeSpec":
        if gamma <= 0 or lam <= 0:
            raise ValueError("gamma and lam must be positive")
        return cls(kind="smooth", gamma=float(gamma), lam=float(lam))

    @classmethod
    def local_lipschitz_truncated(cls, r0: float) -> "GaugeSpec":
        if r0 <= 0:
            raise ValueError("r0 must be positive")
        return cls(kind="local_lipschitz", r0=float(r0))

    @classmethod
    def local_smooth(cls, c: float) -> "GaugeSpec":
        if c <= 0:
            raise ValueError("c must be positive")
        return cls(kind="local_smooth", c=float(c))

    @classmethod
    def discrete(cls) -> "GaugeSpec":
        return cls(kind="discrete")

    @property
    def takes_infinite_values(self) -> bool:
        """True for variants whose gauge can be +inf on finite-distance pairs.

        Such variants support only the excess-loss-probability route; the
        mean-risk route needs a finite sup of g.
        """
        return self.kind in ("hinge", "local_lipschitz")

    def sup_gauge(self, diameter: float) -> float:
        """Largest gauge value over pairs at base distance <= diameter."""
        if diameter < 0:
            raise ValueError("diameter must be nonnegative")
        if self.takes_infinite_values:
            return math.inf
        if self.kind == "discrete":
            return 1.0
        if self.kind == "lipschitz":
            return self.L * (1.0 if self.metric == "discrete" else diameter)
        if self.kind == "smooth":
            return (1.0 + self.lam) * (self.gamma / 2.0) * diameter ** 2
        if self.kind == "local_smooth":
            return 0.5 * (self.c * (1.0 + diameter ** 2)) ** 2 * diameter ** 2
        if self.kind == "regression":
            raise ValueError("regression sup depends on the target range, not only the diameter")
        raise ValueError(f"unknown gauge kind {self.kind!r}")


@dataclass(frozen=True)
class FunctionSample:
    """Caller-supplied local data of one loss function at the sample points.

    values[i] is f(X_i) >= 0.  The optional arrays supply the local gradient
    norms, local smoothness moduli and truncated local Lipschitz values that
    the local_smooth and local_lipschitz penalty rules consume.  Nothing here
    is estimated; it is observed data about f.
    """

    values: np.ndarray
    grad_norms: np.ndarray | None = None
    local_smoothness: np.ndarray | None = None
    local_lipschitz: np.ndarray | None = None

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        n = vals.size
        object.__setattr__(self, "values", _freeze(vals))
        for name in ("grad_norms", "local_smoothness", "local_lipschitz"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
            if arr.shape != (n,):
                raise ValueError(f"{name} must have the same length as values")
            if not np.all(np.isfinite(arr)) or (arr < 0).any():
                raise ValueError(f"{name} entries must be finite and nonnegative")
            object.__setattr__(self, name, _freeze(arr))
        if not np.all(np.isfinite(vals)) or (vals < 0).any():
            raise ValueError("values entries must be finite and nonnegative")


# ---------------------------------------------------------------------------
# distance kernels
#
# Every Euclidean distance in the package flows through _euclid_row so the
# naive scan and the metric index produce bit-identical floats.  The per-row
# reduction over D components is numpy's fixed-length pairwise sum, which is
# deterministic for a given D and dtype.
# ---------------------------------------------------------------------------

def _euclid_row(block: np.ndarray, q: np.ndarray) -> np.ndarray:
    diff = block - q
    return np.sqrt((diff * diff).sum(axis=1))


def _neq_row(block: np.ndarray, q) -> np.ndarray:
    if block.ndim == 1:
        return (block != q).astype(np.float64)
    return (block != q).any(axis=1).astype(np.float64)


def base_metric_kind(gauge: GaugeSpec) -> str | None:
    """Base metric that the gauge is a nondecreasing transform of.

    Returns "euclidean" or "discrete"; None for the regression gauge, which
    is a product metric handled by direct evaluation only.
    """
    if gauge.kind == "regression":
        return None
    if gauge.kind == "discrete" or (gauge.kind == "lipschitz" and gauge.metric == "discrete"):
        return "discrete"
    return "euclidean"


def distance_transform(gauge: GaugeSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Nondecreasing map from base-metric distance to gauge value.

    The same callable is applied elementwise by the naive scan and once, after
    the metric minimum, by the metric index; monotonicity makes the two
    orderings agree exactly, including in floating point.
    """
    kind = gauge.kind
    if kind in ("lipschitz", "hinge", "regression"):
        L = gauge.L
        return lambda d: L * d
    if kind == "discrete":
        return lambda d: d
    if kind == "smooth":
        scale = (1.0 + gauge.lam) * (gauge.gamma / 2.0)
        return lambda d: scale * (d * d)
    if kind == "local_lipschitz":
        r0 = gauge.r0
        return lambda d: np.where(d <= r0, d, np.inf)
    if kind == "local_smooth":
        c = gauge.c

        def local_smooth(d):
            # explicit multiplies: numpy's ** takes a different code path for
            # scalars than for arrays and can differ in the last ulp
            dd = d * d
            rho = c * (1.0 + dd)
            return 0.5 * (rho * rho) * dd

        return local_smooth
    raise ValueError(f"unknown gauge kind {kind!r}")


def _required_path_kind(gauge: GaugeSpec) -> tuple[str, ...]:
    if gauge.kind == "hinge":
        return ("labeled",)
    if gauge.kind == "regression":
        return ("paired",)
    if base_metric_kind(gauge) == "discrete":
        return ("symbol", "coords")
    return ("coords",)


def check_gauge_path(gauge: GaugeSpec, path: SamplePath) -> None:
    allowed = _required_path_kind(gauge)
    if path.kind not in allowed:
        raise ValueError(
            f"gauge {gauge.kind!r} expects point variant {' or '.join(allowed)}, "
            f"got {path.kind!r}"
        )


def gauge_row(gauge: GaugeSpec, path: SamplePath, query: int, cand) -> np.ndarray:
    """Gauge values g(X[query], X[i]) for i in cand, vectorized over cand.

    cand is an index array or a slice; slices index by view, which matters
    for the quadratic scans.
    """
    check_gauge_path(gauge, path)
    if not isinstance(cand, slice):
        cand = np.asarray(cand, dtype=np.intp)
    transform = distance_transform(gauge)
    if path.kind == "symbol":
        d = _neq_row(path.symbols[cand], path.symbols[query])
        return transform(d)
    if base_metric_kind(gauge) == "discrete":
        d = _neq_row(path.coords[cand], path.coords[query])
        return transform(d)
    d = _euclid_row(path.coords[cand], path.coords[query])
    if gauge.kind == "hinge":
        out = np.asarray(transform(d), dtype=np.float64)
        return np.where(path.labels[cand] == path.labels[query], out, np.inf)
    if gauge.kind == "regression":
        return transform(d) + np.abs(path.targets[cand] - path.targets[query])
    return transform(d)


def eval_gauge(gauge: GaugeSpec, y: Point, x: Point) -> float:
    """g(y, x) for a single ordered pair; 0 exactly when y equals x."""
    if y.kind != x.kind:
        raise ValueError(f"point variant mismatch: {y.kind!r} vs {x.kind!r}")
    if y.kind != "symbol" and y.dim != x.dim:
        raise ValueError(f"dimension mismatch: {y.dim} vs {x.dim}")
    path = SamplePath.from_points([x, y])
    return float(gauge_row(gauge, path, 1, np.array([0]))[0])


def eval_phi(gauge: GaugeSpec, fs: FunctionSample, i: int) -> float:
    """Penalty phi(f, X_i) of the gauge's companion rule.

    lipschitz / discrete / regression / hinge evaluate f; smooth scales the
    evaluation by (1 + 1/lam); the local variants add second-order terms
    built from the supplied local data:

        local_lipschitz:  f(x) + local_lipschitz^2 / 2
        local_smooth:     f(x) + (grad_norm + local_smoothness / 4)^2 / (2c)
    """
    if not 0 <= i < fs.values.size:
        raise IndexError(f"index {i} out of range")
    v = float(fs.values[i])
    kind = gauge.kind
    if kind in ("lipschitz", "discrete", "regression", "hinge"):
        return v
    if kind == "smooth":
        return (1.0 + 1.0 / gauge.lam) * v
    if kind == "local_lipschitz":
        if fs.local_lipschitz is None:
            raise ValueError("local_lipschitz gauge needs FunctionSample.local_lipschitz")
        return v + float(fs.local_lipschitz[i]) ** 2 / 2.0
    if kind == "local_smooth":
        if fs.grad_norms is None or fs.local_smoothness is None:
            raise ValueError("local_smooth gauge needs grad_norms and local_smoothness")
        g = float(fs.grad_norms[i])
        if v == 0.0 and g != 0.0:
            raise ValueError(
                "inconsistent sample: a nonnegative smooth function with value 0 "
                "has gradient 0 there"
            )
        return v + (g + float(fs.local_smoothness[i]) / 4.0) ** 2 / (2.0 * gauge.c)
    raise ValueError(f"unknown gauge kind {kind!r}")


def pairwise_gauge(gauge: GaugeSpec, path: SamplePath) -> np.ndarray:
    """Full (n, n) matrix of g(X_a, X_b).  All built-in variants are
    symmetric; the matrix is computed row-wise from the definition anyway."""
    n = len(path)
    out = np.empty((n, n), dtype=np.float64)
    idx = np.arange(n)
    for a in range(n):
        out[a] = gauge_row(gauge, path, a, idx)
    return out


def gauge_diameter(gauge: GaugeSpec, path: SamplePath) -> float:
    """Largest pairwise gauge value over the path."""
    return float(pairwise_gauge(gauge, path).max())


@dataclass(frozen=True)
class GreedyCover:
    n_parts: int
    assignment: np.ndarray  # (n,) part id per point

    def __post_init__(self):
        object.__setattr__(self, "assignment", _freeze(np.asarray(self.assignment, dtype=np.int64)))


def greedy_cover(points: SamplePath | Sequence[Point], gauge: GaugeSpec, eps: float) -> GreedyCover:
    """Partition the points into parts of gauge-diameter <= eps.

    Greedy rule, deterministic in input order: seed a new part with the first
    unassigned point, then absorb every later unassigned point whose gauge
    to all current members stays <= eps.  The part count upper-estimates the
    minimal cover number of the point set at scale eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    path = points if isinstance(points, SamplePath) else SamplePath.from_points(list(points))
    n = len(path)
    dist = pairwise_gauge(gauge, path)
    assignment = np.full(n, -1, dtype=np.int64)
    part = 0
    for seed in range(n):
        if assignment[seed] >= 0:
            continue
        assignment[seed] = part
        # running max gauge to the members absorbed so far
        cand_max = dist[:, seed].copy()
        for j in range(seed + 1, n):
            if assignment[j] >= 0 or cand_max[j] > eps:
                continue
            assignment[j] = part
            np.maximum(cand_max, dist[:, j], out=cand_max)
        part += 1
    return GreedyCover(n_parts=part, assignment=assignment)
