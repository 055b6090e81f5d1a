"""Backends for the prefix-minimum kernel: naive scan and metric index.

The metric index exploits that every supported gauge is a nondecreasing
transform of a true metric (Euclidean or discrete).  It therefore minimizes
the base-metric distance with triangle-inequality pruning and applies the
transform once, to the minimum.  Because the transform is a monotone float
map and both backends evaluate pair distances through the same kernel, the
indexed profile is identical to the naive one, value for value, not merely
close.  Only minimum values are consumed, so distance ties need no
tie-breaking rule.

Structures:

  * Euclidean base metric: an incremental vantage-point tree.  Points are
    inserted by descending the current tree (expanding the per-child distance
    intervals on the way down); the whole tree is rebuilt whenever its size
    doubles, which keeps inserts amortized logarithmic without incremental
    rebalancing.  Queries prune a child when its triangle lower bound exceeds
    the current best by more than a small safety slack; the slack only ever
    costs extra visits, never correctness.
  * Discrete base metric: a hash set of seen keys (distance is 0 or 1).
  * Label-gated gauges: one sub-structure per label.

The regression gauge is a product metric; indexing it would need a third
structure for little gain at this scale, so it runs on the naive backend
only (extension point).

Every backend instance exposes distance_evaluations, the number of pair
evaluations of its last run.  The naive count is exactly the sum over
queries of the admissible-candidate counts.  A backend instance is
single-owner while a computation runs; results are plain immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import (
    EmptyPrefixError,
    ExceptionSet,
    PrefixGaugeProfile,
    _keep_indices,
    naive_prefix_mins,
)
from .geometry import (
    GaugeSpec,
    SamplePath,
    _euclid_row,
    base_metric_kind,
    check_gauge_path,
    distance_transform,
)

__all__ = [
    "PrefixNNBackend",
    "BackendMismatchError",
    "prefix_min_indexed",
    "leave_one_out_min",
]


class BackendMismatchError(ValueError):
    """The requested backend cannot serve the given gauge."""


class _Counter:
    __slots__ = ("value",)

    def __init__(self):
        self.value = 0


class _Node:
    __slots__ = ("vantage", "mu", "lo_in", "hi_in", "lo_out", "hi_out",
                 "inside", "outside", "bucket")

    def __init__(self):
        self.bucket = None
        self.inside = None
        self.outside = None


_SLACK = 1e-12  # pruning safety margin, relative to the node's distance scale


class _VPTree:
    """Incremental vantage-point tree over float64 rows."""

    def __init__(self, dim: int, counter: _Counter, leaf_size: int = 16):
        self._dim = dim
        self._counter = counter
        self._leaf_size = max(2, leaf_size)
        self._rows = np.empty((32, dim), dtype=np.float64)
        self._size = 0
        self._root: _Node | None = None
        self._last_rebuild = 1

    def _dist_block(self, idxs, q: np.ndarray) -> np.ndarray:
        block = self._rows[np.asarray(idxs, dtype=np.intp)]
        self._counter.value += block.shape[0]
        return _euclid_row(block, q)

    def _build(self, idxs: list[int]) -> _Node:
        node = _Node()
        if len(idxs) <= self._leaf_size:
            node.bucket = list(idxs)
            return node
        vantage = idxs[0]
        rest = np.asarray(idxs[1:], dtype=np.intp)
        d = self._dist_block(rest, self._rows[vantage])
        mu = float(np.partition(d, (d.size - 1) // 2)[(d.size - 1) // 2])
        mask = d <= mu
        if mask.all() or not mask.any():
            # degenerate split (ties/duplicates): keep everything in one bucket
            node.bucket = list(idxs)
            return node
        node.vantage = vantage
        node.mu = mu
        d_in, d_out = d[mask], d[~mask]
        node.lo_in, node.hi_in = float(d_in.min()), float(d_in.max())
        node.lo_out, node.hi_out = float(d_out.min()), float(d_out.max())
        node.inside = self._build(rest[mask].tolist())
        node.outside = self._build(rest[~mask].tolist())
        return node

    def _rebuild(self):
        self._root = self._build(list(range(self._size)))
        self._last_rebuild = self._size

    def insert(self, row: np.ndarray) -> None:
        if self._size == self._rows.shape[0]:
            grown = np.empty((2 * self._size, self._dim), dtype=np.float64)
            grown[: self._size] = self._rows
            self._rows = grown
        idx = self._size
        self._rows[idx] = row
        self._size += 1
        if self._root is None:
            node = _Node()
            node.bucket = [idx]
            self._root = node
            self._last_rebuild = 1
            return
        if self._size >= 2 * self._last_rebuild:
            self._rebuild()
            return
        node = self._root
        while node.bucket is None:
            dv = self._dist_block([node.vantage], row)[0]
            if dv <= node.mu:
                if node.inside is None:
                    leaf = _Node()
                    leaf.bucket = [idx]
                    node.inside = leaf
                    node.lo_in = node.hi_in = float(dv)
                    return
                node.lo_in = min(node.lo_in, dv)
                node.hi_in = max(node.hi_in, dv)
                node = node.inside
            else:
                if node.outside is None:
                    leaf = _Node()
                    leaf.bucket = [idx]
                    node.outside = leaf
                    node.lo_out = node.hi_out = float(dv)
                    return
                node.lo_out = min(node.lo_out, dv)
                node.hi_out = max(node.hi_out, dv)
                node = node.outside
        node.bucket.append(idx)

    def query_min(self, q: np.ndarray):
        """Smallest distance from q to any inserted row (inf when empty)."""
        if self._size == 0:
            return np.float64(np.inf)
        best = np.float64(np.inf)
        stack = [(self._root, 0.0, 0.0)]
        while stack:
            node, lb, slack = stack.pop()
            if lb > best + slack:
                continue
            if node.bucket is not None:
                if node.bucket:
                    d = self._dist_block(node.bucket, q)
                    m = d.min()
                    if m < best:
                        best = m
                continue
            dv = self._dist_block([node.vantage], q)[0]
            if dv < best:
                best = dv
            near_inside = dv <= node.mu
            children = (
                (node.outside, node.lo_out, node.hi_out),
                (node.inside, node.lo_in, node.hi_in),
            )
            if not near_inside:
                children = children[::-1]
            # push the near child last so it is explored first
            for child, lo, hi in children:
                if child is None:
                    continue
                lb_c = max(0.0, lo - dv, dv - hi)
                slack_c = _SLACK * (1.0 + dv + hi)
                if lb_c <= best + slack_c:
                    stack.append((child, lb_c, slack_c))
        return best


class _EqualityIndex:
    """Seen-key set for the discrete base metric: distances are 0 or 1."""

    def __init__(self, counter: _Counter):
        self._counter = counter
        self._seen = set()

    def insert(self, key) -> None:
        self._seen.add(key)

    def query_min(self, key):
        self._counter.value += 1
        if not self._seen:
            return np.float64(np.inf)
        return np.float64(0.0) if key in self._seen else np.float64(1.0)


def _coord_key(row: np.ndarray) -> bytes:
    # +0.0 folds -0.0 onto +0.0 so byte keys agree with value equality
    return (row + 0.0).tobytes()


class _MetricStructure:
    """Dispatches inserts/queries to the right substructure per gauge."""

    def __init__(self, gauge: GaugeSpec, path: SamplePath, counter: _Counter, leaf_size: int):
        self.gauge = gauge
        self.path = path
        self.counter = counter
        self.leaf_size = leaf_size
        self.discrete = base_metric_kind(gauge) == "discrete"
        if self.discrete:
            self._eq = _EqualityIndex(counter)
        elif gauge.kind == "hinge":
            self._by_label: dict[int, _VPTree] = {}
        else:
            self._tree = _VPTree(path.dim, counter, leaf_size)

    def _key(self, i: int):
        if self.path.kind == "symbol":
            return int(self.path.symbols[i])
        return _coord_key(self.path.coords[i])

    def insert(self, i: int) -> None:
        if self.discrete:
            self._eq.insert(self._key(i))
        elif self.gauge.kind == "hinge":
            label = int(self.path.labels[i])
            tree = self._by_label.get(label)
            if tree is None:
                tree = _VPTree(self.path.dim, self.counter, self.leaf_size)
                self._by_label[label] = tree
            tree.insert(self.path.coords[i])
        else:
            self._tree.insert(self.path.coords[i])

    def query_min_distance(self, i: int):
        if self.discrete:
            return self._eq.query_min(self._key(i))
        if self.gauge.kind == "hinge":
            tree = self._by_label.get(int(self.path.labels[i]))
            if tree is None:
                return np.float64(np.inf)
            return tree.query_min(self.path.coords[i])
        return self._tree.query_min(self.path.coords[i])


@dataclass
class PrefixNNBackend:
    """Backend selector plus the distance-evaluation telemetry of the last
    run.  Not thread-shareable while a computation is in flight."""

    kind: str
    leaf_size: int = 16
    distance_evaluations: int = 0

    @classmethod
    def naive(cls) -> "PrefixNNBackend":
        return cls(kind="naive")

    @classmethod
    def metric_indexed(cls, leaf_size: int = 16) -> "PrefixNNBackend":
        return cls(kind="metric-indexed", leaf_size=leaf_size)

    def __post_init__(self):
        if self.kind not in ("naive", "metric-indexed"):
            raise ValueError("backend kind must be 'naive' or 'metric-indexed'")


def _check_indexable(gauge: GaugeSpec) -> None:
    if gauge.kind == "regression":
        raise BackendMismatchError(
            "the regression gauge runs on the naive backend only; its product "
            "metric is not served by the metric index"
        )


def prefix_min_indexed(
    path: SamplePath,
    gauge: GaugeSpec,
    tau: int,
    exceptions: ExceptionSet | None = None,
    backend: PrefixNNBackend | None = None,
) -> PrefixGaugeProfile:
    """Prefix minima through the chosen backend; identical output either way.

    Candidates enter the index the moment they become eligible (lag at least
    tau behind the query, not excluded), so the structure is built
    incrementally alongside the scan.
    """
    if backend is None:
        backend = PrefixNNBackend.naive()
    backend.distance_evaluations = 0
    exc = () if exceptions is None else exceptions.indices
    if backend.kind == "naive":
        sink: list = []
        mins = naive_prefix_mins(path, gauge, tau, exceptions, count_sink=sink)
        backend.distance_evaluations = sink[0]
        return PrefixGaugeProfile(n=len(path), tau=tau, exceptions=exc, mins=mins)

    _check_indexable(gauge)
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
    excluded = frozenset(exc)
    counter = _Counter()
    structure = _MetricStructure(gauge, path, counter, backend.leaf_size)
    transform = distance_transform(gauge)
    mins = np.empty(n_eff, dtype=np.float64)
    for j in range(n_eff):
        if j not in excluded:
            structure.insert(j)
        dmin = structure.query_min_distance(tau + j)
        mins[j] = np.asarray(transform(dmin), dtype=np.float64)
    backend.distance_evaluations = counter.value
    return PrefixGaugeProfile(n=n, tau=tau, exceptions=exc, mins=mins)


def leave_one_out_min(
    path: SamplePath,
    gauge: GaugeSpec,
    backend: PrefixNNBackend | None = None,
) -> np.ndarray:
    """min over i != k of g(X_k, X_i) for every k, backend-agnostic values.

    The indexed route runs one forward and one backward prefix pass at lag 1
    and takes the elementwise minimum; monotonicity of the distance transform
    makes that equal to the direct leave-one-out scan.
    """
    n = len(path)
    if n < 2:
        raise ValueError("need at least two points")
    if backend is None:
        backend = PrefixNNBackend.naive()
    if backend.kind == "naive":
        from .estimators import leave_one_out_mins

        out = leave_one_out_mins(path, gauge)
        backend.distance_evaluations = n * (n - 1)
        return out

    fwd_backend = PrefixNNBackend.metric_indexed(backend.leaf_size)
    bwd_backend = PrefixNNBackend.metric_indexed(backend.leaf_size)
    fwd = prefix_min_indexed(path, gauge, tau=1, backend=fwd_backend)
    bwd = prefix_min_indexed(path.reversed(), gauge, tau=1, backend=bwd_backend)
    out = np.full(n, np.inf, dtype=np.float64)
    out[1:] = fwd.mins
    out[: n - 1] = np.minimum(out[: n - 1], bwd.mins[::-1])
    backend.distance_evaluations = (
        fwd_backend.distance_evaluations + bwd_backend.distance_evaluations
    )
    return out
