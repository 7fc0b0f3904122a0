"""Recursive equal-mass partitions and discretization into bin counts.

The moving partition splits the space coordinate by coordinate.  At each
region the split points are order statistics of the building sample restricted
to that region, taken at indices floor(n_region * s / branching).  Intervals
are half-open (lo, hi]; the first and last interval of every split extend to
the axis support bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import math

import numpy as np

from hellfit.dataset import Dataset


class CapacityError(ValueError):
    """Building sample too small for the requested branching."""


@dataclass(frozen=True)
class PartitionSpec:
    """How to split: depth, per-level or per-region branching, axis order.

    ``branching`` is one of
      - an int: the same number of bins at every split,
      - a sequence of ints: one bin count per level,
      - a mapping from region path tuples (e.g. ``()``, ``(0,)``, ``(0, 2)``)
        to that region's bin count.
    """

    depth: int
    branching: object = 2
    axis_order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if isinstance(self.branching, (list, tuple)):
            object.__setattr__(self, "branching", tuple(int(b) for b in self.branching))
            if len(self.branching) != self.depth:
                raise ValueError("per-level branching list must have one entry per level")
        if self.axis_order is not None:
            order = tuple(int(a) for a in self.axis_order)
            if len(order) != self.depth or len(set(order)) != self.depth:
                raise ValueError("axis_order must be a permutation of depth distinct axes")
            object.__setattr__(self, "axis_order", order)
        if isinstance(self.branching, int) and self.branching < 2:
            raise ValueError("every branching value must be >= 2")

    def branching_at(self, path: tuple[int, ...]) -> int:
        b = self.branching
        if isinstance(b, int):
            bins = b
        elif isinstance(b, tuple):
            bins = b[len(path)]
        else:
            bins = int(b[path])
        if bins < 2:
            raise ValueError(f"region {path}: branching value must be >= 2")
        return bins

    def axis_at(self, level: int) -> int:
        if self.axis_order is not None:
            return self.axis_order[level]
        return level


@dataclass(frozen=True)
class Leaf:
    index: int
    path: tuple[int, ...]
    intervals: tuple[tuple[float, float], ...]  # one (lo, hi] per split step
    count: int | None  # building-sample count; None for fixed grids


class _Node:
    __slots__ = ("axis", "breaks", "children", "leaf")

    def __init__(self, axis=None, breaks=None, children=None, leaf=None):
        self.axis = axis
        self.breaks = breaks
        self.children = children
        self.leaf = leaf


@dataclass(frozen=True)
class PartitionTree:
    """Immutable nested-region partition with leaves in lexicographic order."""

    k: int
    depth: int
    axes: tuple[int, ...]  # split axis per level
    bounds: tuple[tuple[float, float], ...]
    leaves: tuple[Leaf, ...]
    root: _Node = field(repr=False, compare=False)

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)


def build_moving_partition(model_sample: Dataset, spec: PartitionSpec) -> PartitionTree:
    """Equal-mass recursive partition built from the model sample."""
    if spec.depth > model_sample.k:
        raise ValueError("partition depth exceeds sample dimension")
    axes = tuple(spec.axis_at(level) for level in range(spec.depth))
    if max(axes) >= model_sample.k:
        raise ValueError("axis_order references a missing coordinate")

    leaves: list[Leaf] = []

    def build(values, path, intervals):
        level = len(path)
        if level == spec.depth:
            leaf = Leaf(len(leaves), path, tuple(intervals), len(values))
            leaves.append(leaf)
            return _Node(leaf=leaf)
        bins = spec.branching_at(path)
        n = len(values)
        if n < bins:
            raise CapacityError(
                f"region {path}: {n} building points cannot fill {bins} bins"
            )
        axis = axes[level]
        order = np.argsort(values[:, axis], kind="stable")
        values = values[order]
        col = values[:, axis]
        cuts = [n * j // bins for j in range(bins + 1)]
        breaks = col[np.asarray(cuts[1:-1], dtype=int) - 1]  # order stats, 1-indexed
        lo_bound, hi_bound = model_sample.bounds[axis]
        children = []
        for j in range(bins):
            lo = lo_bound if j == 0 else breaks[j - 1]
            hi = hi_bound if j == bins - 1 else breaks[j]
            children.append(
                build(values[cuts[j]:cuts[j + 1]], path + (j,), intervals + [(lo, hi)])
            )
        return _Node(axis=axis, breaks=breaks, children=children)

    root = build(model_sample.values, (), [])
    return PartitionTree(
        k=model_sample.k,
        depth=spec.depth,
        axes=axes,
        bounds=model_sample.bounds,
        leaves=tuple(leaves),
        root=root,
    )


def build_fixed_partition(grid, bounds=None) -> PartitionTree:
    """Sample-independent product grid from per-axis sorted breakpoint lists."""
    grid = [np.asarray(g, dtype=float) for g in grid]
    k = len(grid)
    if k < 1:
        raise ValueError("need breakpoints for at least one axis")
    for i, g in enumerate(grid):
        if g.size and np.any(np.diff(g) <= 0):
            raise ValueError(f"axis {i}: breakpoints must be strictly increasing")
    bounds = tuple(bounds) if bounds else tuple((-np.inf, np.inf) for _ in range(k))

    leaves: list[Leaf] = []

    def build(path, intervals):
        level = len(path)
        if level == k:
            leaf = Leaf(len(leaves), path, tuple(intervals), None)
            leaves.append(leaf)
            return _Node(leaf=leaf)
        breaks = grid[level]
        lo_bound, hi_bound = bounds[level]
        children = []
        for j in range(breaks.size + 1):
            lo = lo_bound if j == 0 else breaks[j - 1]
            hi = hi_bound if j == breaks.size else breaks[j]
            children.append(build(path + (j,), intervals + [(lo, hi)]))
        return _Node(axis=level, breaks=breaks, children=children)

    root = build((), [])
    return PartitionTree(
        k=k, depth=k, axes=tuple(range(k)), bounds=bounds, leaves=tuple(leaves), root=root
    )


def locate(tree: PartitionTree, point) -> int:
    """Index of the unique leaf whose (lo, hi] interval chain contains point."""
    point = np.asarray(point, dtype=float)
    node = tree.root
    while node.leaf is None:
        j = int(np.searchsorted(node.breaks, point[node.axis], side="left"))
        node = node.children[j]
    return node.leaf.index


def count_into_bins(tree: PartitionTree, sample: Dataset):
    """Vector of per-leaf row counts for the sample; sums to sample.n."""
    if sample.k != tree.k:
        raise ValueError(f"sample dimension {sample.k} != tree dimension {tree.k}")
    counts = np.zeros(tree.leaf_count, dtype=np.int64)

    def descend(node, values):
        if node.leaf is not None:
            counts[node.leaf.index] += len(values)
            return
        idx = np.searchsorted(node.breaks, values[:, node.axis], side="left")
        for j, child in enumerate(node.children):
            sub = values[idx == j]
            if len(sub):
                descend(child, sub)

    descend(tree.root, sample.values)
    return counts


def model_pmf(tree: PartitionTree) -> np.ndarray:
    """Theoretical equal-mass leaf probabilities 1/(product of branchings)."""
    if any(leaf.count is None for leaf in tree.leaves):
        raise ValueError("model_pmf requires a moving partition")
    probs = np.empty(tree.leaf_count)
    sizes = _sibling_counts(tree.root)
    for leaf in tree.leaves:
        total = 1
        for level in range(tree.depth):
            total *= sizes[leaf.path[:level]]
        probs[leaf.index] = 1.0 / total
    return probs


def _sibling_counts(root) -> dict:
    sizes = {}

    def walk(node, path):
        if node.leaf is not None:
            return
        sizes[path] = len(node.children)
        for j, child in enumerate(node.children):
            walk(child, path + (j,))

    walk(root, ())
    return sizes


def free_param_count(tree: PartitionTree) -> int:
    """Free parameters of the induced multinomial: leaf count minus one."""
    return tree.leaf_count - 1


def _endpoint_to_json(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _endpoint_from_json(x) -> float:
    if isinstance(x, str):
        return float(x)
    return float(x)


def tree_to_json(tree: PartitionTree) -> str:
    doc = {
        "dimension": tree.k,
        "depth": tree.depth,
        "axes": list(tree.axes),
        "bounds": [[_endpoint_to_json(lo), _endpoint_to_json(hi)] for lo, hi in tree.bounds],
        "leaves": [
            {
                "path": list(leaf.path),
                "intervals": [
                    [_endpoint_to_json(lo), _endpoint_to_json(hi)]
                    for lo, hi in leaf.intervals
                ],
                "count": leaf.count,
            }
            for leaf in tree.leaves
        ],
    }
    return json.dumps(doc, indent=2)


def tree_from_json(text: str) -> PartitionTree:
    doc = json.loads(text)
    axes = tuple(doc["axes"])
    depth = doc["depth"]
    bounds = tuple(
        (_endpoint_from_json(lo), _endpoint_from_json(hi)) for lo, hi in doc["bounds"]
    )
    leaves = tuple(
        Leaf(
            index=i,
            path=tuple(entry["path"]),
            intervals=tuple(
                (_endpoint_from_json(lo), _endpoint_from_json(hi))
                for lo, hi in entry["intervals"]
            ),
            count=entry["count"],
        )
        for i, entry in enumerate(doc["leaves"])
    )

    def build(level, group, chain):
        if level == depth:
            assert len(group) == 1
            return _Node(leaf=group[0])
        by_child: dict[int, list[Leaf]] = {}
        for leaf in group:
            by_child.setdefault(leaf.path[level], []).append(leaf)
        n_children = len(by_child)
        breaks = np.array(
            [by_child[j][0].intervals[level][1] for j in range(n_children - 1)]
        )
        children = [
            build(level + 1, by_child[j], chain + (j,)) for j in range(n_children)
        ]
        return _Node(axis=axes[level], breaks=breaks, children=children)

    root = build(0, list(leaves), ())
    return PartitionTree(
        k=doc["dimension"], depth=depth, axes=axes, bounds=bounds, leaves=leaves, root=root
    )
