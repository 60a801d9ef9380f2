"""Regression trees grown leaf-wise on binned data."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .binning import MISSING, BinnedDataset
from .config import TrainConfig
from .splitting import Histogram, HistogramBuilder, SplitInfo, find_best_split


@dataclass
class Tree:
    """Binary tree over bin codes.

    Node arrays are indexed by node id; node 0 is the root. For leaves
    ``left == right == -1``. Numeric nodes send codes ``<= threshold`` left;
    categorical nodes send the bins listed in ``left_bins[node]`` left.
    Missing codes follow ``default_left``.
    """

    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    column: list[int] = field(default_factory=list)
    threshold: list[int] = field(default_factory=list)
    threshold_value: list[float] = field(default_factory=list)
    left_bins: list[tuple[int, ...] | None] = field(default_factory=list)
    default_left: list[bool] = field(default_factory=list)
    value: list[float] = field(default_factory=list)
    gain: list[float] = field(default_factory=list)
    count: list[int] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)

    def _add_node(self, value: float, count: int, depth: int) -> int:
        self.left.append(-1)
        self.right.append(-1)
        self.column.append(-1)
        self.threshold.append(-1)
        self.threshold_value.append(float("nan"))
        self.left_bins.append(None)
        self.default_left.append(True)
        self.value.append(value)
        self.gain.append(0.0)
        self.count.append(count)
        self.depth.append(depth)
        return len(self.left) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.left)

    @property
    def is_leaf(self) -> np.ndarray:
        return np.asarray(self.left) < 0

    @property
    def n_leaves(self) -> int:
        return int(self.is_leaf.sum())

    @property
    def max_depth(self) -> int:
        return max(self.depth) if self.depth else 0

    def leaves(self) -> list[int]:
        return [i for i in range(self.n_nodes) if self.left[i] < 0]

    def go_left(self, node: int, codes: np.ndarray) -> np.ndarray:
        """Routing decision of ``node`` for a vector of bin codes."""
        missing = codes == MISSING
        if self.left_bins[node] is not None:
            goes = np.isin(codes, self.left_bins[node])
        else:
            goes = codes <= self.threshold[node]
        return np.where(missing, self.default_left[node], goes)

    def apply(self, codes: np.ndarray) -> np.ndarray:
        """Leaf id reached by each row of a ``(n_rows, n_cols)`` code matrix."""
        out = np.zeros(codes.shape[0], dtype=np.int64)
        stack = [(0, np.arange(codes.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if self.left[node] < 0:
                out[rows] = node
                continue
            goes = self.go_left(node, codes[rows, self.column[node]])
            stack.append((self.right[node], rows[~goes]))
            stack.append((self.left[node], rows[goes]))
        return out

    def predict_codes(self, codes: np.ndarray) -> np.ndarray:
        return np.asarray(self.value)[self.apply(codes)]

    def scale(self, factor: float) -> None:
        self.value = [v * factor for v in self.value]

    def to_dict(self) -> dict:
        return {
            "left": self.left,
            "right": self.right,
            "column": self.column,
            "threshold": self.threshold,
            "threshold_value": [None if v != v else v for v in self.threshold_value],
            "left_bins": [None if b is None else list(b) for b in self.left_bins],
            "default_left": self.default_left,
            "value": self.value,
            "gain": self.gain,
            "count": self.count,
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Tree:
        return cls(
            left=[int(v) for v in data["left"]],
            right=[int(v) for v in data["right"]],
            column=[int(v) for v in data["column"]],
            threshold=[int(v) for v in data["threshold"]],
            threshold_value=[float("nan") if v is None else float(v) for v in data["threshold_value"]],
            left_bins=[None if b is None else tuple(int(x) for x in b) for b in data["left_bins"]],
            default_left=[bool(v) for v in data["default_left"]],
            value=[float(v) for v in data["value"]],
            gain=[float(v) for v in data["gain"]],
            count=[int(v) for v in data["count"]],
            depth=[int(v) for v in data["depth"]],
        )


def _leaf_value(g: float, h: float) -> float:
    return -g / h if h > 0 else 0.0


@dataclass
class _Pending:
    node: int
    rows: np.ndarray
    hist: Histogram
    sums: tuple[float, float, int]
    split: SplitInfo | None = None


def grow_tree(
    binned: BinnedDataset,
    gradients: np.ndarray,
    hessians: np.ndarray,
    config: TrainConfig,
    rows: np.ndarray | None = None,
    columns: np.ndarray | None = None,
    builder: HistogramBuilder | None = None,
) -> tuple[Tree, dict[int, np.ndarray]]:
    """Grow one tree best-first.

    The leaf with the largest split gain is expanded until ``num_leaves``
    leaves exist, the depth limit blocks every candidate, or no leaf has a
    valid positive-gain split. Raw leaf values are ``-G/H``.

    Returns the tree and, per leaf id, the training rows it holds.
    """
    if builder is None:
        builder = HistogramBuilder(binned.codes, binned.n_bins)
    n_bins = binned.n_bins
    is_cat = binned.is_categorical
    if rows is None:
        rows = np.arange(binned.n_rows)
    if columns is not None:
        columns = np.sort(np.asarray(columns, dtype=np.int64))
    max_depth = config.max_depth

    def make(node, node_rows, hist):
        g = float(gradients[node_rows].sum())
        h = float(hessians[node_rows].sum())
        pending = _Pending(node, node_rows, hist, (g, h, len(node_rows)))
        if max_depth is None or tree.depth[node] < max_depth:
            pending.split = find_best_split(
                hist, n_bins, is_cat, pending.sums, config.min_data_in_leaf, columns
            )
        return pending

    tree = Tree()
    root = tree._add_node(0.0, len(rows), 0)
    first = make(root, rows, builder.build(rows, gradients, hessians, columns))
    tree.value[root] = _leaf_value(first.sums[0], first.sums[1])
    leaf_rows = {root: rows}

    heap: list = []
    if first.split is not None:
        heapq.heappush(heap, (-first.split.gain, root, first))
    n_leaves = 1
    while heap and n_leaves < config.num_leaves:
        _, node, pending = heapq.heappop(heap)
        split = pending.split
        col = split.column
        tree.column[node] = col
        tree.threshold[node] = split.threshold
        tree.left_bins[node] = split.left_bins
        tree.default_left[node] = split.default_left
        tree.gain[node] = split.gain
        if split.left_bins is None:
            tree.threshold_value[node] = binned.mappers[col].threshold_value(split.threshold)
        goes = tree.go_left(node, binned.codes[pending.rows, col])
        rows_l, rows_r = pending.rows[goes], pending.rows[~goes]
        depth = tree.depth[node] + 1
        node_l = tree._add_node(_leaf_value(split.grad_left, split.hess_left), len(rows_l), depth)
        node_r = tree._add_node(_leaf_value(split.grad_right, split.hess_right), len(rows_r), depth)
        tree.left[node], tree.right[node] = node_l, node_r
        del leaf_rows[node]
        leaf_rows[node_l], leaf_rows[node_r] = rows_l, rows_r
        n_leaves += 1

        # build the smaller child's histogram, derive the larger one
        if len(rows_l) <= len(rows_r):
            hist_l = builder.build(rows_l, gradients, hessians, columns)
            hist_r = pending.hist - hist_l
        else:
            hist_r = builder.build(rows_r, gradients, hessians, columns)
            hist_l = pending.hist - hist_r
        if n_leaves >= config.num_leaves:
            break
        for child, child_rows, hist in ((node_l, rows_l, hist_l), (node_r, rows_r, hist_r)):
            p = make(child, child_rows, hist)
            if p.split is not None:
                heapq.heappush(heap, (-p.split.gain, child, p))
    return tree, leaf_rows


def refine_leaves_mae(tree: Tree, leaf_rows: dict[int, np.ndarray], residuals: np.ndarray) -> Tree:
    """Set each leaf to the median residual (target minus current prediction)
    of its rows; an even count takes the mean of the two central values."""
    for leaf, rows in leaf_rows.items():
        if len(rows):
            tree.value[leaf] = float(np.median(residuals[rows]))
    return tree
