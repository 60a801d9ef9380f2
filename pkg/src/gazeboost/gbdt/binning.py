"""Discretization of feature columns into histogram bins.

Numeric columns are cut at quantiles of their non-missing training values.
A bin is described by the largest training value it holds, and a value
``x`` falls in the first bin whose bound is ``>= x``. Bin membership
therefore depends only on the rank of ``x`` among the training values,
which makes the learner invariant to strictly increasing transforms of a
column.

Missing values get code ``MISSING`` (-1). Categorical columns give every
frequent category its own bin; rare, unknown and unseen categories are
coded as missing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, ContractError
from ..features import CATEGORICAL, NUMERIC, UNKNOWN_ID, FeatureMatrix

MISSING = -1


def _merge_small(sizes: list[int], bounds: list[float], min_size: int):
    """Merge bins holding fewer than ``min_size`` rows into their right neighbour."""
    i = 0
    while i < len(sizes) - 1:
        if sizes[i] < min_size:
            small = sizes.pop(i)
            sizes[i] += small
            bounds.pop(i)
        else:
            i += 1
    if len(sizes) > 1 and sizes[-1] < min_size:
        small = sizes.pop()
        sizes[-1] += small
        bounds.pop(-2)
    return sizes, bounds


def numeric_bin_bounds(values: np.ndarray, max_bin: int, min_data_in_bin: int) -> np.ndarray:
    """Inclusive upper bounds of quantile bins over non-missing ``values``."""
    values = values[~np.isnan(values)]
    if values.size == 0:
        return np.array([], dtype=float)
    distinct, counts = np.unique(values, return_counts=True)
    if distinct.size <= max_bin:
        sizes = counts.tolist()
        bounds = distinct.tolist()
    else:
        n = int(counts.sum())
        sizes, bounds = [], []
        k, acc = 1, 0
        cum = np.cumsum(counts)
        for j in range(distinct.size):
            acc += int(counts[j])
            # close the bin once the k-th quantile (k * n / max_bin) is reached
            if int(cum[j]) * max_bin >= k * n or j == distinct.size - 1:
                sizes.append(acc)
                bounds.append(float(distinct[j]))
                acc = 0
                while k * n <= int(cum[j]) * max_bin:
                    k += 1
    sizes, bounds = _merge_small(sizes, bounds, min_data_in_bin)
    return np.asarray(bounds, dtype=float)


@dataclass
class BinMapper:
    kind: str
    upper_bounds: np.ndarray | None = None
    categories: np.ndarray | None = None  # category id of each bin

    @property
    def n_bins(self) -> int:
        if self.kind == NUMERIC:
            return max(len(self.upper_bounds), 1)
        return max(len(self.categories), 1)

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        codes = np.full(x.shape, MISSING, dtype=np.int32)
        present = ~np.isnan(x)
        if self.kind == NUMERIC:
            codes[present] = np.searchsorted(self.upper_bounds[:-1], x[present], side="left")
        elif len(self.categories):
            pos = np.searchsorted(self.categories, x[present])
            pos = np.minimum(pos, len(self.categories) - 1)
            known = self.categories[pos] == x[present]
            out = np.full(pos.shape, MISSING, dtype=np.int32)
            out[known] = pos[known]
            codes[present] = out
        return codes

    def threshold_value(self, bin_index: int) -> float:
        if self.kind != NUMERIC or not len(self.upper_bounds):
            return float("nan")
        return float(self.upper_bounds[bin_index])

    def to_dict(self) -> dict:
        if self.kind == NUMERIC:
            return {"kind": self.kind, "upper_bounds": [float(v) for v in self.upper_bounds]}
        return {"kind": self.kind, "categories": [int(v) for v in self.categories]}

    @classmethod
    def from_dict(cls, data: dict) -> BinMapper:
        if data["kind"] == NUMERIC:
            return cls(NUMERIC, upper_bounds=np.asarray(data["upper_bounds"], dtype=float))
        return cls(CATEGORICAL, categories=np.asarray(data["categories"], dtype=float))


def categorical_bins(values: np.ndarray, max_bin: int, min_data_in_bin: int) -> np.ndarray:
    """Category ids that receive their own bin, in ascending id order."""
    values = values[~np.isnan(values)]
    values = values[values != UNKNOWN_ID]
    if values.size == 0:
        return np.array([], dtype=float)
    ids, counts = np.unique(values, return_counts=True)
    keep = counts >= min_data_in_bin
    ids, counts = ids[keep], counts[keep]
    if ids.size > max_bin:
        # most frequent first, ties by id
        order = np.lexsort((ids, -counts))[:max_bin]
        ids = np.sort(ids[order])
    return ids.astype(float)


@dataclass
class BinnedDataset:
    """Bin codes of a training matrix plus the mappers that produced them."""

    codes: np.ndarray  # (n_rows, n_cols) int32, MISSING for missing
    mappers: list[BinMapper]
    column_names: list[str]
    column_kinds: list[str]

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_cols(self) -> int:
        return self.codes.shape[1]

    @property
    def n_bins(self) -> np.ndarray:
        return np.array([m.n_bins for m in self.mappers], dtype=np.int64)

    @property
    def is_categorical(self) -> np.ndarray:
        return np.array([m.kind == CATEGORICAL for m in self.mappers], dtype=bool)

    def transform(self, m: FeatureMatrix) -> np.ndarray:
        return transform_matrix(self.mappers, self.column_names, self.column_kinds, m)


def transform_matrix(mappers, column_names, column_kinds, m: FeatureMatrix) -> np.ndarray:
    if list(m.column_names) != list(column_names) or list(m.column_kinds) != list(column_kinds):
        raise ContractError("feature columns do not match the binning manifest")
    codes = np.empty(m.values.shape, dtype=np.int32)
    for j, mapper in enumerate(mappers):
        codes[:, j] = mapper.transform(m.values[:, j])
    return codes


def bin_features(m: FeatureMatrix, max_bin: int, min_data_in_bin: int = 1) -> BinnedDataset:
    """Fit bin mappers on ``m`` and encode it.

    Parameters
    ----------
    m : FeatureMatrix
        Training matrix; must have at least one row.
    max_bin : int
        Maximum number of value bins per column (missing values are kept
        apart and do not count).
    min_data_in_bin : int
        Minimum number of training rows per bin; smaller bins are merged
        into their right neighbour (the last one into its left neighbour).
    """
    if max_bin < 2:
        raise ConfigurationError("max_bin must be >= 2")
    if min_data_in_bin < 1:
        raise ConfigurationError("min_data_in_bin must be >= 1")
    if m.n_rows == 0:
        raise ContractError("cannot bin an empty matrix")
    mappers = []
    for j, kind in enumerate(m.column_kinds):
        col = m.values[:, j]
        if kind == CATEGORICAL:
            mappers.append(BinMapper(kind, categories=categorical_bins(col, max_bin, min_data_in_bin)))
        else:
            mappers.append(BinMapper(kind, upper_bounds=numeric_bin_bounds(col, max_bin, min_data_in_bin)))
    names, kinds = list(m.column_names), list(m.column_kinds)
    codes = transform_matrix(mappers, names, kinds, m)
    return BinnedDataset(codes=codes, mappers=mappers, column_names=names, column_kinds=kinds)
