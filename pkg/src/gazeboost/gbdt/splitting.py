"""Gradient histograms and best-split search.

A histogram holds, per column and bin, the sums of gradients, hessians and
row counts of the rows in one node. Value bins occupy slots
``0 .. n_bins - 1`` and the missing-value bin is always the last slot of the
padded row, so all columns share one ``(n_cols, width)`` layout.

The gain of splitting a node into L and R is::

    G_L**2 / H_L + G_R**2 / H_R - G_P**2 / H_P

For each numeric threshold the rows with missing values are tried in both
children and the better side becomes the default direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import MISSING

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        return lambda f: f

# gains below this fraction of the parent score count as rounding noise
GAIN_RTOL = 1e-10


@dataclass
class Histogram:
    grad: np.ndarray  # (n_cols, width)
    hess: np.ndarray
    count: np.ndarray

    def __sub__(self, other: Histogram) -> Histogram:
        return Histogram(self.grad - other.grad, self.hess - other.hess, self.count - other.count)


class HistogramBuilder:
    """Builds node histograms from the bin codes of a training set."""

    def __init__(self, codes: np.ndarray, n_bins: np.ndarray):
        self.n_rows, self.n_cols = codes.shape
        self.n_bins = np.asarray(n_bins, dtype=np.int64)
        self.width = int(self.n_bins.max(initial=1)) + 1
        slots = np.where(codes == MISSING, self.width - 1, codes).astype(np.int64)
        self.flat = slots + np.arange(self.n_cols, dtype=np.int64) * self.width

    def build(self, rows: np.ndarray, gradients: np.ndarray, hessians: np.ndarray,
              columns: np.ndarray | None = None) -> Histogram:
        size = self.n_cols * self.width
        if columns is None:
            idx = self.flat[rows]
            k = self.n_cols
        else:
            idx = self.flat[np.ix_(rows, columns)]
            k = len(columns)
        idx = idx.ravel()
        g = np.repeat(gradients[rows], k)
        h = np.repeat(hessians[rows], k)
        shape = (self.n_cols, self.width)
        return Histogram(
            np.bincount(idx, weights=g, minlength=size).reshape(shape),
            np.bincount(idx, weights=h, minlength=size).reshape(shape),
            np.bincount(idx, minlength=size).reshape(shape),
        )


@dataclass
class SplitInfo:
    gain: float
    column: int
    threshold: int  # last bin sent left (numeric) or prefix length - 1 (categorical)
    default_left: bool
    left_bins: tuple[int, ...] | None  # categorical only
    n_left: int
    n_right: int
    grad_left: float
    hess_left: float
    grad_right: float
    hess_right: float

    @property
    def is_categorical(self) -> bool:
        return self.left_bins is not None


def _score(g, h):
    out = np.zeros(np.shape(g))
    np.divide(g * g, h, out=out, where=h > 0)
    return out


def _scan(lg, lh, ln, missing, parent, min_data_in_leaf, valid_cut=None):
    """Best cut per row of cumulative left sums ``(k, T)``.

    Missing rows (``missing`` = per-row sums, each of shape ``(k,)``) are
    tried on both sides. Returns arrays of shape ``(k,)``: gain (-inf when
    no valid cut), cut index, default_left, G_L, H_L, N_L.
    """
    G, H, N = parent
    mg, mh, mn = (np.asarray(a)[:, None] for a in missing)
    parent_score = G * G / H if H > 0 else 0.0
    options = []
    any_missing = bool((mn > 0).any())
    for miss_left in (False, True) if any_missing else (False,):
        gl = lg + mg if miss_left else lg
        hl = lh + mh if miss_left else lh
        nl = ln + mn if miss_left else ln
        gr, hr, nr = G - gl, H - hl, N - nl
        gain = _score(gl, hl) + _score(gr, hr) - parent_score
        valid = (nl >= min_data_in_leaf) & (nr >= min_data_in_leaf) & (hl > 0) & (hr > 0)
        if valid_cut is not None:
            valid &= valid_cut
        options.append((np.where(valid, gain, -np.inf), gl, hl, nl))
    right = options[0]
    left = options[1] if any_missing else right
    no_missing = mn == 0
    # without missing rows both options coincide and the default direction
    # goes to the larger child (ties to the left)
    use_left = np.where(no_missing, right[3] >= N - right[3], left[0] >= right[0])
    take_left = use_left & ~no_missing
    gain = np.where(take_left, left[0], right[0])
    rows = np.arange(gain.shape[0])
    t = np.argmax(gain, axis=1)
    pick = take_left[rows, t]
    return (
        gain[rows, t],
        t,
        use_left[rows, t],
        np.where(pick, left[1][rows, t], right[1][rows, t]),
        np.where(pick, left[2][rows, t], right[2][rows, t]),
        np.where(pick, left[3][rows, t], right[3][rows, t]),
    )


@njit(cache=True)
def _numeric_best_jit(grad, hess, count, cols, n_bins, G, H, N, min_data_in_leaf):
    k = cols.shape[0]
    width = grad.shape[1]
    out_gain = np.full(k, -np.inf)
    out_t = np.zeros(k, dtype=np.int64)
    out_dl = np.zeros(k, dtype=np.bool_)
    out_gl = np.zeros(k)
    out_hl = np.zeros(k)
    out_nl = np.zeros(k, dtype=np.int64)
    parent_score = G * G / H if H > 0 else 0.0
    for a in range(k):
        c = cols[a]
        mg = grad[c, width - 1]
        mh = hess[c, width - 1]
        mn = count[c, width - 1]
        lg = 0.0
        lh = 0.0
        ln = 0
        for t in range(n_bins[c]):
            lg += grad[c, t]
            lh += hess[c, t]
            ln += count[c, t]
            gain_r = -np.inf
            if ln >= min_data_in_leaf and N - ln >= min_data_in_leaf and lh > 0 and H - lh > 0:
                gain_r = lg * lg / lh + (G - lg) * (G - lg) / (H - lh) - parent_score
            if mn == 0:
                gain = gain_r
                dl = ln >= N - ln
                take_left = False
            else:
                gain_l = -np.inf
                nl = ln + mn
                hl = lh + mh
                if nl >= min_data_in_leaf and N - nl >= min_data_in_leaf and hl > 0 and H - hl > 0:
                    gl = lg + mg
                    gain_l = gl * gl / hl + (G - gl) * (G - gl) / (H - hl) - parent_score
                dl = gain_l >= gain_r
                take_left = dl
                gain = gain_l if dl else gain_r
            if gain > out_gain[a]:
                out_gain[a] = gain
                out_t[a] = t
                out_dl[a] = dl
                if take_left:
                    out_gl[a] = lg + mg
                    out_hl[a] = lh + mh
                    out_nl[a] = ln + mn
                else:
                    out_gl[a] = lg
                    out_hl[a] = lh
                    out_nl[a] = ln
    return out_gain, out_t, out_dl, out_gl, out_hl, out_nl


def _numeric_best_numpy(hist: Histogram, cols: np.ndarray, n_bins: np.ndarray, parent, min_data_in_leaf):
    width = hist.grad.shape[1]
    lg = np.cumsum(hist.grad[cols, : width - 1], axis=1)
    lh = np.cumsum(hist.hess[cols, : width - 1], axis=1)
    ln = np.cumsum(hist.count[cols, : width - 1], axis=1)
    valid_cut = np.arange(width - 1)[None, :] < n_bins[cols][:, None]
    missing = (hist.grad[cols, -1], hist.hess[cols, -1], hist.count[cols, -1])
    return _scan(lg, lh, ln, missing, parent, min_data_in_leaf, valid_cut)


def _numeric_best(hist: Histogram, cols: np.ndarray, n_bins: np.ndarray, parent, min_data_in_leaf):
    if not HAVE_NUMBA:
        return _numeric_best_numpy(hist, cols, n_bins, parent, min_data_in_leaf)
    G, H, N = parent
    return _numeric_best_jit(
        hist.grad, hist.hess, hist.count, cols.astype(np.int64), n_bins.astype(np.int64),
        float(G), float(H), int(N), int(min_data_in_leaf),
    )


@njit(cache=True)
def _prefix_scan_jit(sg, sh, sn, mg, mh, mn, G, H, N, min_data_in_leaf):
    """Best cut of one bin sequence; same rules as :func:`_scan`."""
    parent_score = G * G / H if H > 0 else 0.0
    best = -np.inf
    best_t = 0
    best_dl = False
    best_gl = 0.0
    best_hl = 0.0
    best_nl = 0
    lg = 0.0
    lh = 0.0
    ln = 0
    for t in range(sg.shape[0]):
        lg += sg[t]
        lh += sh[t]
        ln += sn[t]
        gain_r = -np.inf
        if ln >= min_data_in_leaf and N - ln >= min_data_in_leaf and lh > 0 and H - lh > 0:
            gain_r = lg * lg / lh + (G - lg) * (G - lg) / (H - lh) - parent_score
        take_left = False
        if mn == 0:
            gain = gain_r
            dl = ln >= N - ln
        else:
            gain_l = -np.inf
            nl = ln + mn
            hl = lh + mh
            if nl >= min_data_in_leaf and N - nl >= min_data_in_leaf and hl > 0 and H - hl > 0:
                gl = lg + mg
                gain_l = gl * gl / hl + (G - gl) * (G - gl) / (H - hl) - parent_score
            dl = gain_l >= gain_r
            take_left = dl
            gain = gain_l if dl else gain_r
        if gain > best:
            best = gain
            best_t = t
            best_dl = dl
            best_gl = lg + mg if take_left else lg
            best_hl = lh + mh if take_left else lh
            best_nl = ln + mn if take_left else ln
    return best, best_t, best_dl, best_gl, best_hl, best_nl


@njit(cache=True)
def _categorical_best_jit(grad, hess, count, cols, n_bins, G, H, N, min_data_in_leaf):
    k = cols.shape[0]
    width = grad.shape[1]
    out_gain = np.full(k, -np.inf)
    out_t = np.zeros(k, dtype=np.int64)
    out_dl = np.zeros(k, dtype=np.bool_)
    out_gl = np.zeros(k)
    out_hl = np.zeros(k)
    out_nl = np.zeros(k, dtype=np.int64)
    orders = np.full((k, width), -1, dtype=np.int64)
    for a in range(k):
        c = cols[a]
        nb = n_bins[c]
        m = 0
        for b in range(nb):
            if count[c, b] > 0:
                m += 1
        if m == 0:
            continue
        present = np.empty(m, dtype=np.int64)
        ratio = np.empty(m)
        j = 0
        for b in range(nb):
            if count[c, b] > 0:
                present[j] = b
                ratio[j] = grad[c, b] / hess[c, b] if hess[c, b] > 0 else 0.0
                j += 1
        order = present[np.argsort(ratio, kind="mergesort")]
        orders[a, :m] = order
        gain, t, dl, gl, hl, nl = _prefix_scan_jit(
            grad[c, order], hess[c, order], count[c, order],
            grad[c, width - 1], hess[c, width - 1], count[c, width - 1],
            G, H, N, min_data_in_leaf,
        )
        out_gain[a] = gain
        out_t[a] = t
        out_dl[a] = dl
        out_gl[a] = gl
        out_hl[a] = hl
        out_nl[a] = nl
    return out_gain, out_t, out_dl, out_gl, out_hl, out_nl, orders


def _categorical_best_numpy(hist: Histogram, cols: np.ndarray, n_bins: np.ndarray, parent, min_data_in_leaf):
    k = len(cols)
    width = hist.grad.shape[1]
    out = [np.full(k, -np.inf), np.zeros(k, dtype=np.int64), np.zeros(k, dtype=bool),
           np.zeros(k), np.zeros(k), np.zeros(k, dtype=np.int64)]
    orders = np.full((k, width), -1, dtype=np.int64)
    for a, col in enumerate(cols):
        vg = hist.grad[col, : n_bins[col]]
        vh = hist.hess[col, : n_bins[col]]
        vn = hist.count[col, : n_bins[col]]
        present = np.flatnonzero(vn > 0)
        if present.size == 0:
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(vh[present] > 0, vg[present] / vh[present], 0.0)
        order = present[np.argsort(ratio, kind="stable")]
        orders[a, : order.size] = order
        found = _scan(
            np.cumsum(vg[order])[None, :],
            np.cumsum(vh[order])[None, :],
            np.cumsum(vn[order])[None, :],
            ([hist.grad[col, -1]], [hist.hess[col, -1]], [hist.count[col, -1]]),
            parent,
            min_data_in_leaf,
        )
        for arr, v in zip(out, found):
            arr[a] = v[0]
    return (*out, orders)


def _categorical_best(hist: Histogram, cols: np.ndarray, n_bins: np.ndarray, parent, min_data_in_leaf):
    """Best prefix split per categorical column.

    Categories present in the node are ordered by G/H (ties by bin index)
    and every prefix is a candidate left set; the full prefix stays a
    candidate so "all categories vs missing" is scanned too. Returns the
    ``_scan`` arrays plus each column's category order (padded with -1).
    """
    if not HAVE_NUMBA:
        return _categorical_best_numpy(hist, cols, n_bins, parent, min_data_in_leaf)
    G, H, N = parent
    return _categorical_best_jit(
        hist.grad, hist.hess, hist.count, cols.astype(np.int64), n_bins.astype(np.int64),
        float(G), float(H), int(N), int(min_data_in_leaf),
    )


def find_best_split(
    hist: Histogram,
    n_bins: np.ndarray,
    is_categorical: np.ndarray,
    parent: tuple[float, float, int],
    min_data_in_leaf: int,
    columns: np.ndarray | None = None,
) -> SplitInfo | None:
    """Best positive-gain split of a node, or None.

    Parameters
    ----------
    hist : Histogram
        Histogram of the node's rows.
    n_bins, is_categorical : ndarray
        Per-column bin counts and kinds.
    parent : (G, H, N)
        Gradient sum, hessian sum and row count of the node.
    min_data_in_leaf : int
        Both children must hold at least this many rows.
    columns : ndarray, optional
        Columns allowed for this tree; all when None.

    Ties are broken by lowest column index, then lowest threshold.
    """
    G, H, N = parent
    if N < 2 * min_data_in_leaf:
        return None
    n_bins = np.asarray(n_bins)
    is_categorical = np.asarray(is_categorical, dtype=bool)
    cols = np.arange(len(n_bins)) if columns is None else np.sort(np.asarray(columns))
    min_gain = max(GAIN_RTOL * (G * G / H if H > 0 else 0.0), 0.0)

    candidates = {}
    num_cols = cols[~is_categorical[cols]]
    if num_cols.size:
        gain, t, dl, gl, hl, nl = _numeric_best(hist, num_cols, n_bins, parent, min_data_in_leaf)
        for k, col in enumerate(num_cols):
            if gain[k] > min_gain:
                candidates[int(col)] = (
                    float(gain[k]), int(t[k]), bool(dl[k]), float(gl[k]), float(hl[k]), int(nl[k]), None
                )
    cat_cols = cols[is_categorical[cols]]
    if cat_cols.size:
        gain, t, dl, gl, hl, nl, orders = _categorical_best(hist, cat_cols, n_bins, parent, min_data_in_leaf)
        for k, col in enumerate(cat_cols):
            if gain[k] > min_gain:
                # the category order stands in for left_bins until a winner is known
                candidates[int(col)] = (
                    float(gain[k]), int(t[k]), bool(dl[k]), float(gl[k]), float(hl[k]), int(nl[k]), orders[k]
                )

    best = None
    for col in sorted(candidates):
        if best is None or candidates[col][0] > candidates[best][0]:
            best = col
    if best is None:
        return None
    gain, t, default_left, gl, hl, nl, left_bins = candidates[best]
    if left_bins is not None:
        left_bins = tuple(sorted(int(b) for b in left_bins[: t + 1]))
    return SplitInfo(
        gain=gain,
        column=best,
        threshold=t,
        default_left=default_left,
        left_bins=left_bins,
        n_left=nl,
        n_right=int(N - nl),
        grad_left=gl,
        hess_left=hl,
        grad_right=G - gl,
        hess_right=H - hl,
    )
