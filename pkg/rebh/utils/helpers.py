import threading
from typing import Tuple, Union

import numpy as np

__all__ = (
    "HarmonicTable",
    "harmonic",
    "harmonic_numbers",
    "as_evalues",
    "as_pvalues",
    "check_alpha",
    "check_uniform",
    "check_uniform_vector",
    "check_same_length",
    "order_statistics_desc",
    "order_statistics_asc",
    "floor_ratio",
    "ebh_level",
    "step_up_count",
)

ArrayLike = Union[np.ndarray, list, tuple]


class HarmonicTable:
    """Cache of harmonic numbers :math:`\\ell_k = \\sum_{i=1}^k 1/i`.

    Values are accumulated left to right in ascending `i`, and the table is only ever
    extended from its last entry, so :math:`\\ell_k` is bit-identical no matter in which
    order sizes were requested.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._table = np.array([1.0])

    def __len__(self):
        return self._table.shape[0]

    def _ensure(self, k: int) -> np.ndarray:
        table = self._table
        if k <= table.shape[0]:
            return table
        with self._lock:
            table = self._table
            n = table.shape[0]
            if k > n:
                new_size = max(k, 2 * n)
                terms = np.concatenate(([table[-1]], 1.0 / np.arange(n + 1, new_size + 1)))
                table = np.concatenate((table, np.cumsum(terms)[1:]))
                table.setflags(write=False)
                self._table = table
        return table

    def __call__(self, k: int) -> float:
        k = _check_size(k)
        return float(self._ensure(k)[k - 1])

    def prefix(self, k: int) -> np.ndarray:
        """Read-only array ``(ell_1, ..., ell_k)``."""
        k = _check_size(k)
        return self._ensure(k)[:k]


def _check_size(k) -> int:
    if isinstance(k, (bool, np.bool_)) or int(k) != k:
        raise TypeError("Expected an integer number of hypotheses, got %r" % (k, ))
    k = int(k)
    if k < 1:
        raise ValueError("The number of hypotheses must be at least 1, got %d" % (k))
    return k


_HARMONIC = HarmonicTable()


def harmonic(K: int) -> float:
    """The `K`-th harmonic number, ``1 + 1/2 + ... + 1/K``."""
    return _HARMONIC(K)


def harmonic_numbers(K: int) -> np.ndarray:
    return _HARMONIC.prefix(K)


def _as_vector(values: ArrayLike, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError("%s must be one-dimensional, got shape %s" % (name, arr.shape))
    if arr.shape[0] == 0:
        raise ValueError("%s must contain at least one value" % (name))
    if np.isnan(arr).any():
        raise ValueError("%s contains NaN at position %d" % (name, np.flatnonzero(np.isnan(arr))[0]))
    neg = arr < 0
    if neg.any():
        first = np.flatnonzero(neg)[0]
        raise ValueError("%s must be nonnegative, found %g at position %d" % (name, arr[first], first))
    arr.setflags(write=False)
    return arr


def as_evalues(values: ArrayLike) -> np.ndarray:
    """Validate a vector of e-values: nonnegative, possibly infinite, never NaN."""
    return _as_vector(values, "e-values")


def as_pvalues(values: ArrayLike) -> np.ndarray:
    """Validate a vector of p-values.

    The domain is :math:`[0, \\infty]`: merging and ratio constructions produce values
    above 1, which procedures simply never reject.
    """
    return _as_vector(values, "p-values")


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0 < alpha <= 1):
        raise ValueError("alpha must be in (0, 1], got %r" % (alpha))
    return alpha


def check_uniform(u: float, allow_zero: bool = False, name: str = "u") -> float:
    u = float(u)
    lower_ok = u >= 0 if allow_zero else u > 0
    if not (lower_ok and u <= 1):
        raise ValueError("%s must be in %s, got %r" % (name, "[0, 1]" if allow_zero else "(0, 1]", u))
    return u


def check_uniform_vector(u_vec: ArrayLike, K: int, allow_zero: bool = True,
                         name: str = "u_vec") -> np.ndarray:
    arr = np.asarray(u_vec, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != K:
        raise ValueError("%s must hold one uniform per hypothesis (%d), got shape %s" %
                         (name, K, arr.shape))
    lower_ok = arr >= 0 if allow_zero else arr > 0
    bad = ~(lower_ok & (arr <= 1))
    if bad.any():
        first = np.flatnonzero(bad)[0]
        raise ValueError("%s[%d] = %r is not a valid uniform draw" % (name, first, arr[first]))
    return arr


def check_same_length(*arrays: np.ndarray) -> int:
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) != 1:
        raise ValueError("Length mismatch between inputs: %s" % (sorted(lengths)))
    return lengths.pop()


def order_statistics_desc(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Indices sorting `values` from largest to smallest, and the sorted values.

    Equal values keep their original relative order.
    """
    values = np.asarray(values)
    order = np.argsort(-values, kind="stable")
    return order, values[order]


def order_statistics_asc(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Indices sorting `values` from smallest to largest, and the sorted values.

    Equal values keep their original relative order.
    """
    values = np.asarray(values)
    order = np.argsort(values, kind="stable")
    return order, values[order]


def floor_ratio(i, u: float, cap: int):
    """``min(floor(i / u), cap)``, where quotients within one ulp below an integer round up to it.

    Works elementwise on arrays of `i`. Guards against ``3 / (0.1 * 3)`` evaluating to
    ``9.999999999999998``.
    """
    q = np.asarray(i, dtype=np.float64) / u
    nearest = np.rint(q)
    out = np.where((nearest > q) & (nearest - q <= np.spacing(nearest)), nearest, np.floor(q))
    out = np.minimum(out, cap)
    if out.ndim == 0:
        return int(out)
    return out.astype(np.int64)


def ebh_level(K: int, alpha: float, i):
    """Rejection level ``K / (alpha * i)`` of e-BH at rank `i`.

    Every comparison against an e-BH level goes through this expression, so that values
    built from a level (grid points, calibrated e-values) compare exactly equal to it.
    """
    return K / (alpha * np.asarray(i, dtype=np.float64))


def step_up_count(passes: np.ndarray) -> int:
    """Largest rank ``i`` (1-based) such that ``passes[i - 1]`` is true, or 0."""
    hits = np.flatnonzero(passes)
    if hits.shape[0] == 0:
        return 0
    return int(hits[-1]) + 1
