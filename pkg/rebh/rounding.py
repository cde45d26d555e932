r"""Stochastic rounding of e-values.

Rounding an e-value onto a grid of levels, with a probability of moving up chosen so that
the conditional expectation is unchanged, yields another e-value. When the grid is the
set of levels at which e-BH can reject, rounding up can only help and rounding down can
never hurt, which is the basis of the randomized procedures in :mod:`rebh.procedures`.

All functions take their randomness as explicit draws :math:`u \in [0, 1]`; every rule
rounds up when ``u <= p``.
"""
import functools
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from rebh.utils.helpers import as_evalues, check_alpha, check_uniform, ebh_level, harmonic

__all__ = (
    "Grid",
    "GridRangeError",
    "RoundingOutcome",
    "level_grid",
    "neighbors",
    "stochastic_round",
    "round_to_grid",
    "adaptive_round",
    "joint_round",
    "generalized_masses",
    "generalized_round_uniform",
    "generalized_round_equal",
)


class GridRangeError(ValueError):
    """Raised by :func:`neighbors` for a value outside the span of the grid."""


@dataclass(frozen=True, eq=False)
class Grid:
    """A finite, strictly increasing set of rounding levels in :math:`[0, \\infty]`.

    Parameters
    ----------
    levels : array
        Strictly increasing levels. May start at 0 and may end at ``inf``.
    """
    levels: np.ndarray

    def __post_init__(self):
        levels = np.array(self.levels, dtype=np.float64, copy=True).reshape(-1)
        if levels.shape[0] == 0:
            raise ValueError("A grid needs at least one level")
        if np.isnan(levels).any() or (levels < 0).any():
            raise ValueError("Grid levels must be nonnegative and not NaN")
        if (np.diff(levels) <= 0).any():
            raise ValueError("Grid levels must be strictly increasing")
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_levels(cls, levels: Iterable[float]) -> "Grid":
        """Build a grid from levels in any order; duplicates are dropped."""
        return cls(np.unique(np.asarray(list(levels), dtype=np.float64)))

    @property
    def g_star(self) -> float:
        return float(self.levels[0])

    @property
    def g_sup(self) -> float:
        return float(self.levels[-1])

    def __contains__(self, x) -> bool:
        idx = np.searchsorted(self.levels, x)
        return bool(idx < self.levels.shape[0] and self.levels[idx] == x)

    def __len__(self):
        return self.levels.shape[0]

    def __repr__(self):
        return "Grid(%s)" % (np.array2string(self.levels, precision=6, threshold=12))


@dataclass(frozen=True)
class RoundingOutcome:
    value: float
    moved_up: bool


@functools.lru_cache(maxsize=64)
def level_grid(K: int, alpha: float) -> Grid:
    """The levels at which e-BH may reject, ``{K / (alpha * i) : i = 1..K}``, plus 0 and inf."""
    alpha = check_alpha(alpha)
    positive = ebh_level(K, alpha, np.arange(1, K + 1))
    return Grid.from_levels(np.concatenate(([0.0], positive, [np.inf])))


def neighbors(grid: Grid, x: float) -> Tuple[float, float]:
    """Closest grid levels below and above `x`, ``(x_minus, x_plus)``.

    Both equal `x` when `x` is a grid level. Raises :class:`GridRangeError` when `x`
    lies outside ``[grid.g_star, grid.g_sup]``.
    """
    if not (grid.g_star <= x <= grid.g_sup):
        raise GridRangeError("%r is outside the grid range [%r, %r]" % (x, grid.g_star, grid.g_sup))
    levels = grid.levels
    idx = int(np.searchsorted(levels, x, side="left"))
    x_plus = float(levels[idx])
    if x_plus == x:
        return x_plus, x_plus
    return float(levels[idx - 1]), x_plus


def _round_up_probability(x, x_minus, x_plus):
    return (x - x_minus) / (x_plus - x_minus)


def stochastic_round(grid: Grid, x: float, u: float) -> RoundingOutcome:
    """Round `x` to a neighbouring grid level, up with probability proportional to distance.

    `x` is returned unchanged when it lies below the smallest level, above the largest
    level, on a level, or when the next level up is infinite. Otherwise the result is
    ``x_plus`` if ``u <= (x - x_minus) / (x_plus - x_minus)`` and ``x_minus`` else.
    """
    u = check_uniform(u, allow_zero=True)
    x = float(x)
    if np.isnan(x):
        raise ValueError("Cannot round NaN")
    if x < grid.g_star or x > grid.g_sup:
        return RoundingOutcome(x, False)
    x_minus, x_plus = neighbors(grid, x)
    if x_minus == x_plus or np.isinf(x_plus):
        return RoundingOutcome(x, False)
    if u <= _round_up_probability(x, x_minus, x_plus):
        return RoundingOutcome(x_plus, True)
    return RoundingOutcome(x_minus, False)


def round_to_grid(grid: Grid, xs: np.ndarray, us: np.ndarray) -> np.ndarray:
    """Vectorized :func:`stochastic_round`, one draw per value."""
    xs = np.asarray(xs, dtype=np.float64)
    us = np.asarray(us, dtype=np.float64)
    levels = grid.levels
    out = xs.copy()

    in_range = (xs >= levels[0]) & (xs <= levels[-1])
    idx = np.searchsorted(levels, xs, side="left").clip(max=levels.shape[0] - 1)
    x_plus = levels[idx]
    movable = in_range & (x_plus != xs) & np.isfinite(x_plus) & (idx > 0)
    if not movable.any():
        return out

    x_minus = levels[(idx - 1).clip(min=0)]
    xm, xp, xv = x_minus[movable], x_plus[movable], xs[movable]
    up = us[movable] <= _round_up_probability(xv, xm, xp)
    out[movable] = np.where(up, xp, xm)
    return out


def adaptive_round(x: float, alpha_hat: float, u: float) -> float:
    """Round `x` onto ``{0, 1/alpha_hat}`` unless it already clears ``1/alpha_hat``.

    Returns `x` if ``x >= 1/alpha_hat``, ``1/alpha_hat`` if ``u <= alpha_hat * x``, and
    0 otherwise. A zero e-value always maps to 0, whatever the draw.
    """
    if not (0 < alpha_hat <= 1):
        raise ValueError("alpha_hat must be in (0, 1], got %r" % (alpha_hat))
    u = check_uniform(u, allow_zero=True)
    x = float(x)
    if np.isnan(x) or x < 0:
        raise ValueError("Cannot round the e-value %r" % (x))
    threshold = 1.0 / alpha_hat
    if x >= threshold:
        return x
    if x > 0 and u <= alpha_hat * x:
        return threshold
    return 0.0


def joint_round(xs: Sequence[float], grids: Sequence[Grid], u: float) -> np.ndarray:
    """Round every coordinate of `xs` onto its own grid, using the same draw `u` for all.

    The rounded values are jointly dependent but each one is marginally an e-value.
    """
    xs = as_evalues(xs)
    if len(grids) != xs.shape[0]:
        raise ValueError("Got %d grids for %d values" % (len(grids), xs.shape[0]))
    return np.array([stochastic_round(g, x, u).value for g, x in zip(grids, xs)])


def generalized_masses(x: float, alpha: float, K: int, scheme: str) -> Tuple[np.ndarray, np.ndarray]:
    """Up-levels and their probabilities for rounding `x` to several e-BH levels at once.

    `x` must lie between 0 and the smallest positive e-BH level ``1/alpha``, so that the
    only level below it is 0. Rounding then spreads the probability of moving up over all
    levels ``K / (alpha * j)``, ``j = 1..K``, and puts the rest on 0.

    Parameters
    ----------
    x : float
        Value to round, in ``[0, K / (alpha * K)]``.
    alpha : float
        Target level of e-BH.
    K : int
        Number of hypotheses.
    scheme : str
        ``"uniform"`` gives every level the same probability
        ``alpha * x / (K * ell_K)``. ``"equal"`` gives level `j` probability
        ``alpha * j * x / K**2`` so that every level contributes the same expectation.

    Returns
    -------
    levels : array
        The levels ``K / (alpha * j)`` in order of increasing `j`.
    probs : array
        Probability of rounding to each level.
    """
    alpha = check_alpha(alpha)
    x = float(x)
    smallest = ebh_level(K, alpha, K)
    if not (0 <= x <= smallest):
        raise ValueError("Generalized rounding needs 0 <= x <= %r (no positive level below x), got %r" %
                         (float(smallest), x))
    j = np.arange(1, K + 1, dtype=np.float64)
    levels = ebh_level(K, alpha, j)
    if scheme == "uniform":
        probs = np.full(K, alpha * x / (K * harmonic(K)))
    elif scheme == "equal":
        probs = alpha * j * x / (K * K)
    else:
        raise ValueError("Unknown generalized rounding scheme %r; expected 'uniform' or 'equal'" % (scheme, ))
    total = probs.sum()
    if total > 1:
        raise ValueError("Total probability of rounding up is %r > 1" % (total))
    return levels, probs


def _generalized_round(x, alpha, K, u, scheme) -> float:
    u = check_uniform(u, allow_zero=True)
    levels, probs = generalized_masses(x, alpha, K, scheme)
    if x == 0:
        return 0.0
    cum = np.cumsum(probs)
    j = int(np.searchsorted(cum, u, side="left"))
    if j < K:
        return float(levels[j])
    return 0.0


def generalized_round_uniform(x: float, alpha: float, K: int, u: float) -> float:
    """Round `x` to one of all e-BH levels, each with the same probability, or to 0."""
    return _generalized_round(x, alpha, K, u, "uniform")


def generalized_round_equal(x: float, alpha: float, K: int, u: float) -> float:
    """Round `x` to one of all e-BH levels, level ``K/(alpha*j)`` with probability proportional to `j`, or to 0."""
    return _generalized_round(x, alpha, K, u, "equal")
