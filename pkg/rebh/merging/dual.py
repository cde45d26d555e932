r"""p-merging functions in dual form.

A weighted average of calibrators :math:`X(p) = \sum_i \lambda_i f_i(p_i)` turns p-values
into a single e-value. The merged p-value is the smallest level :math:`\alpha` at which
that e-value, computed from :math:`p/\alpha`, reaches 1. Replacing 1 by an independent
uniform :math:`U` gives a randomized merged p-value which is never larger.
"""
from typing import Callable, Optional, Sequence

import numpy as np

from rebh.discovery import MergedP
from rebh.options import MergeOptions
from rebh.utils.helpers import as_pvalues, check_uniform, harmonic

__all__ = ("grid_harmonic_calibrator", "GridHarmonicCalibrator", "PMergingDual", "merge_p",
           "merge_p_randomized")

Calibrator = Callable[[float], float]

_CHECK_POINTS = np.concatenate((np.linspace(0.0, 1.0, 1001), [1.0 + 1e-9, 1.5, 2.0, 10.0]))


def grid_harmonic_calibrator(x, K: int):
    """``K / ceil(K * ell_K * x)`` for ``x <= 1 / ell_K`` and 0 above; infinite at 0."""
    ell = harmonic(K)
    x_arr = np.asarray(x, dtype=np.float64)
    if np.isnan(x_arr).any() or (x_arr < 0).any():
        raise ValueError("Calibrator arguments must be nonnegative and not NaN")
    with np.errstate(divide="ignore"):
        out = np.where(ell * x_arr <= 1, K / np.ceil(K * ell * x_arr), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


class GridHarmonicCalibrator:
    def __init__(self, K: int):
        self.K = K

    def __call__(self, x):
        return grid_harmonic_calibrator(x, self.K)

    def __repr__(self):
        return "GridHarmonicCalibrator(K=%d)" % (self.K)


class PMergingDual:
    """Weights on the simplex and one calibrator per p-value.

    Calibrators must be nonincreasing on :math:`[0, \\infty)` and vanish above 1. Both
    properties are checked on a fixed set of points at construction.

    Parameters
    ----------
    weights : sequence of float
        Nonnegative weights summing to one.
    calibrators : sequence of callables
        ``calibrators[i](p)`` is the e-value obtained from the `i`-th p-value.
    """

    def __init__(self, weights: Sequence[float], calibrators: Sequence[Calibrator]):
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.shape[0] != len(calibrators) or weights.shape[0] == 0:
            raise ValueError("Got %d weights for %d calibrators" % (weights.shape[0], len(calibrators)))
        if (weights < 0).any() or abs(weights.sum() - 1) > 1e-12:
            raise ValueError("Weights must be nonnegative and sum to 1, got sum %r" % (weights.sum()))
        for i, f in enumerate(calibrators):
            values = np.array([f(x) for x in _CHECK_POINTS], dtype=np.float64)
            if (np.diff(values) > 0).any():
                raise ValueError("Calibrator %d (%r) is not nonincreasing" % (i, f))
            if (values[_CHECK_POINTS > 1] != 0).any():
                raise ValueError("Calibrator %d (%r) does not vanish above 1" % (i, f))
        self.weights = weights
        self.calibrators = list(calibrators)

    @classmethod
    def equal_weights(cls, calibrators: Sequence[Calibrator]) -> "PMergingDual":
        return cls(np.full(len(calibrators), 1.0 / len(calibrators)), calibrators)

    @classmethod
    def grid_harmonic(cls, K: int) -> "PMergingDual":
        """Equal weights on the grid-harmonic calibrator for `K` p-values."""
        f = GridHarmonicCalibrator(K)
        return cls.equal_weights([f] * K)

    def __len__(self):
        return self.weights.shape[0]

    def evaluate(self, pvals) -> float:
        """The merged e-value ``sum_i weights[i] * calibrators[i](pvals[i])``."""
        values = np.array([f(p) for f, p in zip(self.calibrators, pvals)], dtype=np.float64)
        active = self.weights > 0
        return float(np.sum(self.weights[active] * values[active]))

    def limit_at_zero(self, pvals) -> float:
        """Limit of ``evaluate(pvals / a)`` as `a` goes to 0: only zero p-values contribute."""
        zero = (np.asarray(pvals) == 0) & (self.weights > 0)
        if not zero.any():
            return 0.0
        return float(sum(self.weights[i] * self.calibrators[i](0.0) for i in np.flatnonzero(zero)))


def _merge(dual: PMergingDual, P: np.ndarray, target: float, opt: MergeOptions) -> float:
    if P.shape[0] != len(dual):
        raise ValueError("Got %d p-values for a merging function of %d" % (P.shape[0], len(dual)))
    if dual.limit_at_zero(P) >= target:
        return 0.0
    if dual.evaluate(P) < target:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(opt.merge_max_iter):
        if hi - lo <= opt.merge_tolerance:
            break
        mid = 0.5 * (lo + hi)
        if dual.evaluate(P / mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def merge_p(dual: PMergingDual, pvals, opt: Optional[MergeOptions] = None) -> MergedP:
    """The merged p-value ``inf{a in (0, 1] : dual.evaluate(pvals / a) >= 1}``, or 1 if no `a` qualifies.

    Found by bisection to within ``opt.merge_tolerance``; the returned value is the upper
    end of the final bracket, so the merged e-value at that level is at least 1.
    """
    if opt is None:
        opt = MergeOptions()
    P = as_pvalues(pvals)
    return MergedP(_merge(dual, P, 1.0, opt))


def merge_p_randomized(dual: PMergingDual, pvals, u: float,
                       opt: Optional[MergeOptions] = None) -> MergedP:
    """As :func:`merge_p` with the target 1 replaced by an independent uniform `u`.

    The bisection visits the same midpoints as :func:`merge_p` until the two disagree,
    so the result is never larger than the deterministic merged p-value.
    """
    if opt is None:
        opt = MergeOptions()
    P = as_pvalues(pvals)
    u = check_uniform(u)
    return MergedP(_merge(dual, P, u, opt), randomized=True, u_used=u)
