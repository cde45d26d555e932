r"""p-value procedures for arbitrarily dependent p-values.

The Benjamini-Yekutieli (BY) procedure runs BH at level :math:`\alpha/\ell_K`. Its
randomized version U-BY uses a single independent uniform :math:`U` to inflate the
step-up thresholds from :math:`\alpha i / (K\ell_K)` to
:math:`\alpha(\lfloor i/U \rfloor \wedge K)/(K\ell_K)`, which can only add rejections.
Both are special cases of step-up procedures reshaped by a function :math:`\beta`.
"""
import numpy as np

from rebh.discovery import ByResult, DiscoverySet
from rebh.procedures.reshaping import ReshapingFunction
from rebh.utils.helpers import (
    as_evalues, as_pvalues, check_alpha, check_uniform, check_uniform_vector, ebh_level,
    floor_ratio, harmonic, order_statistics_asc, step_up_count
)

__all__ = (
    "by",
    "u_by",
    "by_calibrate",
    "BYCalibrator",
    "reshaped_by",
    "reshaped_u_by",
    "by_uniform_ratio",
)


def _step_up(P: np.ndarray, thresholds: np.ndarray) -> ByResult:
    order, ps = order_statistics_asc(P)
    k = step_up_count(ps <= thresholds)
    threshold = float(thresholds[k - 1]) if k > 0 else 0.0
    return ByResult(discoveries=DiscoverySet.from_indices(order[:k], threshold),
                    k_star=k, threshold=threshold)


def by(pvals, alpha: float) -> ByResult:
    """The BY procedure: step-up with thresholds ``alpha * i / (K * ell_K)``.

    Parameters
    ----------
    pvals : array-like
        p-values. Values above 1 are allowed and never rejected.
    alpha : float
        Target FDR level in (0, 1].
    """
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    K = P.shape[0]
    ell = harmonic(K)
    return _step_up(P, alpha * np.arange(1, K + 1) / (K * ell))


def u_by(pvals, alpha: float, u: float) -> ByResult:
    """The randomized BY procedure.

    Computes ``k = max{i : P_(i) <= alpha * min(floor(i/u), K) / (K * ell_K)}`` and rejects
    every p-value at most ``alpha * min(floor(k/u), K) / (K * ell_K)``, which are exactly
    the `k` smallest. With ``u = 1`` this is BY, and for any `u` the discoveries contain
    those of BY.

    Parameters
    ----------
    pvals : array-like
        p-values, arbitrarily dependent.
    alpha : float
        Target FDR level in (0, 1].
    u : float
        A uniform in (0, 1] independent of the p-values.
    """
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    u = check_uniform(u)
    K = P.shape[0]
    ell = harmonic(K)
    inflated = floor_ratio(np.arange(1, K + 1), u, K)
    return _step_up(P, alpha * inflated / (K * ell))


def by_calibrate(p, alpha: float, K: int):
    """Map p-values to e-values so that e-BH on them behaves like BY.

    ``f(p) = K / (alpha * max(ceil(p * K * ell_K / alpha), 1))`` for ``p <= alpha / ell_K``
    and 0 above. The function is nonincreasing and integrates to one over [0, 1]. For every
    `p` below the cutoff, ``f(p)`` equals an e-BH rejection level exactly.

    Parameters
    ----------
    p : float or array
        Nonnegative p-values.
    alpha : float
        Level of the BY procedure being mirrored.
    K : int
        Number of hypotheses.
    """
    alpha = check_alpha(alpha)
    ell = harmonic(K)
    p_arr = np.asarray(p, dtype=np.float64)
    if np.isnan(p_arr).any() or (p_arr < 0).any():
        raise ValueError("p-values must be nonnegative and not NaN")

    bins = np.ceil(p_arr / (alpha / (K * ell))).clip(min=1, max=K)
    out = np.where(p_arr <= alpha / ell, ebh_level(K, alpha, bins), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


class BYCalibrator:
    """:func:`by_calibrate` as a callable of p-values alone, for use in p-merging."""

    def __init__(self, alpha: float, K: int):
        self.alpha = check_alpha(alpha)
        self.K = K

    def __call__(self, p):
        return by_calibrate(p, self.alpha, self.K)

    def at_zero(self) -> float:
        return float(self(0.0))

    def __repr__(self):
        return "BYCalibrator(alpha=%r, K=%d)" % (self.alpha, self.K)


def reshaped_by(pvals, alpha: float, beta: ReshapingFunction) -> ByResult:
    """Step-up with thresholds ``alpha * beta(i) / K``."""
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    K = P.shape[0]
    return _step_up(P, alpha * beta(np.arange(1, K + 1)) / K)


def reshaped_u_by(pvals, alpha: float, beta: ReshapingFunction, u: float) -> ByResult:
    """Step-up with thresholds ``alpha * beta(i / u) / K``; a superset of :func:`reshaped_by`."""
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    u = check_uniform(u)
    K = P.shape[0]
    return _step_up(P, alpha * beta.at_ratio(np.arange(1, K + 1), u) / K)


def by_uniform_ratio(evals, alpha: float, u_vec) -> ByResult:
    """BY applied to the p-values ``u_i / X_i`` obtained from e-values and independent uniforms.

    Zero e-values give infinite p-values. This is a valid but weak baseline, dominated
    in practice by e-BH itself.
    """
    X = as_evalues(evals)
    u_vec = check_uniform_vector(u_vec, X.shape[0], allow_zero=False)
    with np.errstate(divide="ignore"):
        P = u_vec / X
    return by(P, alpha)
