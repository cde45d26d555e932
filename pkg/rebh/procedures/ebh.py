r"""The e-BH procedure and its randomized improvements.

All procedures take e-values :math:`X_1, \dots, X_K` and a level :math:`\alpha`, and
control the FDR at :math:`\alpha` under arbitrary dependence. The randomized variants
take their uniforms explicitly so that several procedures can be run on the same draws,
and every one of them rejects a superset of what e-BH rejects for those draws.
"""
import dataclasses

import numpy as np

from rebh.discovery import DiscoverySet, EbhResult
from rebh.rounding import level_grid, round_to_grid
from rebh.utils import UniformSource
from rebh.utils.helpers import (
    as_evalues, as_pvalues, check_alpha, check_same_length, check_uniform, check_uniform_vector,
    ebh_level, order_statistics_asc, order_statistics_desc, step_up_count
)

__all__ = (
    "ebh",
    "r1_ebh",
    "r2_ebh",
    "rboth_ebh",
    "ell_index",
    "u_ebh",
    "u_ebh_rounding_view",
    "j_ebh",
    "pe_ebh",
    "combine_e_and_p",
    "bh",
    "derandomized_ebh",
)


def ebh(evals, alpha: float) -> EbhResult:
    r"""The e-BH procedure.

    Rejects the :math:`k^*` largest e-values, where

    .. math::

        k^* = \max\{i : X_{[i]} \geq K / (i\alpha)\}

    and :math:`X_{[i]}` is the `i`-th largest e-value (:math:`k^* = 0` if no `i`
    qualifies). Equivalently, hypothesis `i` is rejected iff
    :math:`X_i \geq 1/\hat\alpha^*` with :math:`\hat\alpha^* = \alpha(k^*+1)/K`, and this
    threshold is reported as the realized threshold.

    Parameters
    ----------
    evals : array-like
        Nonnegative e-values, possibly infinite.
    alpha : float
        Target FDR level in (0, 1].

    Returns
    -------
    EbhResult
    """
    X = as_evalues(evals)
    alpha = check_alpha(alpha)
    K = X.shape[0]

    order, xs = order_statistics_desc(X)
    k = step_up_count(xs >= ebh_level(K, alpha, np.arange(1, K + 1)))
    threshold = float(ebh_level(K, alpha, k + 1))
    rejected = order[:k]
    assert np.array_equal(np.sort(rejected), np.flatnonzero(X >= threshold)), \
        "e-BH rejections disagree with the threshold view"

    return EbhResult(discoveries=DiscoverySet.from_indices(rejected, threshold),
                     k_star=k, alpha_hat_star=alpha * (k + 1) / K)


def r1_ebh(evals, alpha: float, u_vec) -> EbhResult:
    """e-BH applied after stochastically rounding every e-value onto the e-BH levels.

    Each e-value lying strictly between two finite levels ``K / (alpha * i)`` (or between
    0 and the smallest level) moves to the upper one when its uniform is at most the
    relative distance from the lower one, and to the lower one otherwise.

    Parameters
    ----------
    evals : array-like
        Nonnegative e-values.
    alpha : float
        Target FDR level in (0, 1].
    u_vec : array-like
        One independent uniform per hypothesis.
    """
    X = as_evalues(evals)
    alpha = check_alpha(alpha)
    u_vec = check_uniform_vector(u_vec, X.shape[0])

    rounded = round_to_grid(level_grid(X.shape[0], alpha), X, u_vec)
    rounded.setflags(write=False)
    return dataclasses.replace(ebh(rounded, alpha), rounded_values=rounded)


def r2_ebh(evals, alpha: float, u_vec) -> EbhResult:
    """e-BH with every e-value adaptively rounded to the data-dependent threshold.

    With ``alpha_hat = alpha * (k + 1) / K`` computed from plain e-BH, hypothesis `i` is
    rejected iff ``X_i >= 1 / alpha_hat`` or ``u_i <= alpha_hat * X_i``. Zero e-values
    are never rejected.
    """
    X = as_evalues(evals)
    alpha = check_alpha(alpha)
    K = X.shape[0]
    u_vec = check_uniform_vector(u_vec, K)

    base = ebh(X, alpha)
    alpha_hat = base.alpha_hat_star
    threshold = base.discoveries.threshold
    clears = X >= threshold
    lifted = ~clears & (X > 0) & (u_vec <= alpha_hat * X)
    rounded = np.where(clears, X, np.where(lifted, threshold, 0.0))
    rounded.setflags(write=False)

    return EbhResult(discoveries=DiscoverySet.from_mask(clears | lifted, threshold),
                     k_star=base.k_star, alpha_hat_star=alpha_hat, rounded_values=rounded)


def rboth_ebh(evals, alpha: float, u_grid, u_adapt) -> EbhResult:
    """Stochastic rounding onto the e-BH levels followed by adaptive rounding.

    First run :func:`r1_ebh` with `u_grid`, giving the count ``k1`` and the rounded
    e-values ``S``. Then reject `i` iff ``S_i >= u_adapt_i * K / (alpha * (k1 + 1))``,
    zero rounded values excepted. `u_grid` and `u_adapt` must be independent draws.

    The result is never smaller than the discovery set of :func:`r1_ebh` on the same
    `u_grid`, which in turn contains that of :func:`ebh`.
    """
    X = as_evalues(evals)
    alpha = check_alpha(alpha)
    K = X.shape[0]
    u_adapt = check_uniform_vector(u_adapt, K, name="u_adapt")

    first = r1_ebh(X, alpha, check_uniform_vector(u_grid, K, name="u_grid"))
    S = first.rounded_values
    threshold = float(ebh_level(K, alpha, first.k_star + 1))
    mask = (S >= threshold) | ((S > 0) & (S >= u_adapt * threshold))

    return EbhResult(discoveries=DiscoverySet.from_mask(mask, threshold),
                     k_star=first.k_star, alpha_hat_star=first.alpha_hat_star, rounded_values=S)


def ell_index(evals) -> np.ndarray:
    r"""For every hypothesis, the rank :math:`\ell(i) = \arg\max_{j \geq r_i} j X_{[j]}`.

    Here :math:`r_i = |\{j : X_j \geq X_i\}|` and ties in the argmax go to the largest
    `j`. Ranks are 1-based. Returned in the original order of `evals`.
    """
    X = as_evalues(evals)
    K = X.shape[0]
    _, xs = order_statistics_desc(X)
    rank = np.searchsorted(-xs, -X, side="right")

    with np.errstate(invalid="ignore"):
        scores = np.arange(1, K + 1) * xs
    best = np.empty(K, dtype=np.int64)
    cur = K - 1
    for j in range(K - 1, -1, -1):
        if scores[j] > scores[cur]:
            cur = j
        best[j] = cur
    return best[rank - 1] + 1


def u_ebh(evals, alpha: float, u: float) -> EbhResult:
    """e-BH applied to the e-values divided by a single uniform.

    Equivalently, BH applied to the p-values ``u / X_i``. Since ``X_i / u >= X_i``, the
    discoveries always contain those of e-BH, and a hypothesis is rejected only if every
    hypothesis with a larger e-value is too. The reported threshold is on the scale of
    the original e-values.

    Parameters
    ----------
    evals : array-like
        Nonnegative e-values.
    alpha : float
        Target FDR level in (0, 1].
    u : float
        A single uniform in (0, 1], independent of the e-values.
    """
    X = as_evalues(evals)
    u = check_uniform(u)
    res = ebh(X / u, alpha)
    discoveries = dataclasses.replace(res.discoveries, threshold=u * res.discoveries.threshold)
    return dataclasses.replace(res, discoveries=discoveries)


def u_ebh_rounding_view(evals, alpha: float, u: float) -> DiscoverySet:
    """The discoveries of :func:`u_ebh`, computed as e-BH on e-values rounded with a shared uniform.

    Every ``X_i`` below its level ``K / (alpha * ell(i))`` is rounded up to that level when
    ``u <= alpha * ell(i) * X_i / K`` and to 0 otherwise; e-values already at or above their
    level are kept. e-BH is then run on the rounded values. This is kept as an independent
    implementation to check :func:`u_ebh` against.
    """
    X = as_evalues(evals)
    alpha = check_alpha(alpha)
    u = check_uniform(u)
    K = X.shape[0]
    ell = ell_index(X)
    level = ebh_level(K, alpha, ell)
    with np.errstate(invalid="ignore"):
        rounded = np.where(X >= level, X, np.where(u <= alpha * ell * X / K, level, 0.0))
    return ebh(rounded, alpha).discoveries


def j_ebh(evals, alpha: float, u_vec) -> EbhResult:
    """BH applied to the p-values ``u_i / X_i``, with one independent uniform per hypothesis.

    Computed as e-BH on ``X_i / u_i``. Rejects a superset of e-BH, but unlike
    :func:`u_ebh` may reject a hypothesis while keeping one with a larger e-value.
    """
    X = as_evalues(evals)
    u_vec = check_uniform_vector(u_vec, X.shape[0], allow_zero=False)
    res = ebh(X / u_vec, alpha)
    return dataclasses.replace(res, discoveries=dataclasses.replace(res.discoveries, threshold=None))


def combine_e_and_p(x: float, p: float, alpha_hat: float) -> float:
    """Merge an e-value with an independent p-value for rejection at ``1 / alpha_hat``.

    Returns ``max(x * [x >= 1/alpha_hat], [x > 0, alpha_hat * x >= p] / alpha_hat)``. The p-value
    plays the role of the uniform of adaptive rounding.
    """
    if not (0 < alpha_hat):
        raise ValueError("alpha_hat must be positive, got %r" % (alpha_hat))
    threshold = 1.0 / alpha_hat
    first = x if x >= threshold else 0.0
    second = threshold if x > 0 and alpha_hat * x >= p else 0.0
    return max(first, second)


def pe_ebh(evals, pvals, alpha: float) -> EbhResult:
    """e-BH boosted by independent p-values.

    With ``alpha_hat`` from plain e-BH on `evals`, hypothesis `i` is rejected iff
    ``X_i >= 1 / alpha_hat`` or ``0 < X_i`` and ``P_i <= alpha_hat * X_i``.

    The p-values must be independent of the e-values. This cannot be checked here and
    is the caller's responsibility.
    """
    X = as_evalues(evals)
    P = as_pvalues(pvals)
    check_same_length(X, P)
    base = ebh(X, alpha)
    alpha_hat = base.alpha_hat_star
    threshold = base.discoveries.threshold

    clears = X >= threshold
    boosted = (X > 0) & (alpha_hat * X >= P)
    merged = np.where(clears, X, np.where(boosted, threshold, 0.0))
    merged.setflags(write=False)
    return EbhResult(discoveries=DiscoverySet.from_mask(clears | boosted, threshold),
                     k_star=base.k_star, alpha_hat_star=alpha_hat, rounded_values=merged)


def bh(pvals, alpha: float) -> DiscoverySet:
    """The Benjamini-Hochberg procedure: reject the ``k`` smallest p-values, ``k = max{i : P_(i) <= alpha i / K}``."""
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    K = P.shape[0]
    order, ps = order_statistics_asc(P)
    k = step_up_count(ps <= alpha * np.arange(1, K + 1) / K)
    return DiscoverySet.from_indices(order[:k], alpha * k / K)


def derandomized_ebh(evals, alpha: float, source: UniformSource, n_runs: int) -> EbhResult:
    """e-BH on the average of `n_runs` independent stochastic roundings onto the e-BH levels.

    As `n_runs` grows the average converges to the e-values themselves, so the result
    converges to plain e-BH.
    """
    X = as_evalues(evals)
    alpha = check_alpha(alpha)
    K = X.shape[0]
    if n_runs < 1:
        raise ValueError("n_runs must be positive, got %d" % (n_runs))
    u_draws = source.uniforms(n_runs * K).reshape(n_runs, K)
    grid = level_grid(K, alpha)
    total = np.zeros(K)
    for run in range(n_runs):
        total += round_to_grid(grid, X, u_draws[run])
    return ebh(total / n_runs, alpha)
