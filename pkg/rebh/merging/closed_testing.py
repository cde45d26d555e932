r"""Closed testing with Hommel-type local tests.

Closed testing rejects hypothesis `i` iff every intersection hypothesis
:math:`H_I, I \ni i` is rejected by its local level-:math:`\alpha` test, and controls the
FWER at :math:`\alpha`. With the (randomized) Hommel test as local test, the
:math:`2^K - 1` local tests collapse to a single size :math:`h`: the largest `i` for which
some intersection of size `i` is not rejected. :func:`closed_testing_bruteforce`
enumerates all intersections and serves as the reference for the shortcuts.
"""
from typing import Callable, Optional, Sequence

import numpy as np

from rebh.discovery import DiscoverySet
from rebh.merging.hommel import hommel_p, u_hommel_p
from rebh.options import ClosedTestingOptions
from rebh.utils.helpers import as_pvalues, check_alpha, check_uniform, floor_ratio, harmonic
from rebh.utils.threading import run_chunked

__all__ = (
    "closed_hommel",
    "closed_u_hommel",
    "closed_testing_bruteforce",
    "hommel_local_test",
    "u_hommel_local_test",
)

LocalTest = Callable[[np.ndarray], bool]


def _largest_unrejected_size(ps: np.ndarray, alpha: float, u: float) -> Optional[int]:
    """Largest `i` with ``P_(K-i+j) > alpha * min(floor(j/u), i) / (i * ell_i)`` for all `j <= i`."""
    K = ps.shape[0]
    for i in range(K, 0, -1):
        j = np.arange(1, i + 1)
        thresholds = alpha * floor_ratio(j, u, i) / (i * harmonic(i))
        if np.all(ps[K - i:] > thresholds):
            return i
    return None


def _closed_shortcut(pvals, alpha: float, u: float) -> DiscoverySet:
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    K = P.shape[0]
    h = _largest_unrejected_size(np.sort(P), alpha, u)
    if h is None:
        # every intersection test rejects
        return DiscoverySet.from_indices(range(K), None)
    threshold = alpha * floor_ratio(1, u, h) / (h * harmonic(h))
    return DiscoverySet.from_mask(P <= threshold, threshold)


def closed_hommel(pvals, alpha: float) -> DiscoverySet:
    """Closed testing with Hommel local tests.

    With ``h = max{i : P_(K-i+j) > alpha * j / (i * ell_i) for all j = 1..i}``, rejects
    every hypothesis with ``P_i <= alpha / (h * ell_h)``. When no `i` qualifies, every
    hypothesis is rejected.
    """
    return _closed_shortcut(pvals, alpha, 1.0)


def closed_u_hommel(pvals, alpha: float, u: float) -> DiscoverySet:
    """Closed testing with randomized Hommel local tests sharing one uniform `u`.

    As :func:`closed_hommel`, with the thresholds ``alpha * j / (i * ell_i)`` raised to
    ``alpha * min(floor(j/u), i) / (i * ell_i)`` and the final cutoff to
    ``alpha * min(floor(1/u), h) / (h * ell_h)``. Rejects a superset of
    :func:`closed_hommel`.
    """
    return _closed_shortcut(pvals, alpha, check_uniform(u))


def hommel_local_test(pvals, alpha: float) -> LocalTest:
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    return lambda subset: hommel_p(P[subset]).value <= alpha


def u_hommel_local_test(pvals, alpha: float, u: float) -> LocalTest:
    P = as_pvalues(pvals)
    alpha = check_alpha(alpha)
    u = check_uniform(u)
    return lambda subset: u_hommel_p(P[subset], u).value <= alpha


def closed_testing_bruteforce(pvals, alpha: float, local_test: LocalTest,
                              opt: Optional[ClosedTestingOptions] = None,
                              num_workers: Optional[int] = 1) -> DiscoverySet:
    """Closed testing by enumeration of all non-empty intersections.

    Parameters
    ----------
    pvals : array-like
        p-values; only their number is used here, the local test holds the data.
    alpha : float
        Level, only validated: the local test is expected to be an `alpha`-level test.
    local_test : callable
        Maps an array of hypothesis indices to True if the intersection is rejected.
    opt : ClosedTestingOptions
        `max_bruteforce_size` bounds the number of hypotheses.
    num_workers : int or None
        Threads used to enumerate intersections. ``None`` uses all physical cores.

    Returns
    -------
    DiscoverySet
        Hypotheses whose every containing intersection is rejected.
    """
    if opt is None:
        opt = ClosedTestingOptions()
    P = as_pvalues(pvals)
    check_alpha(alpha)
    K = P.shape[0]
    if K > opt.max_bruteforce_size:
        raise ValueError("Refusing to enumerate 2^%d intersections (max_bruteforce_size=%d)" %
                         (K, opt.max_bruteforce_size))

    bits = 1 << np.arange(K)
    n_masks = (1 << K) - 1
    n_chunks = min(n_masks, 64)
    bounds = [1 + n_masks * c // n_chunks for c in range(n_chunks + 1)]

    def survive_chunks(chunk_ids: Sequence[int]):
        out = []
        for c in chunk_ids:
            survivors = np.zeros(K, dtype=bool)
            for m in range(bounds[c], bounds[c + 1]):
                members = (m & bits) != 0
                if not local_test(np.flatnonzero(members)):
                    survivors |= members
            out.append(survivors)
        return out

    survivors = np.zeros(K, dtype=bool)
    for chunk in run_chunked(survive_chunks, n_chunks, num_workers):
        survivors |= chunk
    return DiscoverySet.from_mask(~survivors)
