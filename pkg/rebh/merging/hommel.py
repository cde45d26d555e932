import numpy as np

from rebh.discovery import MergedP
from rebh.utils.helpers import as_pvalues, check_uniform, floor_ratio, harmonic

__all__ = ("hommel_p", "u_hommel_p")


def hommel_p(pvals) -> MergedP:
    """Hommel's merged p-value ``min_i P_(i) * K * ell_K / i``, valid under any dependence."""
    P = as_pvalues(pvals)
    K = P.shape[0]
    ps = np.sort(P)
    value = np.min(ps * K * harmonic(K) / np.arange(1, K + 1))
    return MergedP(float(value))


def u_hommel_p(pvals, u: float) -> MergedP:
    """Randomized Hommel p-value ``min_i P_(i) * K * ell_K / min(floor(i/u), K)``.

    Never larger than :func:`hommel_p`. It is at most `alpha` exactly when
    :func:`rebh.procedures.u_by` with the same `u` makes a discovery.
    """
    P = as_pvalues(pvals)
    u = check_uniform(u)
    K = P.shape[0]
    ps = np.sort(P)
    value = np.min(ps * K * harmonic(K) / floor_ratio(np.arange(1, K + 1), u, K))
    return MergedP(float(value), randomized=True, u_used=u)
