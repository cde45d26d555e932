r"""A dependent p-value distribution on which the BY procedure is sharp.

The first :math:`K_0` hypotheses are null. A count :math:`N \in \{1, \dots, K+1\}` is
drawn with

.. math::

    P(N = n) = \begin{cases}
        \alpha K_0 / (n K \ell_K) & n \le K_0 \\
        \alpha / (K \ell_K) & K_0 < n \le K \\
        1 - \alpha(K + K_0(\ell_{K_0} - 1)) / (K \ell_K) & n = K + 1
    \end{cases}

For :math:`N \le K`, a uniformly random set of :math:`N \wedge K_0` nulls, plus
:math:`N - K_0` non-nulls when :math:`N > K_0`, get p-values
:math:`\alpha(N - 1 + U_0)/(K\ell_K)`; all others share
:math:`\alpha/\ell_K + (1 - \alpha/\ell_K) U_1`. For :math:`N = K + 1` the nulls share
:math:`\alpha/\ell_K + (1 - \alpha/\ell_K) U_0` and the non-nulls are 1.

BY then rejects exactly the `N` selected hypotheses when :math:`N \le K` and nothing
otherwise. Its FDR is :math:`\alpha K_0 / K`, and it rejects something with probability
:math:`\alpha(K + K_0(\ell_{K_0} - 1))/(K\ell_K)`; both equal :math:`\alpha` when
:math:`K_0 = K`. Randomized BY never rejects a p-value above :math:`\alpha/\ell_K`, so it
makes exactly the same rejections.
"""
from dataclasses import dataclass
from typing import FrozenSet, Optional

import numpy as np
import pandas as pd

from rebh.options import BaseOptions
from rebh.procedures import bh, by, u_by
from rebh.sim.config import standard_error
from rebh.utils import TicToc, UniformSource
from rebh.utils.helpers import check_alpha, harmonic
from rebh.utils.threading import run_chunked

__all__ = (
    "GuoRaoInstance",
    "guo_rao_masses",
    "guo_rao_sample",
    "guo_rao_exact_fdr",
    "guo_rao_rejection_probability",
    "GuoRaoReport",
    "guo_rao_experiment",
)


@dataclass(frozen=True)
class GuoRaoInstance:
    pvals: np.ndarray
    null_set: FrozenSet[int]
    n: int


def _check_sizes(K: int, K0: int) -> None:
    if int(K) != K or int(K0) != K0 or not (1 <= K0 <= K):
        raise ValueError("Need integers 1 <= K0 <= K, got K=%r, K0=%r" % (K, K0))


def guo_rao_masses(K: int, K0: int, alpha: float) -> np.ndarray:
    """``P(N = n)`` for ``n = 1, ..., K + 1``."""
    _check_sizes(K, K0)
    alpha = check_alpha(alpha)
    ell = harmonic(K)
    n = np.arange(1, K + 2, dtype=np.float64)
    masses = np.where(n <= K0, alpha * K0 / (n * K * ell), alpha / (K * ell))
    masses[K] = 1 - guo_rao_rejection_probability(K, K0, alpha)
    if masses[K] < 0:
        raise ValueError("alpha=%r is too large for K=%d, K0=%d: P(N = K + 1) = %g < 0" %
                         (alpha, K, K0, masses[K]))
    return masses


def guo_rao_exact_fdr(K: int, K0: int, alpha: float) -> float:
    """FDR of BY on the construction, ``alpha * K0 / K``."""
    _check_sizes(K, K0)
    return check_alpha(alpha) * K0 / K


def guo_rao_rejection_probability(K: int, K0: int, alpha: float) -> float:
    """Probability that BY rejects anything, ``alpha * (K + K0 * (ell_K0 - 1)) / (K * ell_K)``."""
    _check_sizes(K, K0)
    alpha = check_alpha(alpha)
    return alpha * (K + K0 * (harmonic(K0) - 1)) / (K * harmonic(K))


def guo_rao_sample(K: int, K0: int, alpha: float, source: UniformSource) -> GuoRaoInstance:
    """Draw one instance of the construction from `source`."""
    masses = guo_rao_masses(K, K0, alpha)
    ell = harmonic(K)
    n_draw, u0, u1 = source.substream(0).uniforms(3)
    # smallest n with n_draw <= P(N <= n)
    n = min(int(np.searchsorted(np.cumsum(masses), n_draw, side="left")) + 1, K + 1)

    pvals = np.empty(K)
    if n <= K:
        chosen = source.substream(1).generator().choice(K0, size=min(n, K0), replace=False)
        if n > K0:
            extra = K0 + source.substream(2).generator().choice(K - K0, size=n - K0, replace=False)
            chosen = np.concatenate((chosen, extra))
        pvals[:] = alpha / ell + (1 - alpha / ell) * u1
        pvals[chosen] = alpha * (n - 1 + u0) / (K * ell)
    else:
        pvals[:K0] = alpha / ell + (1 - alpha / ell) * u0
        pvals[K0:] = 1.0
    pvals.setflags(write=False)
    return GuoRaoInstance(pvals=pvals, null_set=frozenset(range(K0)), n=n)


@dataclass(frozen=True)
class GuoRaoReport:
    """Monte Carlo behaviour of BY, U-BY and BH on the construction.

    `table` has the columns ``procedure, fdr, fdr_se, any_rejection, any_rejection_se``.
    """
    table: pd.DataFrame
    exact_fdr: float
    rejection_probability: float
    identical_fraction: float
    trials: int


def _guo_rao_trial(K, K0, alpha, source):
    inst = guo_rao_sample(K, K0, alpha, source)
    u = source.substream(3).uniform()
    results = (by(inst.pvals, alpha).discoveries, u_by(inst.pvals, alpha, u).discoveries,
               bh(inst.pvals, alpha))
    fdp = [len(d.rejected & inst.null_set) / max(len(d), 1) for d in results]
    any_rej = [float(len(d) > 0) for d in results]
    return fdp, any_rej, results[0].rejected == results[1].rejected


def guo_rao_experiment(K: int, K0: int, alpha: float, trials: int, seed: int,
                       opt: Optional[BaseOptions] = None) -> GuoRaoReport:
    if opt is None:
        opt = BaseOptions()
    guo_rao_masses(K, K0, alpha)
    if trials < 1:
        raise ValueError("trials must be positive, got %d" % (trials))
    root = UniformSource(seed)

    def run(ts):
        return [_guo_rao_trial(K, K0, alpha, root.substream(t)) for t in ts]

    with TicToc("Sharp BY construction (K=%d, K0=%d, %d trials)" % (K, K0, trials), debug=opt.debug):
        out = run_chunked(run, trials, opt.num_workers)
    fdp = np.array([o[0] for o in out])
    any_rej = np.array([o[1] for o in out])
    identical = np.array([o[2] for o in out])
    table = pd.DataFrame({
        "procedure": ["by", "u-by", "bh"],
        "fdr": fdp.mean(axis=0),
        "fdr_se": [standard_error(fdp[:, j]) for j in range(3)],
        "any_rejection": any_rej.mean(axis=0),
        "any_rejection_se": [standard_error(any_rej[:, j]) for j in range(3)],
    })
    return GuoRaoReport(table=table, exact_fdr=guo_rao_exact_fdr(K, K0, alpha),
                        rejection_probability=guo_rao_rejection_probability(K, K0, alpha),
                        identical_fraction=float(identical.mean()), trials=trials)
