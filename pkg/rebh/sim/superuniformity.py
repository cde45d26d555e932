r"""Monte Carlo check of the randomized superuniformity bound.

For a superuniform `P`, a positive integer `R` with any dependence on `P`, an
independent uniform `U` and a reshaping function :math:`\beta`,

.. math::

    E\left[\frac{1\{P \le c\beta(R/U)\}}{R}\right] \le c.

The couplings below pair `P` and `R` adversarially.
"""
from typing import Optional, Tuple

import numpy as np

from rebh.procedures.reshaping import ReshapingFunction
from rebh.sim.config import standard_error
from rebh.utils import UniformSource
from rebh.utils.helpers import check_uniform

__all__ = ("COUPLINGS", "sample_coupling", "superuniformity_stress")

COUPLINGS = ("independent", "comonotone", "tight")


def _check_coupling(coupling: str) -> str:
    if not isinstance(coupling, str):
        raise TypeError("coupling must be a string, got %r" % (coupling, ))
    if coupling not in COUPLINGS:
        raise ValueError("Unknown coupling %r; valid couplings are %s" % (coupling, ", ".join(COUPLINGS)))
    return coupling


def sample_coupling(coupling: str, beta: ReshapingFunction, c: float, K: int,
                    n: int, source: UniformSource) -> Tuple[np.ndarray, np.ndarray]:
    """`n` draws of ``(P, R)`` with `P` uniform and `R` in ``{1, ..., K}``.

    * ``"independent"``: `R` uniform on ``{1, ..., K}``, independent of `P`;
    * ``"comonotone"``: ``R = ceil(K * P)``;
    * ``"tight"``: `R` is the smallest `r` with ``P <= c * beta(r)``, or `K` if none.
      With ``U = 1`` this attains the deterministic bound.
    """
    _check_coupling(coupling)
    P = source.substream(0).uniforms(n)
    if coupling == "independent":
        R = np.ceil(K * source.substream(1).uniforms(n))
    elif coupling == "comonotone":
        R = np.ceil(K * P)
    else:
        thresholds = c * beta(np.arange(1, K + 1))
        R = np.searchsorted(thresholds, P, side="left") + 1.0
    return P, np.clip(R, 1, K)


def superuniformity_stress(beta: ReshapingFunction, c: float, coupling: str, n_trials: int,
                           K: int, source: UniformSource,
                           fixed_u: Optional[float] = None) -> Tuple[float, float]:
    """Estimate ``E[1{P <= c * beta(R / U)} / R]`` and its standard error.

    Parameters
    ----------
    beta : ReshapingFunction
        Evaluated at ``R / U`` through :meth:`ReshapingFunction.at_ratio`.
    c : float
        Nonnegative scale; the expectation is at most `c`.
    coupling : str
        One of :data:`COUPLINGS`.
    n_trials : int
        Number of Monte Carlo draws.
    K : int
        Largest value of `R`.
    source : UniformSource
        Source of all draws.
    fixed_u : float or None
        Use this value for `U` instead of independent draws; ``1.0`` gives the
        deterministic version of the bound.
    """
    if not c >= 0:
        raise ValueError("c must be nonnegative, got %r" % (c, ))
    if n_trials < 1:
        raise ValueError("n_trials must be positive, got %d" % (n_trials))
    P, R = sample_coupling(coupling, beta, c, K, n_trials, source)
    if fixed_u is None:
        U = source.substream(2).uniforms(n_trials)
    else:
        U = np.full(n_trials, check_uniform(fixed_u, name="fixed_u"))
    values = (P <= c * beta.at_ratio(R, U)) / R
    return float(values.mean()), standard_error(values)
