import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from rebh.utils.helpers import check_alpha

__all__ = ("SimulationConfig", "MCEstimate", "DEPENDENCE_KINDS")

DEPENDENCE_KINDS = ("toeplitz", "equicorrelated", "custom")
RHO_MAX = 0.9


@dataclass(frozen=True)
class SimulationConfig:
    """One Gaussian multiple-testing experiment.

    Test statistics are unit-variance Gaussians :math:`Z_i` with mean `mu` on the non-nulls
    and 0 on the nulls. Hypothesis `i` gets the likelihood-ratio e-value
    :math:`\\exp(\\lambda Z_i - \\lambda^2/2)` and the one-sided p-value
    :math:`1 - \\Phi(Z_i)`.

    Parameters
    ----------
    K : int
        Number of hypotheses.
    pi0 : float
        Fraction of hypotheses whose null is **false**. The first ``round(pi0 * K)``
        indices are the non-nulls.
    mu : float
        Common mean of the non-null statistics.
    rho : float
        Dependence strength in [0, 0.9]. ``"toeplitz"`` uses covariance
        ``rho ** |i - j|``; ``"equicorrelated"`` uses ``-rho / (K - 1)`` off the diagonal.
    dependence : str
        One of ``"toeplitz"``, ``"equicorrelated"`` or ``"custom"``. The latter requires
        `covariance` and ignores `rho`.
    lam : float or None
        Tilt of the e-values. Defaults to `mu`, the likelihood ratio against the true
        alternative.
    trials : int
        Number of Monte Carlo trials.
    alpha : float
        Target level of the procedures.
    seed : int
        Root seed; trial `t` draws only from substreams of ``(seed, t)``.
    covariance : array or None
        Covariance matrix for ``dependence="custom"``, with unit diagonal.
    """
    K: int
    pi0: float = 0.3
    mu: float = 3.0
    rho: float = 0.0
    dependence: str = "toeplitz"
    lam: Optional[float] = None
    trials: int = 200
    alpha: float = 0.05
    seed: int = 0
    covariance: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.K, bool) or int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be a positive integer, got %r" % (self.K, ))
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer, got %r" % (self.trials, ))
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "trials", int(self.trials))
        if not (0 <= self.pi0 <= 1):
            raise ValueError("pi0 must be in [0, 1], got %r" % (self.pi0, ))
        if not np.isfinite(self.mu):
            raise ValueError("mu must be finite, got %r" % (self.mu, ))
        if not isinstance(self.dependence, str):
            raise TypeError("dependence must be a string, got %r" % (self.dependence, ))
        if self.dependence not in DEPENDENCE_KINDS:
            raise ValueError("Unknown dependence %r; valid kinds are %s" %
                             (self.dependence, ", ".join(DEPENDENCE_KINDS)))
        if not (0 <= self.rho <= RHO_MAX):
            raise ValueError("rho must be in [0, %g], got %r" % (RHO_MAX, self.rho))
        if self.dependence == "custom":
            if self.covariance is None:
                raise ValueError("dependence='custom' requires a covariance matrix")
            cov = np.array(self.covariance, dtype=np.float64)
            if cov.shape != (self.K, self.K):
                raise ValueError("covariance must have shape (%d, %d), got %s" % (self.K, self.K, cov.shape))
            if not np.allclose(cov, cov.T):
                raise ValueError("covariance must be symmetric")
            cov.setflags(write=False)
            object.__setattr__(self, "covariance", cov)
        if self.lambda_ <= 0:
            raise ValueError("The e-value tilt must be positive, got %r; set lam when mu <= 0" %
                             (self.lambda_, ))
        check_alpha(self.alpha)
        if int(self.seed) != self.seed or not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be an integer in [0, 2**64), got %r" % (self.seed, ))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def lambda_(self) -> float:
        return float(self.mu if self.lam is None else self.lam)

    @property
    def n_nonnull(self) -> int:
        return int(round(self.pi0 * self.K))

    def nonnull_mask(self) -> np.ndarray:
        mask = np.zeros(self.K, dtype=bool)
        mask[:self.n_nonnull] = True
        return mask

    def means(self) -> np.ndarray:
        return np.where(self.nonnull_mask(), self.mu, 0.0)

    def replace(self, **changes) -> "SimulationConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimates of FDR and power with their standard errors."""
    fdr: float
    fdr_se: float
    power: float
    power_se: float
    trials: int

    @classmethod
    def from_samples(cls, fdp: np.ndarray, tdp: np.ndarray) -> "MCEstimate":
        fdp = np.asarray(fdp, dtype=np.float64)
        tdp = np.asarray(tdp, dtype=np.float64)
        n = fdp.shape[0]
        return cls(fdr=float(fdp.mean()), fdr_se=standard_error(fdp),
                   power=float(tdp.mean()), power_se=standard_error(tdp), trials=n)


def standard_error(samples: np.ndarray) -> float:
    """Sample standard deviation over the square root of the sample size; 0 for one sample."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[0] < 2:
        return 0.0
    return float(samples.std(ddof=1) / np.sqrt(samples.shape[0]))
