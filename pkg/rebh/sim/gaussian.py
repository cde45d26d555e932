r"""Correlated Gaussian test statistics and the e-values and p-values derived from them."""
import warnings

import numpy as np
import scipy.linalg
import scipy.signal
from scipy.stats import norm

from rebh.sim.config import SimulationConfig
from rebh.utils.random import UniformSource

__all__ = (
    "sample_correlated_gaussian",
    "standard_normals",
    "toeplitz_noise",
    "equicorrelated_noise",
    "cholesky_noise",
    "lr_evalue",
    "one_sided_pvalue",
)


def standard_normals(source: UniformSource, n: int) -> np.ndarray:
    return source.generator().standard_normal(n)


def toeplitz_noise(eps: np.ndarray, rho: float) -> np.ndarray:
    """AR(1) recursion ``Z_1 = eps_1, Z_i = rho * Z_{i-1} + sqrt(1 - rho^2) * eps_i``.

    The result has covariance ``rho ** |i - j|`` exactly.
    """
    drive = np.sqrt(1 - rho ** 2) * eps
    drive[0] = eps[0]
    return scipy.signal.lfilter([1.0], [1.0, -rho], drive)


def equicorrelated_noise(eps: np.ndarray, rho: float) -> np.ndarray:
    """``a * eps + b * mean(eps)`` with unit variances and covariance ``-rho / (K - 1)``.

    The covariance ``(1 + c) I - c 11^T`` with ``c = rho / (K - 1)`` has eigenvalue
    ``1 + c`` orthogonally to the ones vector and ``1 - rho`` along it; `a` and `b` match
    their square roots.
    """
    K = eps.shape[0]
    if K == 1:
        return eps.copy()
    if rho > 1:
        raise ValueError("Equicorrelation -%r/(K-1) is not positive semidefinite" % (rho, ))
    a = np.sqrt(1 + rho / (K - 1))
    b = np.sqrt(1 - rho) - a
    return a * eps + b * eps.mean()


def cholesky_noise(eps: np.ndarray, covariance: np.ndarray) -> np.ndarray:
    """``L @ eps`` for the lower Cholesky factor `L` of `covariance`.

    A positive semidefinite but singular matrix gets a small diagonal jitter, with a
    warning.
    """
    try:
        L = scipy.linalg.cholesky(covariance, lower=True)
    except np.linalg.LinAlgError:
        min_eig = float(np.linalg.eigvalsh(covariance)[0])
        if min_eig < -1e-8:
            raise ValueError("covariance is not positive semidefinite (smallest eigenvalue %g)" %
                             (min_eig)) from None
        jitter = 1e-10 + max(-min_eig, 0.0)
        warnings.warn("covariance is singular, adding jitter %g to its diagonal" % (jitter))
        L = scipy.linalg.cholesky(covariance + jitter * np.eye(covariance.shape[0]), lower=True)
    return L @ eps


def sample_correlated_gaussian(config: SimulationConfig, source: UniformSource) -> np.ndarray:
    """Draw the test statistics of one trial from `source`.

    Returns ``means + noise`` where the noise has unit variances and the covariance
    given by `config.dependence`.
    """
    eps = standard_normals(source, config.K)
    if config.dependence == "toeplitz":
        noise = toeplitz_noise(eps, config.rho)
    elif config.dependence == "equicorrelated":
        noise = equicorrelated_noise(eps, config.rho)
    else:
        noise = cholesky_noise(eps, config.covariance)
    return config.means() + noise


def lr_evalue(z, lam: float, sigma: float = 1.0):
    """Likelihood-ratio e-value ``exp(lam * z - lam^2 * sigma^2 / 2)``.

    Has expectation one when ``z`` is a centered Gaussian with standard deviation `sigma`.
    """
    if not lam > 0:
        raise ValueError("lam must be positive, got %r" % (lam, ))
    with np.errstate(over="ignore"):
        out = np.exp(lam * np.asarray(z, dtype=np.float64) - 0.5 * lam ** 2 * sigma ** 2)
    if out.ndim == 0:
        return float(out)
    return out


def one_sided_pvalue(z):
    """``1 - Phi(z)``, computed as the normal survival function to keep precision in the tail."""
    return norm.sf(z)
