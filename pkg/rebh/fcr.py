r"""Confidence intervals for selected parameters with false coverage rate control.

After selecting a set :math:`S` of parameters from the data, each selected parameter gets
a confidence interval at miscoverage level :math:`\hat\alpha_i`. The level rules below
keep the expected fraction of selected intervals missing their parameter (the FCR) at
:math:`\alpha` under arbitrary dependence:

* e-BY: :math:`\alpha|S|/K`, with e-value confidence intervals;
* Ue-BY: :math:`\alpha|S|/(UK)` capped at 1, with e-value confidence intervals;
* BY: :math:`\alpha|S|/(K\ell_K)`, with any marginal confidence intervals;
* U-BY: :math:`\alpha(\lfloor |S|/U \rfloor \wedge K)/(K\ell_K)`, likewise.

The randomized rules assign larger levels, hence shorter intervals.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.stats import norm

from rebh.discovery import SelectionResult
from rebh.options import BaseOptions
from rebh.sim.config import SimulationConfig, standard_error
from rebh.sim.gaussian import sample_correlated_gaussian
from rebh.utils import TicToc, UniformSource
from rebh.utils.helpers import check_alpha, check_uniform, floor_ratio, harmonic
from rebh.utils.threading import run_chunked

__all__ = (
    "eby_levels",
    "ueby_levels",
    "by_fcr_levels",
    "u_by_fcr_levels",
    "LEVEL_RULES",
    "fcr_levels",
    "apply_level_rule",
    "gaussian_eci",
    "gaussian_ci",
    "GaussianECI",
    "select_top_m",
    "select_threshold",
    "FcrReport",
    "fcr_experiment",
)

Interval = Tuple[float, float]
SelectionRule = Callable[[np.ndarray], np.ndarray]

LEVEL_RULES = ("e-by", "ue-by", "by", "u-by")


def _check_selection(n_selected: int, K: int) -> None:
    if int(n_selected) != n_selected or not (0 <= n_selected <= K):
        raise ValueError("Number of selected parameters must be an integer in [0, %d], got %r" %
                         (K, n_selected))


def eby_levels(n_selected: int, K: int, alpha: float) -> Optional[float]:
    """``alpha * n_selected / K``, or None when nothing is selected."""
    _check_selection(n_selected, K)
    alpha = check_alpha(alpha)
    if n_selected == 0:
        return None
    return alpha * n_selected / K


def ueby_levels(n_selected: int, K: int, alpha: float, u: float) -> Optional[float]:
    """``min(alpha * n_selected / (u * K), 1)``, or None when nothing is selected."""
    _check_selection(n_selected, K)
    alpha = check_alpha(alpha)
    u = check_uniform(u)
    if n_selected == 0:
        return None
    return min(alpha * n_selected / (u * K), 1.0)


def by_fcr_levels(n_selected: int, K: int, alpha: float) -> Optional[float]:
    _check_selection(n_selected, K)
    alpha = check_alpha(alpha)
    if n_selected == 0:
        return None
    return alpha * n_selected / (K * harmonic(K))


def u_by_fcr_levels(n_selected: int, K: int, alpha: float, u: float) -> Optional[float]:
    """``alpha * min(floor(n_selected / u), K) / (K * ell_K)``, or None when nothing is selected."""
    _check_selection(n_selected, K)
    alpha = check_alpha(alpha)
    u = check_uniform(u)
    if n_selected == 0:
        return None
    return alpha * floor_ratio(n_selected, u, K) / (K * harmonic(K))


def fcr_levels(rule: str, n_selected: int, K: int, alpha: float, u: Optional[float] = None) -> Optional[float]:
    """Dispatch on a rule name from :data:`LEVEL_RULES`. Randomized rules require `u`."""
    if not isinstance(rule, str):
        raise TypeError("rule must be a string, got %r" % (rule, ))
    if rule not in LEVEL_RULES:
        raise ValueError("Unknown level rule %r; valid rules are %s" % (rule, ", ".join(LEVEL_RULES)))
    if rule in ("ue-by", "u-by") and u is None:
        raise ValueError("Level rule %r needs a uniform u" % (rule))
    if rule == "e-by":
        return eby_levels(n_selected, K, alpha)
    if rule == "ue-by":
        return ueby_levels(n_selected, K, alpha, u)
    if rule == "by":
        return by_fcr_levels(n_selected, K, alpha)
    return u_by_fcr_levels(n_selected, K, alpha, u)


def apply_level_rule(selected, K: int, alpha: float, rule: str, u: Optional[float] = None) -> SelectionResult:
    selected = frozenset(int(i) for i in selected)
    level = fcr_levels(rule, len(selected), K, alpha, u)
    return SelectionResult(selected=selected, levels={i: level for i in selected})


def gaussian_eci(z: float, sigma: float, lam: float, alpha: float) -> Interval:
    r"""e-value confidence interval for the mean of a Gaussian observation `z`.

    The e-values :math:`X(\theta) = \exp(\lambda(z - \theta) - \lambda^2\sigma^2/2)` give
    the interval :math:`\{\theta : X(\theta) < 1/\alpha\}`, the open half-line returned
    as ``(lower, inf)``.
    """
    if not (sigma > 0 and lam > 0):
        raise ValueError("sigma and lam must be positive, got %r and %r" % (sigma, lam))
    alpha = check_alpha(alpha)
    return (z - lam * sigma ** 2 / 2 - np.log(1 / alpha) / lam, np.inf)


def gaussian_ci(z: float, sigma: float, alpha: float) -> Interval:
    """One-sided level ``1 - alpha`` interval ``(z - sigma * Phi^{-1}(1 - alpha), inf)``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive, got %r" % (sigma, ))
    alpha = check_alpha(alpha)
    return (z - sigma * norm.isf(alpha), np.inf)


@dataclass(frozen=True)
class GaussianECI:
    """The family of Gaussian e-values indexed by the mean, for one observation."""
    z: float
    sigma: float = 1.0
    lam: float = 1.0

    def evalue_at(self, theta: float) -> float:
        return float(np.exp(self.lam * (self.z - theta) - self.lam ** 2 * self.sigma ** 2 / 2))

    def interval_at(self, alpha: float) -> Interval:
        return gaussian_eci(self.z, self.sigma, self.lam, alpha)


def select_top_m(m: int) -> SelectionRule:
    """Selection rule keeping the `m` largest ``|z|`` (ties by index)."""
    if m < 0:
        raise ValueError("m must be nonnegative, got %d" % (m))
    return lambda z: np.sort(np.argsort(-np.abs(z), kind="stable")[:m])


def select_threshold(threshold: float) -> SelectionRule:
    """Selection rule keeping every `z` strictly above `threshold`."""
    return lambda z: np.flatnonzero(np.asarray(z) > threshold)


@dataclass(frozen=True)
class FcrReport:
    """FCR estimates per level rule, and how often randomized intervals nest in deterministic ones.

    `table` has the columns ``rule, fcr, fcr_se``. `nested_fraction` is the fraction of
    trials in which every Ue-BY interval lies inside the e-BY interval and every U-BY
    interval inside the BY interval.
    """
    table: pd.DataFrame
    nested_fraction: float
    trials: int


def _fcr_trial(config: SimulationConfig, selection: SelectionRule, source: UniformSource):
    theta = config.means()
    z = sample_correlated_gaussian(config, source.substream(0))
    u = source.substream(1).uniform()
    selected = selection(z)
    n = selected.shape[0]
    if n == 0:
        return np.zeros(len(LEVEL_RULES)), True

    lower = {}
    for rule in LEVEL_RULES:
        level = fcr_levels(rule, n, config.K, config.alpha, u)
        if rule in ("e-by", "ue-by"):
            lower[rule] = gaussian_eci(z[selected], 1.0, config.lambda_, level)[0]
        else:
            lower[rule] = gaussian_ci(z[selected], 1.0, level)[0]
    fcp = np.array([np.mean(theta[selected] <= lower[rule]) for rule in LEVEL_RULES])
    nested = bool(np.all(lower["ue-by"] >= lower["e-by"]) and np.all(lower["u-by"] >= lower["by"]))
    return fcp, nested


def fcr_experiment(config: SimulationConfig, selection: Optional[SelectionRule] = None,
                   opt: Optional[BaseOptions] = None) -> FcrReport:
    """Monte Carlo FCR of the four level rules on correlated Gaussian means.

    In every trial the statistics of `config` are drawn, parameters are selected by
    `selection` (default: ``z > 2``), and each rule's level is turned into one-sided
    intervals for the selected means: Gaussian e-value intervals with tilt
    ``config.lambda_`` for e-BY and Ue-BY, standard intervals for BY and U-BY. All rules
    share the trial's data and uniform.
    """
    if opt is None:
        opt = BaseOptions()
    if selection is None:
        selection = select_threshold(2.0)
    root = UniformSource(config.seed)

    def run(trials):
        return [_fcr_trial(config, selection, root.substream(t)) for t in trials]

    with TicToc("FCR experiment (K=%d, %d trials)" % (config.K, config.trials), debug=opt.debug):
        out = run_chunked(run, config.trials, opt.num_workers)
    fcp = np.stack([o[0] for o in out])
    nested = np.array([o[1] for o in out])
    table = pd.DataFrame({
        "rule": list(LEVEL_RULES),
        "fcr": fcp.mean(axis=0),
        "fcr_se": [standard_error(fcp[:, j]) for j in range(len(LEVEL_RULES))],
    })
    return FcrReport(table=table, nested_fraction=float(nested.mean()), trials=config.trials)
