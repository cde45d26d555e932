r"""Paired Monte Carlo experiments on correlated Gaussian test statistics.

Trial `t` draws from the substreams of ``UniformSource(config.seed).substream(t)``:

====== ===============================================================
stream content
====== ===============================================================
0      test statistics
1      the trial's single uniform
2      one uniform per hypothesis
3      a second, independent uniform per hypothesis (adaptive rounding)
4      an independent replicate of the statistics, for Pe-BH p-values
====== ===============================================================

Results therefore do not depend on the number of worker threads, and every procedure of
a trial sees the same draws.
"""
import itertools
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from rebh.options import RebhOptions
from rebh.sim.config import MCEstimate, SimulationConfig, standard_error
from rebh.sim.gaussian import lr_evalue, one_sided_pvalue, sample_correlated_gaussian
from rebh.sim.registry import TrialDraws, get_procedure
from rebh.utils import TicToc, UniformSource
from rebh.utils.threading import run_chunked

__all__ = (
    "U_MODES",
    "draw_trial",
    "run_paired",
    "summarize",
    "run_experiment",
    "run_sweep",
    "power_difference_grid",
)

U_MODES = ("shared", "independent")

PAIRED_COLUMNS = ["trial", "procedure", "rejections", "fdp", "tdp"]
SWEEP_COLUMNS = ["procedure", "mu", "rho", "power", "power_se", "fdr", "fdr_se"]


def _check_u_mode(u_mode: str) -> str:
    if u_mode not in U_MODES:
        raise ValueError("Unknown u_mode %r; valid modes are %s" % (u_mode, ", ".join(U_MODES)))
    return u_mode


def draw_trial(config: SimulationConfig, trial: int, u_mode: str = "independent") -> TrialDraws:
    """The data and uniforms of trial `trial`.

    In ``"shared"`` mode every per-hypothesis uniform equals the trial's single uniform,
    and the adaptive-rounding uniforms all equal one second draw.
    """
    _check_u_mode(u_mode)
    source = UniformSource(config.seed).substream(trial)
    z = sample_correlated_gaussian(config, source.substream(0))
    u = source.substream(1).uniform()
    if u_mode == "shared":
        u_vec = np.full(config.K, u)
        u_adapt = np.full(config.K, source.substream(3).uniform())
    else:
        u_vec = source.substream(2).uniforms(config.K)
        u_adapt = source.substream(3).uniforms(config.K)
    z_replicate = sample_correlated_gaussian(config, source.substream(4))
    return TrialDraws(evals=lr_evalue(z, config.lambda_), pvals=one_sided_pvalue(z), u=u,
                      u_vec=u_vec, u_adapt=u_adapt, indep_pvals=one_sided_pvalue(z_replicate))


def _trial_rows(config: SimulationConfig, trial: int, procedures: Sequence[str], u_mode: str):
    draws = draw_trial(config, trial, u_mode)
    nonnull = config.nonnull_mask()
    n_nonnull = config.n_nonnull
    rows = []
    for name in procedures:
        mask = get_procedure(name)(draws, config.alpha).mask(config.K)
        n_rej = int(mask.sum())
        true_rej = int((mask & nonnull).sum())
        rows.append((trial, name, n_rej, (n_rej - true_rej) / max(n_rej, 1),
                     true_rej / n_nonnull if n_nonnull > 0 else 0.0))
    return rows


def run_paired(config: SimulationConfig, procedures: Sequence[str],
               opt: Optional[RebhOptions] = None) -> pd.DataFrame:
    """Run several procedures on the same draws of every trial.

    Returns
    -------
    pd.DataFrame
        One row per trial and procedure, with columns ``trial, procedure, rejections,
        fdp, tdp``. ``tdp`` is the proportion of non-nulls discovered (0 when there are
        none), ``fdp`` the proportion of discoveries which are null (0 without
        discoveries).
    """
    if opt is None:
        opt = RebhOptions()
    u_mode = _check_u_mode(opt.u_mode)
    procedures = list(procedures)
    if len(procedures) == 0:
        raise ValueError("At least one procedure is needed")
    for name in procedures:
        get_procedure(name)

    def run(trials):
        return [_trial_rows(config, t, procedures, u_mode) for t in trials]

    with TicToc("%d trials of %s (K=%d, mu=%g, rho=%g, %s)" % (
            config.trials, ",".join(procedures), config.K, config.mu, config.rho,
            config.dependence), debug=opt.debug):
        per_trial = run_chunked(run, config.trials, opt.num_workers)
    return pd.DataFrame(list(itertools.chain.from_iterable(per_trial)), columns=PAIRED_COLUMNS)


def summarize(paired: pd.DataFrame) -> Dict[str, MCEstimate]:
    """One :class:`MCEstimate` per procedure of a :func:`run_paired` table, in order of appearance."""
    out = {}
    for name in pd.unique(paired["procedure"]):
        sub = paired[paired["procedure"] == name]
        out[name] = MCEstimate.from_samples(sub["fdp"].to_numpy(), sub["tdp"].to_numpy())
    return out


def run_experiment(config: SimulationConfig, procedure: str,
                   opt: Optional[RebhOptions] = None) -> MCEstimate:
    """FDR and power of a single registered procedure."""
    return summarize(run_paired(config, [procedure], opt))[procedure]


def run_sweep(config: SimulationConfig, mus: Sequence[float], rhos: Sequence[float],
              procedures: Sequence[str], opt: Optional[RebhOptions] = None) -> pd.DataFrame:
    """FDR and power over a grid of signal strengths and dependence levels.

    Every other setting, including the seed, comes from `config`. When `config.lam` is
    unset the e-value tilt follows `mu`.

    Returns
    -------
    pd.DataFrame
        Columns ``procedure, mu, rho, power, power_se, fdr, fdr_se``, ordered by `mu`,
        then `rho`, then procedure as given.
    """
    if opt is None:
        opt = RebhOptions()
    rows = []
    for mu, rho in itertools.product(mus, rhos):
        point = config.replace(mu=float(mu), rho=float(rho))
        if opt.debug:
            print("sweep point mu=%g rho=%g" % (mu, rho), flush=True)
        for name, est in summarize(run_paired(point, procedures, opt)).items():
            rows.append((name, float(mu), float(rho), est.power, est.power_se, est.fdr, est.fdr_se))
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def power_difference_grid(config: SimulationConfig, mus: Sequence[float], rhos: Sequence[float],
                          first: str, second: str, opt: Optional[RebhOptions] = None) -> pd.DataFrame:
    """Paired per-trial power differences ``first - second`` over a grid.

    Returns
    -------
    pd.DataFrame
        Columns ``mu, rho, power_diff, power_diff_se, min_diff, max_diff``. ``min_diff`` is
        the smallest per-trial difference, nonnegative whenever `first` dominates
        `second` on every trial.
    """
    rows = []
    for mu, rho in itertools.product(mus, rhos):
        paired = run_paired(config.replace(mu=float(mu), rho=float(rho)), [first, second], opt)
        tdp_first = paired[paired["procedure"] == first]["tdp"].to_numpy()
        tdp_second = paired[paired["procedure"] == second]["tdp"].to_numpy()
        diff = tdp_first - tdp_second
        rows.append((float(mu), float(rho), float(diff.mean()), standard_error(diff),
                     float(diff.min()), float(diff.max())))
    return pd.DataFrame(rows, columns=["mu", "rho", "power_diff", "power_diff_se", "min_diff", "max_diff"])
