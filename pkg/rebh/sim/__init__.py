from .config import SimulationConfig, MCEstimate, DEPENDENCE_KINDS
from .gaussian import sample_correlated_gaussian, lr_evalue, one_sided_pvalue
from .registry import TrialDraws, PROCEDURES, procedure_names, get_procedure
from .experiment import (
    U_MODES, draw_trial, run_paired, summarize, run_experiment, run_sweep, power_difference_grid
)
from .guo_rao import (
    GuoRaoInstance, GuoRaoReport, guo_rao_masses, guo_rao_sample, guo_rao_exact_fdr,
    guo_rao_rejection_probability, guo_rao_experiment
)
from .superuniformity import COUPLINGS, sample_coupling, superuniformity_stress
from .null_tests import NULL_STRUCTURES, GlobalNullReport, sample_null_pvalues, global_null_experiment

__all__ = (
    "SimulationConfig", "MCEstimate", "DEPENDENCE_KINDS",
    "sample_correlated_gaussian", "lr_evalue", "one_sided_pvalue",
    "TrialDraws", "PROCEDURES", "procedure_names", "get_procedure",
    "U_MODES", "draw_trial", "run_paired", "summarize", "run_experiment", "run_sweep",
    "power_difference_grid",
    "GuoRaoInstance", "GuoRaoReport", "guo_rao_masses", "guo_rao_sample", "guo_rao_exact_fdr",
    "guo_rao_rejection_probability", "guo_rao_experiment",
    "COUPLINGS", "sample_coupling", "superuniformity_stress",
    "NULL_STRUCTURES", "GlobalNullReport", "sample_null_pvalues", "global_null_experiment",
)
