"""Named procedures runnable on the draws of one simulated trial."""
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from rebh.discovery import DiscoverySet
from rebh.procedures import (
    bh, by, by_uniform_ratio, ebh, j_ebh, pe_ebh, r1_ebh, r2_ebh, rboth_ebh, u_by, u_ebh
)

__all__ = ("TrialDraws", "PROCEDURES", "procedure_names", "get_procedure")


@dataclass(frozen=True)
class TrialDraws:
    """Everything a procedure may look at in one trial.

    All procedures of a trial see the same statistics and the same uniforms, so their
    discovery sets can be compared pairwise.
    """
    evals: np.ndarray
    pvals: np.ndarray
    u: float
    u_vec: np.ndarray
    u_adapt: np.ndarray
    # p-values of an independent replicate of the data, for combining with `evals`
    indep_pvals: np.ndarray


Procedure = Callable[[TrialDraws, float], DiscoverySet]

PROCEDURES: Dict[str, Procedure] = {
    "ebh": lambda d, a: ebh(d.evals, a).discoveries,
    "r1-ebh": lambda d, a: r1_ebh(d.evals, a, d.u_vec).discoveries,
    "r2-ebh": lambda d, a: r2_ebh(d.evals, a, d.u_vec).discoveries,
    "rboth-ebh": lambda d, a: rboth_ebh(d.evals, a, d.u_vec, d.u_adapt).discoveries,
    "u-ebh": lambda d, a: u_ebh(d.evals, a, d.u).discoveries,
    "j-ebh": lambda d, a: j_ebh(d.evals, a, d.u_vec).discoveries,
    "pe-ebh": lambda d, a: pe_ebh(d.evals, d.indep_pvals, a).discoveries,
    "bh": lambda d, a: bh(d.pvals, a),
    "by": lambda d, a: by(d.pvals, a).discoveries,
    "u-by": lambda d, a: u_by(d.pvals, a, d.u).discoveries,
    "by-ratio": lambda d, a: by_uniform_ratio(d.evals, a, d.u_vec).discoveries,
}


def procedure_names() -> Tuple[str, ...]:
    return tuple(PROCEDURES)


def get_procedure(name: str) -> Procedure:
    if not isinstance(name, str):
        raise TypeError("Procedure name must be a string, got %r" % (name, ))
    try:
        return PROCEDURES[name]
    except KeyError:
        raise ValueError("Unknown procedure %r; valid procedures are %s" %
                         (name, ", ".join(PROCEDURES))) from None
