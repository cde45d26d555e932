from dataclasses import dataclass
from typing import Optional

__all__ = ("BaseOptions", "MergeOptions", "ClosedTestingOptions", "SimulationOptions",
           "RebhOptions")

_docs = {
    "base":
    """
debug
    `default False` - When set to ``True``, long-running routines (simulations, sweeps, the
    command-line interface) print timing and progress information.
num_workers
    `default None` - The number of threads used to run Monte Carlo trials in parallel.
    If not set, the number of physical CPU cores is used. Results do not depend on this
    setting: every trial draws from its own random substream.
    """,
    "merge":
    """
merge_tolerance
    `default 1e-12` - Absolute tolerance on the level :math:`\\alpha` for the bisection
    which computes a merged p-value from a dual p-merging function.
merge_max_iter
    `default 200` - Maximum number of bisection steps. With the default tolerance about
    40 steps suffice, so this only guards against a misbehaving calibrator.
    """,
    "closed":
    """
max_bruteforce_size
    `default 20` - Largest number of hypotheses for which closed testing may be run by
    enumerating all :math:`2^K - 1` intersection hypotheses. Larger inputs are refused.
    """,
    "sim":
    """
u_mode
    `default "independent"` - How uniforms are drawn for procedures which need one
    uniform per hypothesis. ``"independent"`` gives every hypothesis its own draw,
    ``"shared"`` reuses the single uniform of the trial for all hypotheses.
full_scale
    `default False` - When set, simulation defaults use 100 hypotheses and 500 trials
    instead of the faster desk-scale defaults of 50 hypotheses and 200 trials.
    """,
}


@dataclass
class BaseOptions():
    """Options common to all modules
    """
    debug: bool = False
    num_workers: Optional[int] = None

    def get_base_options(self):
        return BaseOptions(debug=self.debug, num_workers=self.num_workers)


@dataclass
class MergeOptions():
    """Options controlling the computation of merged p-values

    See Also
    --------
    :func:`rebh.merging.merge_p` :
        Dual-form p-merging which uses these options
    """
    merge_tolerance: float = 1e-12
    merge_max_iter: int = 200

    def get_merge_options(self):
        return MergeOptions(merge_tolerance=self.merge_tolerance,
                            merge_max_iter=self.merge_max_iter)


@dataclass
class ClosedTestingOptions():
    """Options for exhaustive closed testing
    """
    max_bruteforce_size: int = 20

    def get_closed_testing_options(self):
        return ClosedTestingOptions(max_bruteforce_size=self.max_bruteforce_size)


@dataclass
class SimulationOptions():
    """Options for the Monte Carlo harness
    """
    u_mode: str = "independent"
    full_scale: bool = False

    def get_simulation_options(self):
        return SimulationOptions(u_mode=self.u_mode, full_scale=self.full_scale)

    @property
    def default_num_hypotheses(self) -> int:
        return 100 if self.full_scale else 50

    @property
    def default_trials(self) -> int:
        return 500 if self.full_scale else 200


@dataclass()
class RebhOptions(BaseOptions, MergeOptions, ClosedTestingOptions, SimulationOptions):
    """Global options for rebh."""
    pass


def _reset_doc(cls, params):
    cls.__doc__ = "%s\n\nParameters\n----------%s\n" % (cls.__doc__, params)


_reset_doc(BaseOptions, _docs["base"])
_reset_doc(MergeOptions, _docs["merge"])
_reset_doc(ClosedTestingOptions, _docs["closed"])
_reset_doc(SimulationOptions, _docs["sim"])


RebhOptions.__doc__ = "%s\n\nParameters\n----------%s%s%s%s\n" % (
    RebhOptions.__doc__, _docs["base"], _docs["merge"], _docs["closed"], _docs["sim"])
