from .ebh import (
    ebh, r1_ebh, r2_ebh, rboth_ebh, ell_index, u_ebh, u_ebh_rounding_view, j_ebh, pe_ebh,
    combine_e_and_p, bh, derandomized_ebh
)
from .by import by, u_by, by_calibrate, BYCalibrator, reshaped_by, reshaped_u_by, by_uniform_ratio
from .reshaping import ReshapingFunction, DiscreteReshaping, BYReshape

__all__ = (
    "ebh", "r1_ebh", "r2_ebh", "rboth_ebh", "ell_index", "u_ebh", "u_ebh_rounding_view", "j_ebh",
    "pe_ebh", "combine_e_and_p", "bh", "derandomized_ebh",
    "by", "u_by", "by_calibrate", "BYCalibrator", "reshaped_by", "reshaped_u_by", "by_uniform_ratio",
    "ReshapingFunction", "DiscreteReshaping", "BYReshape",
)
