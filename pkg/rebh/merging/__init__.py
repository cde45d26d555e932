from .hommel import hommel_p, u_hommel_p
from .closed_testing import (
    closed_hommel, closed_u_hommel, closed_testing_bruteforce, hommel_local_test, u_hommel_local_test
)
from .dual import grid_harmonic_calibrator, GridHarmonicCalibrator, PMergingDual, merge_p, merge_p_randomized

__all__ = (
    "hommel_p", "u_hommel_p",
    "closed_hommel", "closed_u_hommel", "closed_testing_bruteforce", "hommel_local_test",
    "u_hommel_local_test",
    "grid_harmonic_calibrator", "GridHarmonicCalibrator", "PMergingDual", "merge_p",
    "merge_p_randomized",
)
