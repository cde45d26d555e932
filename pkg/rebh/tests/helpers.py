import numpy as np


def assert_superset(big, small, msg=""):
    missing = small.rejected - big.rejected
    assert not missing, "%s: %s rejected by the smaller procedure only" % (msg, sorted(missing))


def assert_mc_below(estimate, se, bound, n_se=3.0, msg=""):
    assert estimate <= bound + n_se * se, \
        "%s: Monte Carlo estimate %.5f exceeds %.5f + %g * %.5f" % (msg, estimate, bound, n_se, se)


def assert_mc_close(estimate, se, target, n_se=4.0, msg=""):
    assert abs(estimate - target) <= n_se * se + 1e-12, \
        "%s: Monte Carlo estimate %.5f is not within %g * %.5f of %.5f" % (msg, estimate, n_se, se, target)


def mean_and_se(samples):
    samples = np.asarray(samples, dtype=np.float64)
    return float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(samples.shape[0]))
