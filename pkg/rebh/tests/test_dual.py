import numpy as np
import pytest

from rebh.merging import (
    GridHarmonicCalibrator, PMergingDual, grid_harmonic_calibrator, hommel_p, merge_p, merge_p_randomized
)
from rebh.options import MergeOptions
from rebh.procedures import BYCalibrator
from rebh.tests.gen_random import gen_pvalues, gen_uniforms


def grid_scan(dual, P, step=1e-5, target=1.0):
    """Smallest level on a regular grid at which the merged e-value reaches `target`."""
    levels = np.arange(1, int(round(1 / step)) + 1) * step
    K = len(dual)
    values = sum(dual.weights[i] * np.asarray(dual.calibrators[i](P[i] / levels)) for i in range(K))
    hits = np.flatnonzero(values >= target)
    return levels[hits[0]] if hits.shape[0] else 1.0


class TestCalibrator:
    @pytest.mark.parametrize("x, expected", [(0.1, 2.0), (0.4, 1.0), (0.7, 0.0), (0.0, np.inf)],
                             ids=["first-bin", "second-bin", "above-cutoff", "zero"])
    def test_values(self, x, expected):
        assert grid_harmonic_calibrator(x, 2) == expected

    def test_vectorized(self):
        f = GridHarmonicCalibrator(3)
        out = f(np.array([0.05, 0.5, 0.9]))
        np.testing.assert_array_equal(out, [3.0, 1.0, 0.0])
        assert "K=3" in repr(f)

    def test_invalid(self):
        with pytest.raises(ValueError):
            grid_harmonic_calibrator(-0.5, 3)


class TestDual:
    def test_weights_validated(self):
        f = GridHarmonicCalibrator(2)
        with pytest.raises(ValueError, match="sum to 1"):
            PMergingDual([0.5, 0.6], [f, f])
        with pytest.raises(ValueError):
            PMergingDual([1.0], [f, f])
        with pytest.raises(ValueError):
            PMergingDual([], [])

    def test_calibrators_validated(self):
        with pytest.raises(ValueError, match="nonincreasing"):
            PMergingDual([1.0], [lambda p: p])
        with pytest.raises(ValueError, match="vanish"):
            PMergingDual([1.0], [lambda p: 1.0])

    def test_evaluate(self):
        dual = PMergingDual.grid_harmonic(2)
        assert len(dual) == 2
        assert dual.evaluate(np.array([0.1, 0.4])) == pytest.approx(1.5)
        assert dual.limit_at_zero(np.array([0.1, 0.4])) == 0.0
        assert dual.limit_at_zero(np.array([0.0, 0.4])) == np.inf

    def test_zero_weight_ignores_coordinate(self):
        dual = PMergingDual([1.0, 0.0], [BYCalibrator(1.0, 1), GridHarmonicCalibrator(2)])
        assert dual.limit_at_zero(np.array([0.3, 0.0])) == 0.0
        assert merge_p(dual, (0.3, 0.0)).value == pytest.approx(0.3, abs=1e-10)


class TestMergeP:
    def test_single_pvalue_is_recovered(self):
        dual = PMergingDual([1.0], [BYCalibrator(1.0, 1)])
        for p in [0.001, 0.3, 0.77]:
            assert merge_p(dual, [p]).value == pytest.approx(p, abs=1e-10)

    def test_zero_pvalue(self):
        assert merge_p(PMergingDual.grid_harmonic(3), (0.0, 0.5, 0.9)).value == 0.0

    def test_nothing_reaches_one(self):
        dual = PMergingDual([1.0], [BYCalibrator(0.5, 1)])
        assert merge_p(dual, [0.9]).value == 1.0

    def test_matches_grid_scan(self):
        dual = PMergingDual.grid_harmonic(3)
        P = np.array([0.05, 0.15, 0.9])
        value = merge_p(dual, P).value
        assert value == pytest.approx(0.275, abs=1e-9)
        assert abs(value - grid_scan(dual, P)) <= 2e-5

    def test_random_grid_scans(self):
        for K in (2, 5, 8):
            dual = PMergingDual.grid_harmonic(K)
            P = gen_pvalues(K, seed=K, signal=0.5)
            assert abs(merge_p(dual, P).value - grid_scan(dual, P)) <= 2e-5

    def test_single_pvalue_grid_harmonic(self):
        # one p-value: grid-harmonic merging is the identity
        assert merge_p(PMergingDual.grid_harmonic(1), [0.42]).value == pytest.approx(hommel_p([0.42]).value)

    def test_tolerance(self):
        dual = PMergingDual([1.0], [BYCalibrator(1.0, 1)])
        coarse = merge_p(dual, [0.3], MergeOptions(merge_tolerance=1e-3))
        assert 0.3 <= coarse.value <= 0.3 + 1e-3

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            merge_p(PMergingDual.grid_harmonic(3), (0.1, 0.2))

    def test_monotone_in_pvalues(self):
        dual = PMergingDual.grid_harmonic(6)
        rng = np.random.default_rng(4)
        for _ in range(50):
            P = rng.random(6)
            Q = P + rng.random(6) * (rng.random(6) < 0.5) * 0.2
            assert merge_p(dual, P).value <= merge_p(dual, Q).value


class TestRandomizedMergeP:
    def test_u_one_is_deterministic(self):
        dual = PMergingDual.grid_harmonic(4)
        for seed in range(20):
            P = gen_pvalues(4, seed=seed)
            assert merge_p_randomized(dual, P, 1.0).value == merge_p(dual, P).value

    def test_never_larger(self):
        for seed in range(300):
            K = 1 + seed % 7
            dual = PMergingDual.grid_harmonic(K)
            P = gen_pvalues(K, seed=seed, signal=0.4)
            u = gen_uniforms(1, seed)[0]
            res = merge_p_randomized(dual, P, u)
            assert res.value <= merge_p(dual, P).value
            assert res.randomized and res.u_used == u

    def test_matches_grid_scan(self):
        dual = PMergingDual.grid_harmonic(3)
        P = np.array([0.05, 0.15, 0.9])
        assert abs(merge_p_randomized(dual, P, 0.4).value - grid_scan(dual, P, target=0.4)) <= 2e-5

    def test_small_u_reaches_support_edge(self):
        # as u -> 0 the merged p-value tends to the smallest level with a positive merged e-value
        dual = PMergingDual.grid_harmonic(3)
        P = np.array([0.05, 0.15, 0.9])
        edge = 0.05 * (1 + 1 / 2 + 1 / 3)
        assert merge_p_randomized(dual, P, 1e-9).value == pytest.approx(edge, abs=1e-9)

    def test_invalid_u(self):
        with pytest.raises(ValueError):
            merge_p_randomized(PMergingDual.grid_harmonic(2), (0.1, 0.2), 0.0)
