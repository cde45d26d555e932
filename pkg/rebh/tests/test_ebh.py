import numpy as np
import pytest

from rebh.procedures import (
    bh, combine_e_and_p, derandomized_ebh, ebh, ell_index, j_ebh, pe_ebh, r1_ebh, r2_ebh, rboth_ebh, u_ebh,
    u_ebh_rounding_view
)
from rebh.tests.gen_random import gen_evalues, gen_instances, gen_pvalues, gen_uniforms
from rebh.tests.helpers import assert_superset
from rebh.utils import UniformSource


class TestEbh:
    @pytest.mark.parametrize("X, alpha, expected", [
        ((9, 5, 1, 1), 0.5, {0, 1}),
        ((0, 0, 0), 0.1, set()),
        ((3, 0.5), 0.5, set()),
        ((np.inf, 0, 2), 0.5, {0}),
        ((8, 4, 8 / 3, 2), 0.5, {0, 1, 2, 3}),
    ], ids=["example", "zeros", "below-first-level", "infinite", "exact-levels"])
    def test_examples(self, X, alpha, expected):
        res = ebh(X, alpha)
        assert res.rejected == expected
        assert res.k_star == len(expected)
        assert res.alpha_hat_star == pytest.approx(alpha * (len(expected) + 1) / len(X))

    def test_threshold_view(self):
        res = ebh((9, 5, 1, 1), 0.5)
        assert res.discoveries.threshold == pytest.approx(8 / 3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ebh([], 0.1)
        with pytest.raises(ValueError):
            ebh([1.0, -1.0], 0.1)
        with pytest.raises(ValueError):
            ebh([1.0], 0.0)

    def test_single_hypothesis(self):
        assert ebh([10.0], 0.1).rejected == {0}
        assert ebh([9.99], 0.1).rejected == set()

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            K = int(rng.integers(1, 13))
            alpha = float(rng.choice([0.05, 0.2, 0.5]))
            X = gen_evalues(K, alpha, seed=int(rng.integers(0, 2 ** 32)))
            k_star = max([k for k in range(1, K + 1) if np.sum(X >= K / (alpha * k)) >= k], default=0)
            assert ebh(X, alpha).k_star == k_star


class TestRoundedEbh:
    def test_r1_grows_k_star(self):
        X = (9, 5, 2.5, 1)
        res = r1_ebh(X, 0.5, (1, 1, 0.5, 1))
        np.testing.assert_allclose(res.rounded_values, [9, 4, 8 / 3, 0])
        assert ebh(X, 0.5).k_star == 2
        assert res.k_star == 3 and res.rejected == {0, 1, 2}

    def test_r1_on_grid_is_ebh(self):
        X = (8, 4, 0, 2, np.inf)
        for seed in range(5):
            assert r1_ebh(X, 0.5 * 5 / 4, gen_uniforms(5, seed)).rejected == ebh(X, 0.5 * 5 / 4).rejected

    def test_r1_rounding_down_keeps_ebh(self):
        X = gen_evalues(30, seed=4)
        assert r1_ebh(X, 0.1, np.ones(30)).rejected == ebh(X, 0.1).rejected

    @pytest.mark.parametrize("u2, expected", [(0.4, {0, 1}), (0.9, {0})], ids=["lifted", "dropped"])
    def test_r2(self, u2, expected):
        res = r2_ebh((5, 1.2), 0.5, (0.5, u2))
        assert res.k_star == 1 and res.alpha_hat_star == 0.5
        assert res.rejected == expected

    def test_r2_all_clear(self):
        assert r2_ebh((10, 20, 30), 0.5, (1, 1, 1)).rejected == {0, 1, 2}

    def test_rboth_example(self):
        res = rboth_ebh((5, 1.2), 0.5, (1, 1), (1, 0.5))
        assert res.k_star == 1 and res.rejected == {0}
        np.testing.assert_array_equal(res.rounded_values, [5, 0])

    def test_rboth_inert_draws_give_ebh(self):
        for K, X, alpha, seed in gen_instances(20, seed=2):
            assert rboth_ebh(X, alpha, np.ones(K), np.ones(K)).rejected == ebh(X, alpha).rejected

    def test_rboth_zeros(self):
        assert len(rboth_ebh(np.zeros(4), 0.5, gen_uniforms(4, 1), gen_uniforms(4, 2)).rejected) == 0

    def test_uniform_vector_length(self):
        with pytest.raises(ValueError):
            r1_ebh((1, 2), 0.1, (0.5, ))
        with pytest.raises(ValueError):
            rboth_ebh((1, 2), 0.1, (0.5, 0.5), (0.5, ))


class TestSingleUniform:
    def test_ell_index(self):
        np.testing.assert_array_equal(ell_index((9, 5, 1, 1)), [2, 2, 4, 4])
        np.testing.assert_array_equal(ell_index((1, 5, 9, 1)), [4, 2, 2, 4])
        np.testing.assert_array_equal(ell_index(np.full(6, 2.5)), np.full(6, 6))
        np.testing.assert_array_equal(ell_index((0.3, )), [1])

    def test_u_ebh_example(self):
        X = (3, 0.5)
        assert ebh(X, 0.5).rejected == set()
        res = u_ebh(X, 0.5, 0.6)
        assert res.rejected == {0}
        assert res.discoveries.threshold == pytest.approx(1.2)
        assert u_ebh_rounding_view(X, 0.5, 0.6).rejected == {0}

    def test_rounding_view_needs_every_larger_evalue(self):
        # the third e-value clears its own rounding, but the second-largest rank is the last one reached
        X = (1.0, 0.9, 0.32, 0.29)
        np.testing.assert_array_equal(ell_index(X), [2, 2, 4, 4])
        assert u_ebh(X, 1.0, 0.3).rejected == {0, 1}
        assert u_ebh_rounding_view(X, 1.0, 0.3).rejected == {0, 1}
        assert bh(0.3 / np.asarray(X), 1.0).rejected == {0, 1}

    def test_u_one_is_ebh(self):
        for K, X, alpha, seed in gen_instances(30, seed=5):
            assert u_ebh(X, alpha, 1.0).rejected == ebh(X, alpha).rejected

    def test_zeros(self):
        assert u_ebh((0, 0), 0.5, 0.01).rejected == set()
        with pytest.raises(ValueError):
            u_ebh((1, 2), 0.5, 0.0)

    @pytest.mark.parametrize("n_instances", [
        200, pytest.param(10_000, marks=pytest.mark.benchmark)], ids=["reduced", "full"])
    def test_three_views_agree(self, n_instances):
        # e-BH on X / u, BH on u / X, and rounding every X_i to its own level
        for K, X, alpha, seed in gen_instances(n_instances, seed=6):
            u = gen_uniforms(1, seed)[0]
            res = u_ebh(X, alpha, u)
            assert u_ebh_rounding_view(X, alpha, u).rejected == res.rejected
            if np.all(X > 0):
                assert bh(u / X, alpha).rejected == res.rejected

    def test_rejections_respect_evalue_order(self):
        for K, X, alpha, seed in gen_instances(100, seed=7):
            res = u_ebh(X, alpha, gen_uniforms(1, seed)[0])
            rej = res.rejected
            kept = [i for i in range(K) if i not in rej]
            threshold = res.discoveries.threshold
            assert np.all(X[kept] < threshold * (1 + 1e-12))
            if rej:
                assert X[list(rej)].min() >= threshold * (1 - 1e-12)
                assert X[list(rej)].min() >= X[kept].max(initial=-1)

    def test_j_ebh_example(self):
        assert j_ebh((3, 0.5), 0.5, (0.6, 0.9)).rejected == {0}
        assert j_ebh((0, 0), 0.5, (0.3, 0.2)).rejected == set()
        X = gen_evalues(20, seed=1)
        assert j_ebh(X, 0.2, np.ones(20)).rejected == ebh(X, 0.2).rejected


class TestPValueBoost:
    @pytest.mark.parametrize("x, p, expected", [(1.2, 0.3, 2.0), (1.2, 0.8, 0.0), (5.0, 0.99, 5.0), (1.2, 0.0, 2.0)],
                             ids=["boosted", "dropped", "clears", "zero-p"])
    def test_combine(self, x, p, expected):
        assert combine_e_and_p(x, p, 0.5) == expected

    def test_pe_ebh(self):
        assert pe_ebh((5, 1.2), (0.9, 0.3), 0.5).rejected == {0, 1}
        assert pe_ebh((5, 1.2), (0.9, 0.8), 0.5).rejected == {0}
        with pytest.raises(ValueError):
            pe_ebh((5, 1.2), (0.9, ), 0.5)

    def test_zero_evalue_is_not_boosted(self):
        assert combine_e_and_p(0.0, 0.0, 0.5) == 0.0
        res = pe_ebh((5, 0), (0.9, 0.0), 0.5)
        assert res.rejected == {0}
        assert res.rounded_values[1] == 0.0


class TestBh:
    @pytest.mark.parametrize("P, expected", [((0.2, 1.2), {0}), ((0.6, 0.7), set()), ((0, 0, 0), {0, 1, 2})],
                             ids=["example", "none", "all-zero"])
    def test_examples(self, P, expected):
        assert bh(P, 0.5).rejected == expected

    def test_step_up_skips_gaps(self):
        # the second p-value misses its threshold but the third clears its own
        assert bh((0.01, 0.4, 0.45), 0.5).rejected == {0, 1, 2}


class TestDominance:
    """Every randomized variant rejects what e-BH rejects on the same draws."""

    @staticmethod
    def check_supersets(instances):
        for K, X, alpha, inst_seed in instances:
            base = ebh(X, alpha)
            u_vec = gen_uniforms(K, inst_seed)
            u_adapt = gen_uniforms(K, inst_seed + 1)
            r1 = r1_ebh(X, alpha, u_vec)
            assert_superset(r1, base, "r1")
            assert_superset(r2_ebh(X, alpha, u_adapt), base, "r2")
            rboth = rboth_ebh(X, alpha, u_vec, u_adapt)
            assert_superset(rboth, r1, "rboth vs r1")
            assert_superset(u_ebh(X, alpha, u_vec[0]), base, "u")
            assert_superset(j_ebh(X, alpha, u_vec), base, "j")
            assert_superset(pe_ebh(X, gen_pvalues(K, inst_seed), alpha), base, "pe")

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_supersets(self, seed):
        self.check_supersets(gen_instances(150, seed=seed))

    @pytest.mark.benchmark
    def test_supersets_full(self):
        self.check_supersets(gen_instances(10_000, seed=10))


class TestDerandomized:
    def test_far_from_levels(self):
        res = derandomized_ebh((9, 5, 1, 1), 0.5, UniformSource(3), 200)
        assert res.rejected == {0, 1}

    def test_grid_members_unchanged(self):
        X = (8, 4, 8 / 3, 0)
        assert derandomized_ebh(X, 0.5, UniformSource(4), 3).rejected == ebh(X, 0.5).rejected

    def test_invalid_runs(self, source):
        with pytest.raises(ValueError):
            derandomized_ebh((1, 2), 0.5, source, 0)

    @pytest.mark.benchmark
    def test_converges_to_ebh(self):
        def boundary_free(X, K, alpha, margin=0.1):
            levels = np.concatenate(([0.0], np.sort(K / (alpha * np.arange(1, K + 1)))))
            for x in X[X < levels[-1]]:
                j = np.searchsorted(levels, x, side="right")
                lo, hi = levels[j - 1], levels[j]
                if min(x - lo, hi - x) < margin * (hi - lo):
                    return False
            return True

        checked = 0
        for K, X, alpha, seed in gen_instances(2000, sizes=(2, 5, 20), seed=12):
            if not boundary_free(X, K, alpha):
                continue
            assert derandomized_ebh(X, alpha, UniformSource(seed), 10_000).rejected == ebh(X, alpha).rejected
            checked += 1
            if checked == 100:
                break
        assert checked == 100
