import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signrank.distributions import make_density
from signrank.errors import DataError
from signrank.nonserial import (
    RegressionDesign,
    conditional_mean,
    exact_moments,
    location_statistic,
    median_regression_central_sequence,
    nonserial_statistic,
    nonserial_statistic_batch,
    nonserial_test_statistic,
    pseudo_uniform_ranks,
    standardize_unconditional,
    unconditional_std,
)
from signrank.scores import BUILTIN_NAMES, ScoreTable, build_score_table, builtin_scores, score_function
from signrank.signs_ranks import decompose, enumerate_null_invariant
from signrank.testing import two_sided_pvalues

from .oracles import enumerated_moments, linear_approx_score
from .transforms import random_zero_fixing_map

LINEAR = score_function("u", lambda u: u)
CONST = score_function("const", lambda u: 0 * u + 3.0)


def test_hand_example():
    t = build_score_table(2, LINEAR, "approx")
    assert nonserial_statistic([-1.0, 2.0], RegressionDesign([0.0, 1.0]), t) == pytest.approx(0.375)


def test_constant_scores(rng):
    c = rng.normal(size=9)
    t = build_score_table(9, CONST, "approx")
    s = nonserial_statistic(rng.standard_normal(9), RegressionDesign(c), t)
    assert s == pytest.approx(c.mean() * 3.0)
    mean, var = exact_moments(RegressionDesign(c), t)
    assert mean == pytest.approx(c.mean() * 3.0)
    assert var == pytest.approx(0.0, abs=1e-15)


def test_sign_flip_negates(rng):
    n = 11
    c = rng.normal(size=n)
    c -= c.mean()
    t = build_score_table(n, builtin_scores("vdw"), "approx")
    z = rng.standard_normal(n)
    D = RegressionDesign(c)
    assert nonserial_statistic(-z, D, t) == pytest.approx(-nonserial_statistic(z, D, t), abs=1e-14)


def test_length_mismatch():
    t = build_score_table(3, LINEAR)
    with pytest.raises(DataError):
        nonserial_statistic([1.0, -2.0, 3.0], RegressionDesign([1.0, 2.0]), t)


def test_batch_matches_single(rng):
    z = rng.standard_normal((6, 10))
    D = RegressionDesign.linear_trend(10)
    t = ScoreTable(10, builtin_scores("wilcoxon-psi"))
    assert np.allclose(nonserial_statistic_batch(z, D, t), [nonserial_statistic(r, D, t) for r in z])


@pytest.mark.parametrize("n", range(2, 7))
def test_moments_exact_rational_oracle(n):
    c = [Fraction(i * i - 2) for i in range(1, n + 1)]
    mean_q, var_q = enumerated_moments(n, c, lambda v, r: linear_approx_score(v, n, r))
    mean, var = exact_moments(RegressionDesign([float(x) for x in c]), build_score_table(n, LINEAR, "approx"))
    assert abs(mean - float(mean_q)) < 1e-13
    assert abs(var - float(var_q)) < 1e-13


@pytest.mark.parametrize("flavor", ["approx", "exact"])
def test_moments_vdw_enumeration(flavor):
    n = 5
    t = build_score_table(n, builtin_scores("vdw"), flavor)
    c = [1.0, 2.0, 3.0, 5.0, 8.0]
    mean_e, var_e = enumerated_moments(n, c, lambda v, r: float(t.scores(v)[r - 1]))
    mean, var = exact_moments(RegressionDesign(c), t)
    assert mean == pytest.approx(mean_e, abs=1e-12)
    assert var == pytest.approx(var_e, abs=1e-12)


def test_n3_worked_case():
    t = build_score_table(3, LINEAR, "approx")
    mean_q, var_q = enumerated_moments(3, [1, 2, 3], lambda v, r: linear_approx_score(v, 3, r))
    mean, var = exact_moments(RegressionDesign([1, 2, 3]), t)
    assert (mean, var) == (pytest.approx(float(mean_q), abs=1e-15), pytest.approx(float(var_q), abs=1e-15))


def test_equal_constants_leave_only_sign_count_variance():
    # with every c_i equal the within-configuration term vanishes, but the mean
    # score still moves with N-, so the variance is c^2 Var(mean score)
    n = 6
    t = build_score_table(n, LINEAR, "approx")
    mean_q, var_q = enumerated_moments(n, [2] * n, lambda v, r: linear_approx_score(v, n, r))
    _, var = exact_moments(RegressionDesign.constant(n, 2.0), t)
    assert var == pytest.approx(float(var_q), abs=1e-14)
    assert var > 0
    _, var0 = exact_moments(RegressionDesign.constant(n, 0.0), t)
    assert var0 == 0.0


def test_n1_variance_warns():
    t = build_score_table(1, LINEAR)
    with pytest.warns(UserWarning):
        _, var = exact_moments(RegressionDesign([1.0]), t)
    # only the sign-count term survives: the lone score is 1/4 or 3/4
    assert var == pytest.approx(1 / 16, abs=1e-15)


def test_conditional_mean_identity(rng):
    n = 5
    t = build_score_table(n, builtin_scores("wilcoxon-psi"))
    c = rng.normal(size=n)
    D = RegressionDesign(c)
    by_count: dict[int, list] = {}
    for d, p in enumerate_null_invariant(n):
        by_count.setdefault(d.n_minus, []).append((p, nonserial_statistic(d, D, t)))
    for v, items in by_count.items():
        total = sum(float(p) for p, _ in items)
        cond = sum(float(p) * s for p, s in items) / total
        assert cond == pytest.approx(float(conditional_mean(v, D, t)), abs=1e-13)


class TestStandardization:
    def test_skew_symmetric_centered_design(self):
        n = 20
        c = np.arange(n) - (n - 1) / 2
        t = ScoreTable(n, builtin_scores("vdw"))
        D = RegressionDesign(c)
        assert unconditional_std(D, t) == pytest.approx(math.sqrt(D.ssq_centered / n), rel=1e-9)

    def test_degenerate_design_location_denominator(self):
        t = ScoreTable(10, builtin_scores("wilcoxon-phi"))
        assert unconditional_std(RegressionDesign.constant(10), t) == pytest.approx(0.5)

    def test_zero_denominator(self):
        t = ScoreTable(10, CONST)
        with pytest.raises(DataError):
            standardize_unconditional(3.0, RegressionDesign.constant(10), t)

    def test_result_fields(self, rng):
        t = ScoreTable(30, builtin_scores("vdw"))
        D = RegressionDesign.linear_trend(30)
        r = nonserial_test_statistic(rng.standard_normal(30), D, t)
        assert r.uncond_std > 0 and r.exact_var > 0
        assert r.z == pytest.approx(math.sqrt(30) * (r.value - r.exact_mean) / r.uncond_std)

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_size_calibration(self, name):
        n, M = 250, 2000
        rng = np.random.default_rng(12345)
        z = make_density("cauchy-normal").sample(rng, M * n).reshape(M, n)
        t = ScoreTable(n, builtin_scores(name))
        D = RegressionDesign.linear_trend(n)
        zz = standardize_unconditional(nonserial_statistic_batch(z, D, t), D, t)
        rate = np.mean(two_sided_pvalues(zz) < 0.05)
        assert abs(rate - 0.05) <= 0.015


class TestLocation:
    def test_balanced_signs_zero(self):
        t = ScoreTable(8, builtin_scores("wilcoxon-phi"))
        z = np.array([-3.0, -1.0, -2.0, -0.5, 0.4, 1.0, 2.5, 7.0])
        assert location_statistic(z, t) == pytest.approx(0.0, abs=1e-12)

    def test_no_sign_information(self):
        sym = score_function("sym", lambda u: (u - 0.5) ** 2)
        with pytest.raises(DataError):
            location_statistic(np.array([1.0, -2.0, 3.0]), ScoreTable(3, sym))

    def test_all_positive_uses_plus_branch(self):
        t = ScoreTable(4, LINEAR)
        D = RegressionDesign.constant(4)
        s = nonserial_statistic([1.0, 2.0, 3.0, 4.0], D, t)
        assert s == pytest.approx(np.mean(t.plus(4)))

    def test_null_distribution(self):
        n, M = 250, 2000
        rng = np.random.default_rng(99)
        z = rng.standard_normal((M, n))
        zz = location_statistic(z, ScoreTable(n, builtin_scores("wilcoxon-phi")))
        rate = np.mean(two_sided_pvalues(zz) < 0.05)
        assert abs(rate - 0.05) <= 0.015


class TestPseudoUniform:
    def test_example(self):
        u = pseudo_uniform_ranks(decompose([-1.0, 2.0, -0.5]))
        assert np.allclose(u, [1 / 6, 3 / 4, 2 / 6])

    def test_single_positive(self):
        assert pseudo_uniform_ranks(decompose([5.0])).tolist() == [0.75]

    @given(st.lists(st.floats(-100, 100).filter(lambda x: x != 0), min_size=1, max_size=30, unique=True))
    def test_halves_match_signs(self, z):
        d = decompose(z)
        u = pseudo_uniform_ranks(d)
        assert np.all((u > 0) & (u < 1))
        assert np.array_equal(u < 0.5, d.signs == -1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_invariance_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 40))
    z = rng.standard_normal(n)
    g = random_zero_fixing_map(rng)
    t = ScoreTable(n, builtin_scores("hybrid-l/vdw-psi"))
    D = RegressionDesign(rng.normal(size=n))
    assert nonserial_statistic(g(z), D, t) == nonserial_statistic(z, D, t)


class TestCentralSequence:
    def test_balanced_signs(self):
        f = make_density("hybrid-laplace-normal")
        z = np.array([-1.0, 2.0, -0.3, 0.5])
        d1, _ = median_regression_central_sequence(z, RegressionDesign.linear_trend(4), f)
        assert d1 == 0.0

    def test_centered_design(self, rng):
        f = make_density("hybrid-laplace-normal")
        z = rng.standard_normal(12)
        c = rng.normal(size=12)
        c -= c.mean()
        _, d2 = median_regression_central_sequence(z, RegressionDesign(c), f, "oracle")
        expect = math.sqrt(12) * np.dot(c, f.location_score(z)) / 12
        assert d2 == pytest.approx(expect, abs=1e-12)

    def test_flavors_converge(self):
        f = make_density("hybrid-laplace-normal")
        rng = np.random.default_rng(5)
        rms = []
        for n in (50, 250):
            D = RegressionDesign.linear_trend(n)
            diffs = []
            for _ in range(500):
                z = f.sample(rng, n)
                a = median_regression_central_sequence(z, D, f, "oracle")
                b = median_regression_central_sequence(z, D, f, "sign-and-rank-approx")
                diffs.append(a[1] - b[1])
            rms.append(np.sqrt(np.mean(np.square(diffs))))
        assert rms[1] < rms[0]

    def test_bad_flavor(self):
        with pytest.raises(ValueError):
            median_regression_central_sequence([1.0, -1.0], RegressionDesign([1, 2]), make_density("normal"), "x")


def test_noether_ratio():
    assert math.isnan(RegressionDesign.constant(4).noether_ratio)
    assert RegressionDesign([0, 0, 0, 1]).noether_ratio == pytest.approx(0.75)
