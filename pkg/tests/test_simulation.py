import numpy as np
import pytest

from signrank.distributions import make_density, parse_density
from signrank.simulation import (
    DEFAULT_THETA_GRID,
    STATISTICS,
    MA1Config,
    PowerCurve,
    ma1_from_innovations,
    ma1_residuals,
    null_z_scores,
    plot_power_curves,
    power_study,
    read_power_csv,
    simulate_ma1,
    stream,
    write_power_csv,
)


def test_theta_grid():
    assert len(DEFAULT_THETA_GRID) == 13
    assert sorted(DEFAULT_THETA_GRID) == list(DEFAULT_THETA_GRID)
    assert np.allclose(DEFAULT_THETA_GRID, -np.array(DEFAULT_THETA_GRID[::-1]))


class TestMA1:
    def test_hand_recursion(self):
        assert ma1_from_innovations([1.0, 2.0, 3.0], 0.5).tolist() == [1.0, 2.5, 4.0]

    def test_theta_zero(self, rng):
        eps = rng.standard_normal(20)
        assert np.array_equal(ma1_from_innovations(eps, 0.0), eps)
        assert np.array_equal(ma1_residuals(eps, 0.0), eps)

    def test_residual_hand_case(self):
        assert np.allclose(ma1_residuals([1.0, 0.5], 0.5), [1.0, 0.0], atol=1e-15)

    def test_round_trip(self, rng):
        eps = rng.standard_normal((4, 300))
        for theta in (-0.9, -0.3, 0.25, 0.8):
            assert np.allclose(ma1_residuals(ma1_from_innovations(eps, theta), theta), eps, atol=1e-12)

    def test_residual_recursion_replay(self, rng):
        y = rng.standard_normal(30)
        z, prev = [], 0.0
        for v in y:
            prev = v - 0.4 * prev
            z.append(prev)
        assert np.allclose(ma1_residuals(y, 0.4), z, atol=1e-14)

    def test_lag_one_autocorrelation(self):
        # one series of this length has standard error near 0.01, so average 20
        cfg = MA1Config(0.3, 10_000, make_density("normal"))
        rng = np.random.default_rng(8)
        r1 = []
        for _ in range(20):
            c = simulate_ma1(cfg, rng)
            c = c - c.mean()
            r1.append(np.sum(c[1:] * c[:-1]) / np.sum(c * c))
        assert abs(np.mean(r1) - 0.3 / 1.09) < 0.02

    @pytest.mark.parametrize("theta,n", [(1.0, 50), (-1.2, 50), (0.2, 7)])
    def test_config_validation(self, theta, n):
        with pytest.raises(ValueError):
            MA1Config(theta, n, make_density("normal"))

    def test_residuals_reject_unit_root(self):
        with pytest.raises(ValueError):
            ma1_residuals([1.0, 2.0], 1.0)


class TestStreams:
    def test_distinct_keys(self):
        a = stream(7, -0.05, 0).random(4)
        assert not np.array_equal(a, stream(7, 0.05, 0).random(4))
        assert not np.array_equal(a, stream(7, -0.05, 1).random(4))
        assert not np.array_equal(a, stream(8, -0.05, 0).random(4))
        assert np.array_equal(a, stream(7, -0.05, 0).random(4))

    def test_common_random_numbers(self):
        assert np.array_equal(stream(3, 0.1, 5, crn=True).random(3), stream(3, -0.2, 5, crn=True).random(3))

    def test_documented_derivation(self):
        ss = np.random.SeedSequence(11, spawn_key=(1, 150000, 2))
        assert np.array_equal(stream(11, -0.15, 2).random(5), np.random.default_rng(ss).random(5))


class TestPowerStudy:
    def test_reproducible_across_workers(self):
        kw = dict(stats=("ac", "lvdw"), theta_grid=(-0.1, 0.0, 0.2), n=60, reps=40, seed=5)
        one = power_study("cauchy-normal", workers=1, **kw)
        two = power_study("cauchy-normal", workers=2, **kw)
        assert write_power_csv(one) == write_power_csv(two)

    def test_crn_shares_innovations(self):
        kw = dict(stats=("vdw",), theta_grid=(0.0, 0.0), n=40, reps=30, seed=2)
        plain = power_study("normal", crn=False, **kw)[0].rejection_rate
        crn = power_study("normal", crn=True, **kw)[0].rejection_rate
        assert plain[0] == plain[1] and crn[0] == crn[1]

    def test_stderr(self):
        c = PowerCurve("ac", "x", np.array([0.0, 0.1]), np.array([0.05, 0.5]), 100, 250, 0.05)
        assert np.allclose(c.mc_stderr, np.sqrt(np.array([0.05 * 0.95, 0.25]) / 100))
        assert c.rate_at(0.1) == 0.5
        with pytest.raises(KeyError):
            c.rate_at(0.3)

    @pytest.mark.parametrize("kw", [dict(stats=("foo",)), dict(reps=0), dict(n=5), dict(alpha=1.0), dict(theta_grid=(1.0,))])
    def test_validation(self, kw):
        args = dict(stats=("ac",), theta_grid=(0.0,), n=30, reps=5)
        args.update(kw)
        with pytest.raises(ValueError):
            power_study("normal", **args)

    def test_null_rates_distribution_free(self):
        # rank-based null laws depend only on signs and ranks
        rates = {}
        for letter in "abcdef":
            curves = power_study(parse_density(letter), ("vdw", "wvdw"), (0.0,), 100, 1500, seed=9)
            rates[letter] = [c.rejection_rate[0] for c in curves]
        arr = np.array(list(rates.values()))
        se = np.sqrt(0.05 * 0.95 / 1500)
        assert np.all(np.abs(arr - 0.05) <= 3 * se + 0.005)

    def test_power_grows_away_from_null(self):
        curves = power_study(parse_density("c"), STATISTICS, (-0.3, -0.05, 0.05, 0.3), 250, 300, seed=4)
        for c in curves:
            assert c.rate_at(-0.3) > c.rate_at(-0.05)
            assert c.rate_at(0.3) > c.rate_at(0.05)

    def test_null_z_scores_unknown(self):
        with pytest.raises(ValueError):
            null_z_scores("spearman", np.arange(1.0, 20.0))


class TestOutputs:
    def _curves(self):
        return power_study("normal", ("ac", "wilcoxon"), (-0.1, 0.0), 30, 20, seed=1)

    def test_csv_round_trip(self, tmp_path):
        curves = self._curves()
        path = tmp_path / "p.csv"
        text = write_power_csv(curves, path)
        assert text.splitlines()[0] == "density,statistic,theta,rate,stderr,reps,n,alpha"
        back = read_power_csv(path)
        assert write_power_csv(back) == text

    def test_csv_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("density,theta\nx,0\n")
        with pytest.raises(ValueError):
            read_power_csv(path)

    def test_svg_deterministic(self, tmp_path):
        curves = self._curves()
        plot_power_curves(curves, tmp_path / "a.svg")
        plot_power_curves(curves, tmp_path / "b.svg")
        a = (tmp_path / "a.svg").read_bytes()
        assert a == (tmp_path / "b.svg").read_bytes()
        assert a.count(b"<path") >= 2
