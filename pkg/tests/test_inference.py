import math

import numpy as np
import pytest

from mefit.data import Dataset, NumericColumn
from mefit.datagen import FactorialSpec, generate
from mefit.design import build_design
from mefit.fit import FitResult, fit_ols
from mefit.formula import parse
from mefit.inference import InferenceError, f_test, lr_test, sequential_anova
from mefit.maineffect import test_main_effect as main_effect

from helpers import random_factorial


def fake_fit(rss, df_residual, rank=1, saturated=False):
    n = df_residual + rank
    z = np.zeros(n)
    return FitResult(np.zeros(rank), np.zeros(rank, bool), ("x",) * rank, rss, rank, n, z, z, saturated)


def residual_maker(X):
    return np.eye(X.shape[0]) - X @ np.linalg.pinv(X)


class TestFTest:
    def test_reference_row(self):
        r = f_test(fake_fit(0.24372, 25, rank=5), fake_fit(0.23543, 24, rank=6))
        assert r.kind == "F"
        assert (r.df_num, r.df_den) == (1, 24)
        assert r.statistic == pytest.approx(0.8452, abs=5e-4)
        assert r.p_value == pytest.approx(0.3671, abs=5e-4)
        assert r.details["ss_diff"] == pytest.approx(0.00829, abs=1e-12)

    def test_equal_rss(self):
        r = f_test(fake_fit(1.5, 10, rank=2), fake_fit(1.5, 9, rank=3))
        assert r.statistic == 0.0
        assert r.p_value == 1.0

    def test_monte_carlo(self, rng):
        n = 12
        X1 = np.column_stack([np.ones(n), rng.normal(size=n), rng.normal(size=n)])
        X0 = X1[:, :2]
        y = X0 @ np.array([1.0, 0.5]) + rng.normal(size=n)
        result = f_test(fit_ols(X0, y), fit_ols(X1, y))

        # the F statistic is pivotal under the null; simulate it with projections
        draws = 200_000
        Y = rng.normal(size=(draws, n))
        M0, M1 = residual_maker(X0), residual_maker(X1)
        rss0 = np.einsum("ij,jk,ik->i", Y, M0, Y)
        rss1 = np.einsum("ij,jk,ik->i", Y, M1, Y)
        F = (rss0 - rss1) / (rss1 / (n - 3))
        p_hat = float(np.mean(F > result.statistic))
        se = math.sqrt(p_hat * (1 - p_hat) / draws)
        assert abs(p_hat - result.p_value) < 3 * se

    def test_saturated_full_model(self):
        r = f_test(fake_fit(2.0, 1, rank=5), fake_fit(0.0, 0, rank=6, saturated=True))
        assert "saturated" in r.flags
        assert math.isnan(r.statistic) and math.isnan(r.p_value)
        assert r.details["ss_diff"] == 2.0
        assert not r.defined

    def test_same_df_rejected(self):
        with pytest.raises(InferenceError, match="same residual df"):
            f_test(fake_fit(1.0, 5), fake_fit(0.5, 5))

    def test_swapped_rejected(self):
        with pytest.raises(InferenceError, match="swapped"):
            f_test(fake_fit(0.5, 4, rank=2), fake_fit(1.0, 5, rank=1))

    def test_not_nested_rejected(self):
        with pytest.raises(InferenceError, match="not nested"):
            f_test(fake_fit(1.0, 5, rank=2), fake_fit(2.0, 4, rank=3))

    def test_tiny_negative_clamped(self):
        r = f_test(fake_fit(1.0, 5, rank=2), fake_fit(1.0 + 1e-12, 4, rank=3))
        assert r.statistic == 0.0 and "clamped" in r.flags


class TestLrTest:
    def test_reference_p_value_from_statistic(self):
        r = lr_test(0.0, 48, 0.0333, 49)
        assert r.statistic == pytest.approx(0.0666, abs=1e-12)
        assert r.p_value == pytest.approx(0.7963, abs=5e-4)
        assert r.df_num == 1

    def test_equal_loglik(self):
        r = lr_test(-10.0, 3, -10.0, 5)
        assert r.statistic == 0.0 and r.p_value == 1.0 and r.df_num == 2

    def test_classical_quantile(self):
        r = lr_test(0.0, 1, 3.841459 / 2, 2)
        # independent: 2 (1 - Phi(sqrt x)) through erfc of the standard library
        assert r.p_value == pytest.approx(math.erfc(math.sqrt(3.841459 / 2)), abs=1e-12)
        assert r.p_value == pytest.approx(0.05, abs=1e-4)

    def test_clamp_and_errors(self):
        r = lr_test(5.0, 1, 5.0 - 1e-10, 2)
        assert r.statistic == 0.0 and "clamped" in r.flags
        with pytest.raises(InferenceError, match="not nested"):
            lr_test(5.0, 1, 4.0, 2)
        with pytest.raises(InferenceError, match="more parameters"):
            lr_test(5.0, 2, 6.0, 2)


class TestSequentialAnova:
    def test_noiseless_x_row_zero(self, noiseless_data):
        table = sequential_anova(parse("Response ~ X*Y"), noiseless_data)
        assert [r.term for r in table.rows] == ["X", "Y", "X:Y"]
        assert [r.df for r in table.rows] == [1, 2, 2]
        assert table.df_residual == 24
        assert table.row("X").sum_sq == pytest.approx(0.0, abs=1e-20)

    def test_noiseless_rows_match_chain_of_hand_built_fits(self, noiseless_data):
        y = noiseless_data.numeric("Response")
        xc = noiseless_data["X"].codes
        yc = noiseless_data["Y"].codes
        one = np.ones((30, 1))
        xd = np.eye(2)[xc][:, 1:]
        yd = np.eye(3)[yc][:, 1:]
        cells = np.eye(6)[xc + 2 * yc]

        def rss(X):
            beta, *_ = np.linalg.lstsq(X, y, rcond=None)
            r = y - X @ beta
            return float(r @ r)

        chain = [rss(one), rss(np.hstack([one, xd])), rss(np.hstack([one, xd, yd])), rss(cells)]
        table = sequential_anova("Response ~ X*Y", noiseless_data)
        got = [r.sum_sq for r in table.rows]
        want = [chain[0] - chain[1], chain[1] - chain[2], chain[2] - chain[3]]
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-10)

    def test_constant_response(self, demo_data):
        ds = Dataset({"X": demo_data["X"], "Y": demo_data["Y"], "C": NumericColumn(np.full(30, 4.0))})
        table = sequential_anova("C ~ X*Y", ds)
        for r in table.rows:
            assert r.sum_sq == pytest.approx(0.0, abs=1e-20)
            assert math.isnan(r.f_value)
        assert table.rss == pytest.approx(0.0, abs=1e-20)

    @pytest.mark.parametrize("unbalanced", [False, True])
    def test_type_one_decomposition(self, rng, unbalanced):
        for _ in range(10):
            ds = random_factorial(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)),
                                  reps=3, unbalanced=unbalanced)
            table = sequential_anova("R ~ X*Y", ds)
            y = ds.numeric("R")
            total = float(((y - y.mean()) ** 2).sum())
            assert table.total_ss == pytest.approx(total, rel=1e-12)
            assert sum(r.sum_sq for r in table.rows) + table.rss == pytest.approx(total, rel=1e-8)

    def test_balanced_matches_main_effect_test(self, demo_data):
        table = sequential_anova("Response ~ X*Y", demo_data)
        t = main_effect(demo_data, "Response", "X", "Y")
        assert table.row("X").f_value == pytest.approx(t.result.statistic, rel=1e-6)
        assert table.row("X").p_value == pytest.approx(t.result.p_value, rel=1e-6)

    def test_unbalanced_generally_differs(self, demo_data):
        ds = demo_data.take(np.r_[0:26])
        table = sequential_anova("Response ~ X*Y", ds)
        t = main_effect(ds, "Response", "X", "Y")
        assert table.row("X").f_value != pytest.approx(t.result.statistic, rel=1e-3)

    def test_numeric_terms(self, rng):
        x = rng.normal(size=20)
        z = rng.normal(size=20)
        ds = Dataset({"x": NumericColumn(x), "z": NumericColumn(z),
                      "y": NumericColumn(1 + x + rng.normal(size=20))})
        table = sequential_anova("y ~ x*z", ds)
        assert [r.df for r in table.rows] == [1, 1, 1]
        assert table.df_residual == 16

    def test_uses_full_design_coding(self, demo_data):
        # X:Y without the Y margin: still a 6-cell model
        table = sequential_anova("Response ~ X + X:Y", demo_data)
        assert [r.df for r in table.rows] == [1, 4]
        full = fit_ols(build_design(parse("Response ~ X*Y"), demo_data), demo_data.numeric("Response"))
        assert table.rss == pytest.approx(full.rss, rel=1e-10)

    def test_requires_terms(self, demo_data):
        with pytest.raises(InferenceError):
            sequential_anova("Response ~ 1", demo_data)


def test_generated_demo_design_has_expected_shape():
    ds = generate(FactorialSpec(((1, 5, 3), (4, 2, 3)), repetitions=5, noise_sd=0.1, seed=7))
    table = sequential_anova("Response ~ X*Y", ds)
    assert table.df_residual == 24
