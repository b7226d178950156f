import warnings

import numpy as np
import pytest

from mefit.data import Dataset, NumericColumn
from mefit.datagen import FactorialSpec, generate
from mefit.design import build_design
from mefit.fit import fit_ols
from mefit.formula import Term, parse, render
from mefit.maineffect import MainEffectError, full_formula, reduced_formula
from mefit.maineffect import test_main_effect as main_effect

from helpers import random_factorial


def term_sets(f):
    return {frozenset(t.variables) for t in f.terms}


def rss_of(X, y):
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    r = y - X @ beta
    return float(r @ r)


class TestReducedFormula:
    def test_numeric_y(self, rng):
        ds = random_factorial(rng, 2, 3, y_numeric=True)
        f, augmented, generated = reduced_formula("R", "X", "Y", ds)
        assert term_sets(f) == {frozenset({"Y"}), frozenset({"X", "Y"})}
        assert f.intercept
        assert augmented is ds and generated == []

    def test_three_level_factor(self, demo_data):
        f, augmented, generated = reduced_formula("Response", "X", "Y", demo_data)
        assert generated == ["Y1", "Y2"]
        assert term_sets(f) == {frozenset({"Y1"}), frozenset({"Y2"}),
                                frozenset({"X", "Y1"}), frozenset({"X", "Y2"})}
        assert render(f) == "Response ~ Y1 + Y2 + X:Y1 + X:Y2"
        assert augmented.numeric("Y1").tolist()[:6] == [1, 1, 0, 0, -1, -1]

    def test_two_level_factor(self, rng):
        ds = random_factorial(rng, 3, 2)
        f, _, generated = reduced_formula("R", "X", "Y", ds)
        assert generated == ["Y1"]
        assert term_sets(f) == {frozenset({"Y1"}), frozenset({"X", "Y1"})}

    def test_full_formula(self):
        f = full_formula("R", "X", "Y")
        assert f.terms == (Term(("X",)), Term(("Y",)), Term(("X", "Y")))

    def test_treatment_rejected_for_factor_y(self, demo_data):
        with pytest.raises(MainEffectError, match="does not sum to zero"):
            reduced_formula("Response", "X", "Y", demo_data, "treatment")

    def test_treatment_allowed_for_numeric_y(self, rng):
        ds = random_factorial(rng, 2, 3, y_numeric=True)
        f, _, _ = reduced_formula("R", "X", "Y", ds, "treatment")
        assert term_sets(f) == {frozenset({"Y"}), frozenset({"X", "Y"})}

    def test_same_variable_rejected(self, demo_data):
        with pytest.raises(MainEffectError, match="must differ"):
            reduced_formula("Response", "X", "X", demo_data)

    def test_missing_variable(self, demo_data):
        with pytest.raises(MainEffectError, match="'Z' is not a column"):
            reduced_formula("Response", "X", "Z", demo_data)

    def test_response_as_predictor(self, demo_data):
        with pytest.raises(MainEffectError, match="response"):
            reduced_formula("Response", "Response", "Y", demo_data)

    def test_factor_response_rejected(self, demo_data):
        with pytest.raises(MainEffectError, match="must be numeric"):
            reduced_formula("X", "Response", "Y", demo_data)

    def test_generated_name_collision(self, demo_data):
        ds = demo_data.with_columns({"Y1": NumericColumn(np.zeros(30))})
        with pytest.raises(MainEffectError, match="Y1"):
            reduced_formula("Response", "X", "Y", ds)


class TestDfAccounting:
    @pytest.mark.parametrize("x_levels", [2, 3, 4])
    @pytest.mark.parametrize("y_kind", ["numeric", 2, 3, 4])
    def test_factor_x(self, rng, x_levels, y_kind):
        numeric = y_kind == "numeric"
        ds = random_factorial(rng, x_levels, 3 if numeric else y_kind, y_numeric=numeric)
        t = main_effect(ds, "R", "X", "Y")
        assert t.result.df_num == x_levels - 1
        assert t.full_fit.rank - t.reduced_fit.rank == x_levels - 1
        assert t.result.df_den == ds.n_rows - t.full_fit.rank
        assert not any("unexpected" in n for n in t.notes)

    @pytest.mark.parametrize("y_kind", ["numeric", 2, 3, 4])
    def test_numeric_x(self, rng, y_kind):
        numeric = y_kind == "numeric"
        ds = random_factorial(rng, 3, 3 if numeric else y_kind, x_numeric=True, y_numeric=numeric)
        t = main_effect(ds, "R", "X", "Y")
        assert t.result.df_num == 1

    def test_numeric_both(self, rng):
        ds = random_factorial(rng, 3, 3, x_numeric=True, y_numeric=True)
        t = main_effect(ds, "R", "X", "Y")
        assert render(t.reduced_formula) == "R ~ Y + X:Y"
        assert t.generated_columns == ()
        assert (t.full_fit.rank, t.reduced_fit.rank) == (4, 3)


class TestProperties:
    @pytest.mark.parametrize("unbalanced", [False, True])
    def test_contrast_invariance(self, rng, unbalanced):
        for _ in range(10):
            ds = random_factorial(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)),
                                  unbalanced=unbalanced)
            a = main_effect(ds, "R", "X", "Y", "sum").result.statistic
            b = main_effect(ds, "R", "X", "Y", "helmert").result.statistic
            assert b == pytest.approx(a, rel=1e-8)

    def test_nesting(self, rng):
        for _ in range(20):
            ds = random_factorial(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)),
                                  unbalanced=bool(rng.integers(2)), y_numeric=bool(rng.integers(2)))
            t = main_effect(ds, "R", "X", "Y")
            assert t.reduced_fit.rss >= t.full_fit.rss * (1 - 1e-12)

    def test_factor_y_without_conversion_is_the_full_model(self, demo_data):
        y = demo_data.numeric("Response")
        full = fit_ols(build_design(parse("Response ~ X*Y"), demo_data), y)
        naive = fit_ols(build_design(parse("Response ~ Y + X:Y"), demo_data), y)
        t = main_effect(demo_data, "Response", "X", "Y")
        assert naive.rss == pytest.approx(full.rss, rel=1e-10)
        assert t.reduced_fit.rank == full.rank - 1
        assert t.reduced_fit.rss > full.rss

    def test_symmetric_direction(self, demo_data):
        t = main_effect(demo_data, "Response", "Y", "X")
        assert t.result.df_num == 2
        assert t.generated_columns == ("X1",)


class TestKnownAnswers:
    def test_demo_design_df(self, demo_data):
        t = main_effect(demo_data, "Response", "X", "Y")
        assert (t.result.df_num, t.result.df_den) == (1, 24)
        assert t.balanced and t.notes == ()

    def test_noiseless_equal_row_means(self, noiseless_data):
        t = main_effect(noiseless_data, "Response", "X", "Y")
        assert t.result.details["ss_diff"] == pytest.approx(0.0, abs=1e-20)
        assert t.saturated
        assert any("fits exactly" in n for n in t.notes)

    def test_pure_x_effect_matches_hand_built_fits(self):
        ds = generate(FactorialSpec(((1, 1, 1), (2, 2, 2)), repetitions=5, noise_sd=0.0))
        y = ds.numeric("Response")
        xs = np.array([1.0, -1.0])[ds["X"].codes]
        s = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])[ds["Y"].codes]
        reduced = np.column_stack([np.ones(30), s, xs[:, None] * s])
        cells = np.eye(6)[ds["X"].codes + 2 * ds["Y"].codes]
        oracle = rss_of(reduced, y) - rss_of(cells, y)

        t = main_effect(ds, "Response", "X", "Y")
        assert t.result.details["ss_diff"] == pytest.approx(oracle, rel=1e-10)
        # balanced: the sum-coded X column is orthogonal to the reduced model
        assert oracle == pytest.approx(30 * 0.5**2, rel=1e-10)


class TestDiagnostics:
    def test_empty_cell_warns(self, rng):
        ds = random_factorial(rng, 3, 3)
        keep = np.flatnonzero((ds["X"].codes != 0) | (ds["Y"].codes != 0))
        with pytest.warns(RuntimeWarning, match="empty cells"):
            t = main_effect(ds.take(keep), "R", "X", "Y")
        assert any("x1:y1" in n for n in t.notes)
        assert t.full_fit.aliased.any()

    def test_empty_cell_not_estimable(self, demo_data):
        keep = np.flatnonzero((demo_data["X"].codes != 0) | (demo_data["Y"].codes != 0))
        with pytest.warns(RuntimeWarning), pytest.raises(MainEffectError, match="not estimable"):
            main_effect(demo_data.take(keep), "Response", "X", "Y")

    def test_unbalanced_note(self, demo_data):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            t = main_effect(demo_data.take(np.r_[0:27]), "Response", "X", "Y")
        assert not t.balanced
        assert any("unweighted average" in n for n in t.notes)

    def test_empty_dataset(self, demo_data):
        with pytest.raises(MainEffectError, match="no rows"):
            main_effect(demo_data.take([]), "Response", "X", "Y")


class TestReporting:
    def test_methods_summary_factor(self, demo_data):
        text = main_effect(demo_data, "Response", "X", "Y").methods_summary()
        assert text.startswith(
            "We tested for a main effect of X by converting Y to a sum-coding numeric "
            "representation and conducting a nested model comparison"
        )
        assert "F(1, 24) = " in text

    def test_methods_summary_helmert_and_numeric(self, rng, demo_data):
        assert "Helmert-coding" in main_effect(demo_data, "Response", "X", "Y", "helmert").methods_summary()
        ds = random_factorial(rng, 2, 3, y_numeric=True)
        text = main_effect(ds, "R", "X", "Y").methods_summary()
        assert text.startswith("We tested for a main effect of X conducting")

    def test_methods_summary_saturated(self, noiseless_data):
        text = main_effect(noiseless_data, "Response", "X", "Y").methods_summary()
        assert "fits the data exactly" in text

    def test_to_dict(self, demo_data):
        d = main_effect(demo_data, "Response", "X", "Y").to_dict()
        assert d["reduced_formula"] == "Response ~ Y1 + Y2 + X:Y1 + X:Y2"
        assert d["comparison"]["df_num"] == 1
        assert d["full"]["df_residual"] == 24
        assert d["generated_columns"] == ["Y1", "Y2"]


def test_response_named_differently():
    ds = generate(FactorialSpec(((0, 1), (1, 0)), repetitions=4, seed=3), response="score")
    t = main_effect(Dataset(dict(ds)), "score", "X", "Y")
    assert t.response == "score"
