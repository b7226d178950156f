"""Testing the main effect of X when X interacts with Y.

The main effect of X in a model with an X:Y interaction is the effect of X
where Y is zero. The test compares ``response ~ X*Y`` with a reduced model
that keeps Y and the X:Y interaction but drops X:

* numeric Y: ``response ~ Y + X:Y``;
* factor Y: Y is first replaced by K-1 numeric sum-to-zero contrast
  variables Y1..Y(K-1), giving ``response ~ Y1 + X:Y1 + ... + Y(K-1) + X:Y(K-1)``.
  With a factor Y, ``Y + X:Y`` would span the same columns as ``X*Y`` and
  the comparison would test nothing. Sum-to-zero coding puts the unweighted
  average over Y's levels at zero, so the test is of X averaged over Y.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .contrasts import ContrastScheme, sum_code_factor
from .data import Dataset, FactorColumn, factor_cell_means
from .design import build_design, column_span_equal, in_column_span
from .fit import FitResult, fit_ols
from .formula import Formula, Term, parse, render
from .inference import ComparisonResult, f_test

__all__ = [
    "MainEffectError",
    "MainEffectTest",
    "reduced_formula",
    "full_formula",
    "test_main_effect",
]


class MainEffectError(ValueError):
    pass


def _check_names(ds: Dataset, response: str, effect: str, across: str):
    for role, name in (("response", response), ("effect", effect), ("across", across)):
        if name not in ds:
            raise MainEffectError(f"{role} variable {name!r} is not a column (have {list(ds)})")
    if effect == across:
        raise MainEffectError("effect and across variables must differ")
    if response in (effect, across):
        raise MainEffectError("the response cannot also be a predictor")
    if ds.is_factor(response):
        raise MainEffectError(f"response {response!r} must be numeric")


def full_formula(response: str, effect: str, across: str) -> Formula:
    return parse(f"{response} ~ {effect}*{across}")


def reduced_formula(response: str, effect: str, across: str, ds: Dataset, scheme="sum"):
    """Null model with Y and the X:Y interaction but no main effect of X.

    Returns ``(formula, dataset, generated)``: the dataset has the numeric
    contrast variables for a factor Y appended, and ``generated`` lists their
    names (empty for numeric Y).
    """
    scheme = ContrastScheme.coerce(scheme)
    _check_names(ds, response, effect, across)
    col = ds[across]
    if not isinstance(col, FactorColumn):
        return parse(f"{response} ~ {across} + {effect}:{across}"), ds, []
    if not scheme.sums_to_zero:
        raise MainEffectError(
            f"{scheme.value} coding of {across!r} does not sum to zero, so {across}=0 "
            "would be a baseline level rather than the average over levels; use sum or helmert"
        )
    coded = sum_code_factor(across, col, scheme)
    try:
        augmented = ds.with_columns(coded)
    except ValueError as exc:
        raise MainEffectError(f"cannot add contrast variables for {across!r}: {exc}") from None
    terms = []
    for name in coded:
        terms += [Term((name,)), Term((effect, name))]
    return Formula(response, tuple(terms), True), augmented, list(coded)


@dataclass(frozen=True)
class MainEffectTest:
    __test__ = False  # not a pytest class

    effect: str
    across: str
    scheme: ContrastScheme
    full_formula: Formula
    reduced_formula: Formula
    generated_columns: tuple[str, ...]
    full_fit: FitResult
    reduced_fit: FitResult
    result: ComparisonResult
    balanced: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def response(self) -> str:
        return self.full_formula.response

    @property
    def saturated(self) -> bool:
        return "saturated" in self.result.flags

    def methods_summary(self) -> str:
        """Reporting paragraph for a methods section."""
        r = self.result
        if self.generated_columns:
            coding = {
                ContrastScheme.SUM: "a sum-coding",
                ContrastScheme.HELMERT: "a Helmert-coding",
            }[self.scheme]
            conversion = f" by converting {self.across} to {coding} numeric representation and"
        else:
            conversion = ""
        if r.defined:
            verdict = "evidence for" if r.p_value < 0.05 else "no evidence for"
            stats = f"F({r.df_num}, {r.df_den}) = {r.statistic:.3g}, p = {r.p_value:.3g}"
        else:
            verdict, stats = "an undefined result regarding", "the full model fits the data exactly"
        return (
            f"We tested for a main effect of {self.effect}{conversion} conducting a nested "
            f"model comparison (F test) between linear models differing only in the presence "
            f"or absence of a main effect of {self.effect}. Both models included an intercept, "
            f"a main effect of {self.across}, and an interaction between {self.effect} and "
            f"{self.across}. The comparison showed {verdict} a main effect of {self.effect} "
            f"({stats})."
        )

    def to_dict(self) -> dict:
        r = self.result
        return {
            "effect": self.effect,
            "across": self.across,
            "contrasts": self.scheme.value,
            "full_formula": render(self.full_formula),
            "reduced_formula": render(self.reduced_formula),
            "generated_columns": list(self.generated_columns),
            "full": {"rss": self.full_fit.rss, "df_residual": self.full_fit.df_residual,
                     "rank": self.full_fit.rank},
            "reduced": {"rss": self.reduced_fit.rss, "df_residual": self.reduced_fit.df_residual,
                        "rank": self.reduced_fit.rank},
            "comparison": {
                "F": None if not r.defined else r.statistic,
                "df_num": r.df_num,
                "df_den": r.df_den,
                "p_value": None if not r.defined else r.p_value,
                "sum_of_sq": r.details["ss_diff"],
                "flags": list(r.flags),
            },
            "balanced": self.balanced,
            "notes": list(self.notes),
        }


def _balance(ds: Dataset, response: str, factors: list[str]):
    if not factors:
        return True, []
    cm = factor_cell_means(ds, response, factors)
    return cm.balanced, cm.empty_cells


def test_main_effect(ds: Dataset, response: str, effect: str, across: str, scheme="sum") -> MainEffectTest:
    """Fit ``response ~ effect*across`` and the reduced model, then F-test them."""
    scheme = ContrastScheme.coerce(scheme)
    if ds.n_rows == 0:
        raise MainEffectError("dataset has no rows")
    red_f, augmented, generated = reduced_formula(response, effect, across, ds, scheme)
    full_f = full_formula(response, effect, across)
    y = ds.numeric(response)

    full_dm = build_design(full_f, ds, scheme)
    # the expanded spelling must give the same model
    explicit = build_design(parse(f"{response} ~ 1 + {effect} + {across} + {effect}:{across}"), ds, scheme)
    if not column_span_equal(full_dm, explicit):
        raise MainEffectError("internal check failed: X*Y and 1 + X + Y + X:Y designs differ")
    red_dm = build_design(red_f, augmented, scheme)
    if not in_column_span(red_dm, full_dm):
        raise MainEffectError("internal check failed: reduced model is not nested in the full model")

    notes = []
    factors = [v for v in (effect, across) if ds.is_factor(v)]
    balanced, empty = _balance(ds, response, factors)
    if empty:
        cells = ", ".join(":".join(c) for c in empty)
        msg = f"empty cells ({cells}); the main effect may not be estimable"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)

    full_fit = fit_ols(full_dm, y)
    red_fit = fit_ols(red_dm, y)
    if red_fit.rank == full_fit.rank:
        raise MainEffectError(
            f"the reduced model spans the full model, so the main effect of {effect} "
            "is not estimable" + (" (empty cells)" if empty else "")
        )
    result = f_test(red_fit, full_fit)

    if factors and not balanced and not empty:
        notes.append(
            "unbalanced design: the tested main effect is the unweighted average over "
            f"levels of {across}, not weighted by cell counts"
        )
    if result.flags and "saturated" in result.flags:
        notes.append(
            "full model fits exactly (rss = 0): F undefined; "
            f"sum-of-squares increment {result.details['ss_diff']:.6g}"
        )
    if not full_fit.aliased.any() and not _has_expected_df(ds, effect, result):
        notes.append(f"unexpected numerator df {result.df_num}")

    return MainEffectTest(
        effect=effect,
        across=across,
        scheme=scheme,
        full_formula=full_f,
        reduced_formula=red_f,
        generated_columns=tuple(generated),
        full_fit=full_fit,
        reduced_fit=red_fit,
        result=result,
        balanced=balanced,
        notes=tuple(notes),
    )


def _has_expected_df(ds: Dataset, effect: str, result: ComparisonResult) -> bool:
    col = ds[effect]
    expected = col.n_levels - 1 if isinstance(col, FactorColumn) else 1
    return result.df_num == expected


# pytest would otherwise collect the public function above as a test
test_main_effect.__test__ = False
