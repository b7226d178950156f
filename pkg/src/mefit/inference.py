"""Nested-model F tests, likelihood-ratio tests and sequential ANOVA tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .design import build_design
from .fit import SATURATION_TOL, FitResult, fit_ols
from .formula import Formula, parse
from .special import chisq_upper_tail, f_upper_tail

__all__ = [
    "InferenceError",
    "ComparisonResult",
    "AnovaRow",
    "AnovaTable",
    "f_test",
    "lr_test",
    "sequential_anova",
    "NESTING_TOL",
]

NESTING_TOL = 1e-8


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of a nested comparison.

    For ``kind == "F"`` the model-level fields are residual sums of squares
    and residual df; for ``kind == "chisq"`` they are log-likelihoods and
    parameter counts. ``flags`` collects non-fatal conditions (saturated full
    model, clamped statistic) as short strings.
    """

    kind: str
    statistic: float
    df_num: int
    df_den: int | None
    p_value: float
    flags: tuple[str, ...] = ()
    # F: rss0, rss1, df0, df1, ss_diff. chisq: loglik0, loglik1, df0, df1
    details: dict = field(default_factory=dict)

    @property
    def defined(self) -> bool:
        return not math.isnan(self.statistic)


def f_test(reduced: FitResult, full: FitResult) -> ComparisonResult:
    """F test of ``reduced`` against the larger model ``full``.

    F = ((rss0 - rss1) / (df0 - df1)) / (rss1 / df1). When the full model
    fits exactly the statistic is undefined: it is reported as NaN with a
    ``"saturated"`` flag, and the sum-of-squares increment is still given.
    """
    if reduced.n != full.n:
        raise InferenceError(f"models fitted to different data (n={reduced.n} vs n={full.n})")
    df0, df1 = reduced.df_residual, full.df_residual
    if df0 == df1:
        raise InferenceError("models have the same residual df; nothing to test")
    if df0 < df1:
        raise InferenceError(
            f"reduced model has fewer residual df ({df0}) than the full model ({df1}); "
            "are the arguments swapped?"
        )
    rss0, rss1 = reduced.rss, full.rss
    ss = rss0 - rss1
    # roundoff in either rss is on the scale of y'y, not of the rss itself
    y = full.fitted + full.residuals
    slack = NESTING_TOL * max(rss0, rss1) + SATURATION_TOL * float(y @ y) + np.finfo(float).tiny
    flags = []
    if ss < 0:
        if ss < -slack:
            raise InferenceError(
                f"reduced rss {rss0!r} is below full rss {rss1!r}; models are not nested"
            )
        ss = 0.0
        flags.append("clamped")
    df_num = df0 - df1
    details = {"rss0": rss0, "rss1": rss1, "df0": df0, "df1": df1, "ss_diff": ss}
    if full.saturated or df1 == 0:
        flags.append("saturated")
        return ComparisonResult("F", math.nan, df_num, df1, math.nan, tuple(flags), details)
    stat = (ss / df_num) / (rss1 / df1)
    return ComparisonResult("F", stat, df_num, df1, f_upper_tail(stat, df_num, df1), tuple(flags), details)


def lr_test(loglik0: float, df0: int, loglik1: float, df1: int) -> ComparisonResult:
    """Likelihood-ratio chi-squared test of model 0 nested in model 1.

    ``df0``/``df1`` are parameter counts; chi2 = 2 (loglik1 - loglik0) on
    df1 - df0 degrees of freedom. Negative statistics down to -1e-8 are
    clamped to zero and flagged.
    """
    if df1 <= df0:
        raise InferenceError(f"model 1 must have more parameters than model 0 (got {df0} and {df1})")
    if not (math.isfinite(loglik0) and math.isfinite(loglik1)):
        raise InferenceError("log-likelihoods must be finite")
    stat = 2.0 * (loglik1 - loglik0)
    flags = []
    if stat < 0:
        if stat < -NESTING_TOL:
            raise InferenceError(
                f"larger model has lower log-likelihood ({loglik1} < {loglik0}); not nested"
            )
        stat = 0.0
        flags.append("clamped")
    k = df1 - df0
    details = {"loglik0": loglik0, "loglik1": loglik1, "df0": df0, "df1": df1}
    return ComparisonResult("chisq", stat, k, None, chisq_upper_tail(stat, k), tuple(flags), details)


@dataclass(frozen=True)
class AnovaRow:
    term: str
    df: int
    sum_sq: float
    mean_sq: float
    f_value: float
    p_value: float


@dataclass(frozen=True)
class AnovaTable:
    """Sequential (type I) ANOVA: one row per term plus the residual row."""

    formula: Formula
    rows: tuple[AnovaRow, ...]
    df_residual: int
    rss: float
    total_ss: float

    @property
    def residual_mean_sq(self) -> float:
        return self.rss / self.df_residual if self.df_residual > 0 else math.nan

    def row(self, term: str) -> AnovaRow:
        for r in self.rows:
            if r.term == term:
                return r
        raise KeyError(term)

    def to_dict(self) -> dict:
        return {
            "formula": str(self.formula),
            "rows": [r.__dict__ for r in self.rows],
            "residual": {"df": self.df_residual, "sum_sq": self.rss, "mean_sq": self.residual_mean_sq},
        }


def sequential_anova(f, ds: Dataset, scheme="sum") -> AnovaTable:
    """Type I ANOVA for ``f``.

    The full design is built once; term k's sum of squares is the drop in
    rss when its columns join those of terms 1..k-1 (and the intercept).
    F values use the full model's residual mean square.
    """
    if isinstance(f, str):
        f = parse(f)
    if not f.terms:
        raise InferenceError("ANOVA needs at least one term")
    dm = build_design(f, ds, scheme)
    y = ds.numeric(f.response)

    base_cols = dm.term_columns(0)
    if base_cols:
        prev = fit_ols(dm.values[:, base_cols], y)
    else:
        prev = None
    prev_rss = prev.rss if prev else float(y @ y)
    prev_rank = prev.rank if prev else 0
    total_ss = prev_rss

    steps = []
    cols = list(base_cols)
    full = prev
    for k, term in enumerate(f.terms, start=1):
        cols += dm.term_columns(k)
        full = fit_ols(dm.values[:, cols], y)
        steps.append((term.label, full.rank - prev_rank, max(prev_rss - full.rss, 0.0)))
        prev_rss, prev_rank = full.rss, full.rank

    df_res = full.df_residual
    ms_res = full.rss / df_res if df_res > 0 else math.nan
    undefined = full.saturated or df_res == 0
    rows = []
    for label, df, ss in steps:
        ms = ss / df if df > 0 else math.nan
        if undefined or df == 0:
            fval = p = math.nan
        else:
            fval = ms / ms_res
            p = f_upper_tail(fval, df, df_res)
        rows.append(AnovaRow(label, df, ss, ms, fval, p))
    return AnovaTable(f, tuple(rows), df_res, full.rss, total_ss)
