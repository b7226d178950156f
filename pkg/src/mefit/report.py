"""Plain-text and delimited renderings of fits, ANOVA tables and comparisons."""

from __future__ import annotations

import csv
import io
import math

from .fit import FitResult, aic, bic
from .formula import Formula, render
from .inference import AnovaTable, ComparisonResult


def _num(x: float, digits: int = 5) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    return f"{x:.{digits}g}"


def _pval(p: float) -> str:
    if math.isnan(p):
        return ""
    return "<2e-16" if p < 2e-16 else f"{p:.4g}"


def _table(header: list[str], rows: list[list[str]], first_left: bool = True) -> str:
    widths = [max(len(r[j]) for r in [header] + rows) for j in range(len(header))]
    lines = []
    for r in [header] + rows:
        cells = []
        for j, cell in enumerate(r):
            cells.append(cell.ljust(widths[j]) if j == 0 and first_left else cell.rjust(widths[j]))
        lines.append(" ".join(cells).rstrip())
    return "\n".join(lines)


def format_fit(f: Formula, fit: FitResult) -> str:
    rows = []
    for lb, c, al in zip(fit.labels, fit.coefficients, fit.aliased):
        rows.append([lb, "(aliased)" if al else _num(float(c), 7)])
    lines = [
        f"Formula: {render(f)}",
        "",
        _table(["Coefficient", "Estimate"], rows),
        "",
        f"RSS: {_num(fit.rss, 7)} on {fit.df_residual} residual df (n = {fit.n}, rank = {fit.rank})",
        f"logLik: {_num(fit.loglik, 7)} (df = {fit.df_model})   "
        f"AIC: {_num(fit.aic, 7)}   BIC: {_num(fit.bic, 7)}",
    ]
    return "\n".join(lines)


def format_anova(table: AnovaTable) -> str:
    header = ["", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"]
    rows = [
        [r.term, str(r.df), _num(r.sum_sq, 5), _num(r.mean_sq, 5), _num(r.f_value, 5), _pval(r.p_value)]
        for r in table.rows
    ]
    rows.append(["Residuals", str(table.df_residual), _num(table.rss, 5),
                 _num(table.residual_mean_sq, 5), "", ""])
    return f"Analysis of Variance Table ({render(table.formula)})\n\n" + _table(header, rows)


def format_comparison(reduced: Formula, full: Formula, result: ComparisonResult) -> str:
    d = result.details
    header = ["", "Res.Df", "RSS", "Df", "Sum of Sq", "F", "Pr(>F)"]
    rows = [
        ["1", str(d["df0"]), _num(d["rss0"], 5), "", "", "", ""],
        ["2", str(d["df1"]), _num(d["rss1"], 5), str(result.df_num), _num(d["ss_diff"], 5),
         _num(result.statistic, 5), _pval(result.p_value)],
    ]
    text = (
        "Analysis of Variance Table\n\n"
        f"Model 1: {render(reduced)}\n"
        f"Model 2: {render(full)}\n"
        + _table(header, rows)
    )
    if result.flags:
        text += "\n\nNote: " + ", ".join(result.flags)
    return text


def comparison_csv(result: ComparisonResult) -> str:
    d = result.details
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "res_df", "rss", "df", "sum_of_sq", "F", "p_value"])
    w.writerow([1, d["df0"], repr(d["rss0"]), "", "", "", ""])
    w.writerow([2, d["df1"], repr(d["rss1"]), result.df_num, repr(d["ss_diff"]),
                repr(result.statistic), repr(result.p_value)])
    return buf.getvalue()


def anova_csv(table: AnovaTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["term", "df", "sum_sq", "mean_sq", "f_value", "p_value"])
    for r in table.rows:
        w.writerow([r.term, r.df, repr(r.sum_sq), repr(r.mean_sq), repr(r.f_value), repr(r.p_value)])
    w.writerow(["Residuals", table.df_residual, repr(table.rss), repr(table.residual_mean_sq), "", ""])
    return buf.getvalue()


def format_lrt(result: ComparisonResult, nobs: int | None = None, names=("m0", "m1")) -> str:
    d = result.details
    header = ["", "Df", "AIC", "BIC", "logLik", "Chisq", "Chi Df", "Pr(>Chisq)"]
    rows = []
    for i, (name, ll, df) in enumerate(zip(names, (d["loglik0"], d["loglik1"]), (d["df0"], d["df1"]))):
        b = _num(bic(ll, df, nobs), 6) if nobs else ""
        row = [name, str(df), _num(aic(ll, df), 6), b, _num(ll, 6)]
        if i == 0:
            row += ["", "", ""]
        else:
            row += [_num(result.statistic, 4), str(result.df_num), _num(result.p_value, 4)]
        rows.append(row)
    return _table(header, rows)
