"""Command-line interface: ``mefit <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .contrasts import ContrastScheme
from .data import read_csv, write_csv
from .datagen import FactorialSpec, generate
from .design import build_design
from .fit import fit_ols
from .formula import parse, render
from .inference import f_test, lr_test, sequential_anova
from .maineffect import test_main_effect
from . import report


def _load(args) -> "object":
    hints = {name: "factor" for name in args.factor}
    hints.update({name: "numeric" for name in args.numeric})
    return read_csv(args.csv, hints)


def _dump_json(obj):
    print(json.dumps(obj, indent=2, allow_nan=True))


def cmd_matrix(args):
    ds = _load(args)
    dm = build_design(parse(args.formula), ds, args.contrasts)
    text = dm.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fit(args):
    ds = _load(args)
    f = parse(args.formula)
    fit = fit_ols(build_design(f, ds, args.contrasts), ds.numeric(f.response))
    if args.json:
        _dump_json({"formula": render(f), **fit.to_dict()})
    else:
        print(report.format_fit(f, fit))


def cmd_anova(args):
    ds = _load(args)
    table = sequential_anova(parse(args.formula), ds, args.contrasts)
    if args.json:
        _dump_json(table.to_dict())
    else:
        print(report.format_anova(table))
    if args.report:
        out = Path(args.report)
        out.mkdir(parents=True, exist_ok=True)
        (out / "anova.csv").write_text(report.anova_csv(table))


def cmd_compare(args):
    ds = _load(args)
    f0, f1 = parse(args.reduced), parse(args.full)
    if f0.response != f1.response:
        raise SystemExit("error: the two formulas have different responses")
    y = ds.numeric(f1.response)
    fit0 = fit_ols(build_design(f0, ds, args.contrasts), y)
    fit1 = fit_ols(build_design(f1, ds, args.contrasts), y)
    result = f_test(fit0, fit1)
    if args.json:
        _dump_json({"kind": result.kind, "statistic": result.statistic, "df_num": result.df_num,
                    "df_den": result.df_den, "p_value": result.p_value,
                    "flags": list(result.flags), **result.details})
    else:
        print(report.format_comparison(f0, f1, result))


def cmd_test_main_effect(args):
    ds = _load(args)
    t = test_main_effect(ds, args.response, args.effect, args.across, args.contrasts)
    if args.json:
        _dump_json(t.to_dict())
    else:
        print(f"Full model:    {render(t.full_formula)}")
        print(f"               rss = {t.full_fit.rss:.6g}, residual df = {t.full_fit.df_residual}")
        print(f"Reduced model: {render(t.reduced_formula)}")
        print(f"               rss = {t.reduced_fit.rss:.6g}, residual df = {t.reduced_fit.df_residual}")
        if t.generated_columns:
            print(f"Contrast variables ({t.scheme.value}): {', '.join(t.generated_columns)}")
        print()
        print(report.format_comparison(t.reduced_formula, t.full_formula, t.result))
        for note in t.notes:
            print(f"Note: {note}")
        print()
        print(t.methods_summary())
    if args.report:
        out = Path(args.report)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.csv").write_text(report.comparison_csv(t.result))
        (out / "summary.txt").write_text(t.methods_summary() + "\n")
        from .plotting import interaction_plot

        interaction_plot(ds, args.response, args.effect, args.across, out / "interaction.png")


def cmd_lrt(args):
    result = lr_test(args.loglik0, args.df0, args.loglik1, args.df1)
    if args.json:
        _dump_json({"chisq": result.statistic, "df": result.df_num, "p_value": result.p_value,
                    "flags": list(result.flags)})
    else:
        print(report.format_lrt(result, args.nobs))


def cmd_simulate(args):
    beta = [float(v) for v in args.beta.split(",")]
    spec = FactorialSpec.from_column_major(
        beta, args.x_levels, args.y_levels,
        repetitions=args.reps, noise_sd=args.sd, seed=args.seed,
    )
    ds = generate(spec)
    if args.out:
        write_csv(ds, args.out)
    else:
        sys.stdout.write(write_csv(ds))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mefit",
        description="Model formulas, linear-model fits, nested comparisons and main-effect tests.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_command(name, help_text, schemes=tuple(s.value for s in ContrastScheme)):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("csv", help="input CSV with a header row")
        p.add_argument("--contrasts", choices=schemes, default="sum",
                       help="coding for contrast-coded factors (default: sum)")
        p.add_argument("--factor", action="append", default=[], metavar="NAME",
                       help="treat column NAME as a factor (repeatable)")
        p.add_argument("--numeric", action="append", default=[], metavar="NAME",
                       help="treat column NAME as numeric (repeatable)")
        return p

    p = data_command("matrix", "dump the design matrix as CSV")
    p.add_argument("--formula", required=True)
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_matrix)

    p = data_command("fit", "ordinary least squares fit")
    p.add_argument("--formula", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_fit)

    p = data_command("anova", "sequential (type I) ANOVA table")
    p.add_argument("--formula", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--report", metavar="DIR", help="also write anova.csv into DIR")
    p.set_defaults(func=cmd_anova)

    p = data_command("compare", "F test between nested models")
    p.add_argument("--reduced", required=True)
    p.add_argument("--full", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = data_command("test-main-effect", "test the main effect of one predictor across another",
                     schemes=("sum", "helmert"))
    p.add_argument("--response", required=True)
    p.add_argument("--effect", required=True, help="predictor whose main effect is tested")
    p.add_argument("--across", required=True, help="predictor it interacts with")
    p.add_argument("--json", action="store_true")
    p.add_argument("--report", metavar="DIR",
                   help="write comparison.csv, summary.txt and interaction.png into DIR")
    p.set_defaults(func=cmd_test_main_effect)

    p = sub.add_parser("lrt", help="likelihood-ratio test from externally supplied log-likelihoods")
    p.add_argument("--loglik0", type=float, required=True)
    p.add_argument("--df0", type=int, required=True, help="parameter count of the smaller model")
    p.add_argument("--loglik1", type=float, required=True)
    p.add_argument("--df1", type=int, required=True, help="parameter count of the larger model")
    p.add_argument("--nobs", type=int, help="number of observations (enables BIC)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lrt)

    p = sub.add_parser("simulate", help="generate a two-factor dataset with known cell means")
    p.add_argument("--x-levels", type=int, default=2)
    p.add_argument("--y-levels", type=int, default=3)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--beta", default="1,4,5,2,3,3",
                   help="cell means, column-major (X varies fastest)")
    p.add_argument("--sd", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mefit {args.command}: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
