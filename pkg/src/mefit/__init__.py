"""Model formulas, design matrices, OLS fits and nested-model tests, including
a test for the main effect of a predictor in the presence of its interaction
with another predictor."""

from .contrasts import ContrastMatrix, ContrastScheme, contrast_matrix, sum_code_factor
from .data import Dataset, FactorColumn, NumericColumn, factor_cell_means, read_csv, write_csv
from .datagen import FactorialSpec, generate
from .design import DesignMatrix, build_design, column_span_equal
from .fit import FitResult, aic, bic, fit_ols, gaussian_loglik
from .formula import Formula, Term, formulas_equal, parse, render
from .inference import AnovaTable, ComparisonResult, f_test, lr_test, sequential_anova
from .maineffect import MainEffectTest, reduced_formula, test_main_effect
from .special import chisq_upper_tail, f_upper_tail

__version__ = "0.1.0"

__all__ = [
    "AnovaTable",
    "ComparisonResult",
    "ContrastMatrix",
    "ContrastScheme",
    "Dataset",
    "DesignMatrix",
    "FactorColumn",
    "FactorialSpec",
    "FitResult",
    "Formula",
    "MainEffectTest",
    "NumericColumn",
    "Term",
    "aic",
    "bic",
    "build_design",
    "chisq_upper_tail",
    "column_span_equal",
    "contrast_matrix",
    "f_test",
    "f_upper_tail",
    "factor_cell_means",
    "fit_ols",
    "formulas_equal",
    "gaussian_loglik",
    "generate",
    "lr_test",
    "parse",
    "read_csv",
    "reduced_formula",
    "render",
    "sequential_anova",
    "sum_code_factor",
    "test_main_effect",
    "write_csv",
]
