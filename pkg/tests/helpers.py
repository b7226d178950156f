"""Shared test-data builders."""

import numpy as np

from mefit.data import Dataset, FactorColumn, NumericColumn

# verdict lines from the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def random_factorial(rng, x_levels, y_levels, reps=3, unbalanced=False, y_numeric=False,
                     x_numeric=False, sd=1.0):
    """Random two-predictor dataset; every factor cell gets at least one row."""
    rows_x, rows_y = [], []
    for i in range(x_levels):
        for j in range(y_levels):
            count = rng.integers(1, reps + 2) if unbalanced else reps
            rows_x += [i] * count
            rows_y += [j] * count
    rows_x, rows_y = np.array(rows_x), np.array(rows_y)
    beta = rng.normal(size=(x_levels, y_levels))
    resp = beta[rows_x, rows_y] + sd * rng.normal(size=len(rows_x))
    cols = {}
    if x_numeric:
        cols["X"] = NumericColumn(rows_x + rng.normal(scale=0.3, size=len(rows_x)))
    else:
        cols["X"] = FactorColumn(tuple(f"x{i + 1}" for i in range(x_levels)), rows_x)
    if y_numeric:
        cols["Y"] = NumericColumn(rows_y + rng.normal(scale=0.3, size=len(rows_y)))
    else:
        cols["Y"] = FactorColumn(tuple(f"y{j + 1}" for j in range(y_levels)), rows_y)
    cols["R"] = NumericColumn(resp)
    return Dataset(cols)
