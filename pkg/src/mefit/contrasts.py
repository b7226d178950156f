"""Contrast matrices for factors, and conversion of a factor into numeric
contrast columns.

Sum and Helmert schemes are "true" contrasts (every column sums to zero over
the levels), so the zero point of the coded variables sits at the unweighted
average of the levels. Treatment coding does not have that property.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import FactorColumn, NumericColumn

__all__ = [
    "ContrastScheme",
    "ContrastMatrix",
    "ContrastError",
    "contrast_matrix",
    "sum_code_factor",
]


class ContrastError(ValueError):
    pass


class ContrastScheme(str, enum.Enum):
    TREATMENT = "treatment"
    SUM = "sum"
    HELMERT = "helmert"

    @property
    def sums_to_zero(self) -> bool:
        return self is not ContrastScheme.TREATMENT

    @classmethod
    def coerce(cls, value) -> "ContrastScheme":
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ContrastError(f"unknown contrast scheme {value!r} (choose from {choices})") from None


@dataclass(frozen=True, eq=False)
class ContrastMatrix:
    """K x (K-1) coding matrix; row i is the code for level i."""

    scheme: ContrastScheme
    values: np.ndarray
    labels: tuple[str, ...]

    @property
    def n_levels(self) -> int:
        return self.values.shape[0]

    def rows(self) -> list[tuple[float, ...]]:
        return [tuple(float(v) for v in row) for row in self.values]


def contrast_matrix(scheme, n_levels: int, levels: Sequence[str] | None = None) -> ContrastMatrix:
    """Standard coding matrix for ``scheme`` with ``n_levels`` levels.

    ``levels`` only affects the column labels: treatment and Helmert columns
    are named after levels 2..K, sum columns after levels 1..K-1.

    >>> contrast_matrix("sum", 3).rows()
    [(1.0, 0.0), (0.0, 1.0), (-1.0, -1.0)]
    """
    scheme = ContrastScheme.coerce(scheme)
    K = int(n_levels)
    if K < 2:
        raise ContrastError(f"contrasts need at least 2 levels, got {K}")
    if levels is None:
        levels = [str(i) for i in range(1, K + 1)]
    elif len(levels) != K:
        raise ContrastError(f"{len(levels)} level names given for {K} levels")

    if scheme is ContrastScheme.TREATMENT:
        m = np.zeros((K, K - 1))
        m[1:, :] = np.eye(K - 1)
        labels = levels[1:]
    elif scheme is ContrastScheme.SUM:
        m = np.vstack([np.eye(K - 1), -np.ones((1, K - 1))])
        labels = levels[:-1]
    else:
        # column j: -1 on rows 0..j, j+1 on row j+1, zero below
        m = np.zeros((K, K - 1))
        for j in range(K - 1):
            m[: j + 1, j] = -1.0
            m[j + 1, j] = j + 1.0
        labels = levels[1:]
    m.setflags(write=False)
    return ContrastMatrix(scheme, m, tuple(str(lb) for lb in labels))


def sum_code_factor(name: str, column: FactorColumn, scheme="sum") -> dict[str, NumericColumn]:
    """Replace a K-level factor by K-1 numeric contrast variables.

    Row i of variable ``<name>j`` holds entry (level of row i, j) of the
    contrast matrix. Only sum-to-zero schemes are accepted.

    >>> from mefit.data import FactorColumn
    >>> y = FactorColumn.from_labels(["y1", "y2", "y3", "y1"])
    >>> {k: v.values.tolist() for k, v in sum_code_factor("Y", y).items()}
    {'Y1': [1.0, 0.0, -1.0, 1.0], 'Y2': [0.0, 1.0, -1.0, 0.0]}
    """
    scheme = ContrastScheme.coerce(scheme)
    if not isinstance(column, FactorColumn):
        raise ContrastError(f"{name!r} is not a factor")
    if not scheme.sums_to_zero:
        raise ContrastError(
            f"{scheme.value} contrasts do not sum to zero; zero on the coded "
            "variables would be the baseline level, not the average over levels"
        )
    cm = contrast_matrix(scheme, column.n_levels)
    coded = cm.values[column.codes]
    return {f"{name}{j + 1}": NumericColumn(coded[:, j]) for j in range(coded.shape[1])}
