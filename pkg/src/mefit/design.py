"""Design-matrix construction from a canonical Formula and a Dataset.

Each term contributes the elementwise products of one column per variable:
a numeric variable contributes its values, a factor contributes either its
K-1 contrast columns or its K dummy (indicator) columns. A factor inside a
term is contrast-coded when the term with that factor removed is already in
the model (the empty term being the intercept), and dummy-coded otherwise.
Without an intercept, the first factor of the first factor-bearing term is
dummy-coded and the intercept is otherwise treated as present.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .contrasts import ContrastScheme, contrast_matrix
from .data import Dataset, FactorColumn
from .formula import Formula, Term

__all__ = ["DesignError", "DesignMatrix", "build_design", "column_span_equal", "in_column_span"]

INTERCEPT_LABEL = "(Intercept)"


class DesignError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """N x P model matrix.

    ``assign[j]`` is 0 for the intercept column and k for a column coming
    from ``terms[k - 1]``. ``coding`` records, per term label, how each
    factor in it was coded ("contrast" or "dummy").
    """

    values: np.ndarray
    labels: tuple[str, ...]
    assign: tuple[int, ...]
    terms: tuple[Term, ...]
    intercept: bool
    coding: dict

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def term_columns(self, k: int) -> list[int]:
        return [j for j, a in enumerate(self.assign) if a == k]

    def to_csv(self) -> str:
        lines = [",".join(_quote(lb) for lb in self.labels)]
        lines += [",".join(repr(float(v)) for v in row) for row in self.values]
        return "\n".join(lines) + "\n"


def _quote(s: str) -> str:
    return f'"{s}"' if any(c in s for c in ',"\n') else s


def build_design(f: Formula, ds: Dataset, scheme="sum") -> DesignMatrix:
    """Compile ``f`` against ``ds`` using ``scheme`` for contrast-coded factors."""
    scheme = ContrastScheme.coerce(scheme)
    n = ds.n_rows
    if n == 0:
        raise DesignError("dataset has no rows")
    for name in f.variables:
        if name not in ds:
            raise DesignError(f"unknown variable {name!r}; columns are {list(ds)}")
        col = ds[name]
        if isinstance(col, FactorColumn) and col.n_levels < 2:
            raise DesignError(f"factor {name!r} has a single level {col.levels[0]!r}")

    blocks: list[np.ndarray] = []
    labels: list[str] = []
    assign: list[int] = []
    coding: dict[str, dict[str, str]] = {}

    if f.intercept:
        blocks.append(np.ones((n, 1)))
        labels.append(INTERCEPT_LABEL)
        assign.append(0)

    seen: set[Term] = set()
    dummy_pending = not f.intercept
    for k, term in enumerate(f.terms, start=1):
        parts: list[tuple[list[str], np.ndarray]] = []
        term_coding: dict[str, str] = {}
        for name in term.names:
            col = ds[name]
            if isinstance(col, FactorColumn):
                margin = term.without(name)
                if dummy_pending:
                    use_contrast = False
                    dummy_pending = False
                else:
                    use_contrast = margin is None or margin in seen
                term_coding[name] = "contrast" if use_contrast else "dummy"
                parts.append(_factor_columns(name, col, scheme, use_contrast))
            else:
                parts.append(([name], col.values[:, None]))
        coding[term.label] = term_coding

        # product over variables, first variable varying fastest
        for combo in itertools.product(*(range(len(p[0])) for p in reversed(parts))):
            combo = combo[::-1]
            col = np.ones(n)
            for (names, mat), j in zip(parts, combo):
                col = col * mat[:, j]
            blocks.append(col[:, None])
            labels.append(":".join(names[j] for (names, _), j in zip(parts, combo)))
            assign.append(k)
        seen.add(term)

    if not blocks:
        raise DesignError(f"model {f} has no columns")
    values = np.hstack(blocks) + 0.0  # normalizes -0.0 from products
    values.setflags(write=False)
    return DesignMatrix(values, tuple(labels), tuple(assign), f.terms, f.intercept, coding)


def _factor_columns(name: str, col: FactorColumn, scheme: ContrastScheme, contrast: bool):
    if contrast:
        cm = contrast_matrix(scheme, col.n_levels, col.levels)
        return [f"{name}{lb}" for lb in cm.labels], cm.values[col.codes]
    dummies = np.eye(col.n_levels)[col.codes]
    return [f"{name}{lv}" for lv in col.levels], dummies


def _as_array(m) -> np.ndarray:
    return m.values if isinstance(m, DesignMatrix) else np.asarray(m, dtype=float)


def in_column_span(a, b, tol: float = 1e-8) -> bool:
    """True iff every column of ``a`` lies in the column space of ``b``."""
    A, B = _as_array(a), _as_array(b)
    if A.shape[0] != B.shape[0]:
        raise DesignError(f"row counts differ: {A.shape[0]} vs {B.shape[0]}")
    if A.shape[1] == 0:
        return True
    if B.shape[1] == 0:
        return bool(np.all(A == 0))
    coef, *_ = np.linalg.lstsq(B, A, rcond=None)
    resid = np.linalg.norm(A - B @ coef, axis=0)
    norms = np.linalg.norm(A, axis=0)
    return bool(np.all(resid <= tol * np.maximum(norms, np.finfo(float).tiny)))


def column_span_equal(a, b, tol: float = 1e-8) -> bool:
    """True iff ``a`` and ``b`` span the same column space."""
    return in_column_span(a, b, tol) and in_column_span(b, a, tol)
