"""Typed tabular datasets: numeric and factor columns, CSV in and out."""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "DataError",
    "NumericColumn",
    "FactorColumn",
    "Column",
    "Dataset",
    "CellMeans",
    "read_csv",
    "write_csv",
    "factor_cell_means",
]

NA_TOKENS = frozenset({"", "NA", "N/A", "NaN", "nan", "null", "NULL"})
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")


class DataError(ValueError):
    pass


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.ndim != 1:
        raise DataError("column values must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NumericColumn:
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.values, float)
        if not np.all(np.isfinite(arr)):
            raise DataError("numeric column contains non-finite values")
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, NumericColumn) and np.array_equal(self.values, other.values)

    def cells(self) -> list[str]:
        return [repr(float(v)) for v in self.values]


@dataclass(frozen=True, eq=False)
class FactorColumn:
    """Categorical column. ``codes`` index into ``levels`` (0-based)."""

    levels: tuple[str, ...]
    codes: np.ndarray

    def __post_init__(self):
        levels = tuple(str(lv) for lv in self.levels)
        if len(set(levels)) != len(levels):
            raise DataError(f"duplicate factor levels: {levels}")
        if not levels:
            raise DataError("factor needs at least one level")
        codes = _frozen(self.codes, np.intp)
        if codes.size and (codes.min() < 0 or codes.max() >= len(levels)):
            raise DataError("factor code outside level table")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_labels(cls, labels: Iterable[str], levels: Sequence[str] | None = None):
        labels = [str(x) for x in labels]
        if levels is None:
            levels = sorted(set(labels))
        index = {lv: i for i, lv in enumerate(levels)}
        try:
            codes = [index[x] for x in labels]
        except KeyError as exc:
            raise DataError(f"label {exc.args[0]!r} not among levels {tuple(levels)}") from None
        return cls(tuple(levels), codes)

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def labels(self) -> list[str]:
        return [self.levels[c] for c in self.codes]

    def __len__(self):
        return len(self.codes)

    def __eq__(self, other):
        return (
            isinstance(other, FactorColumn)
            and self.levels == other.levels
            and np.array_equal(self.codes, other.codes)
        )

    def cells(self) -> list[str]:
        return self.labels()


Column = Union[NumericColumn, FactorColumn]


class Dataset(Mapping[str, Column]):
    """Immutable, ordered mapping of column name to column."""

    def __init__(self, columns: Mapping[str, Column]):
        cols = dict(columns)
        lengths = {len(c) for c in cols.values()}
        if len(lengths) > 1:
            detail = ", ".join(f"{k}={len(v)}" for k, v in cols.items())
            raise DataError(f"columns have unequal lengths: {detail}")
        for name, col in cols.items():
            if not isinstance(col, (NumericColumn, FactorColumn)):
                raise DataError(f"column {name!r} is not a NumericColumn or FactorColumn")
        self._columns = cols
        self.n_rows = lengths.pop() if lengths else 0

    @classmethod
    def from_dict(cls, data: Mapping[str, Sequence], factors: Iterable[str] = ()):
        """Build from plain sequences; strings (or names in ``factors``) become factors."""
        factors = set(factors)
        cols: dict[str, Column] = {}
        for name, values in data.items():
            values = list(values)
            if name in factors or any(isinstance(v, str) for v in values):
                cols[name] = FactorColumn.from_labels(values)
            else:
                cols[name] = NumericColumn(values)
        return cls(cols)

    def __getitem__(self, name: str) -> Column:
        try:
            return self._columns[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}; columns are {list(self._columns)}") from None

    def __iter__(self):
        return iter(self._columns)

    def __len__(self):
        return len(self._columns)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return list(self._columns) == list(other._columns) and all(
            self._columns[k] == other._columns[k] for k in self._columns
        )

    def __repr__(self):
        kinds = ", ".join(
            f"{k}:{'factor' if isinstance(c, FactorColumn) else 'numeric'}"
            for k, c in self._columns.items()
        )
        return f"Dataset(n_rows={self.n_rows}, {kinds})"

    def is_factor(self, name: str) -> bool:
        return isinstance(self[name], FactorColumn)

    def numeric(self, name: str) -> np.ndarray:
        col = self[name]
        if not isinstance(col, NumericColumn):
            raise DataError(f"column {name!r} is a factor, expected numeric")
        return col.values

    def with_columns(self, new: Mapping[str, Column]) -> "Dataset":
        clash = [k for k in new if k in self._columns]
        if clash:
            raise DataError(f"column name(s) already in dataset: {clash}")
        return Dataset({**self._columns, **new})

    def take(self, rows) -> "Dataset":
        """Subset (or reorder) rows; factor level tables are kept."""
        rows = np.asarray(rows)
        if rows.size == 0:
            rows = rows.astype(np.intp)
        out: dict[str, Column] = {}
        for k, c in self._columns.items():
            if isinstance(c, FactorColumn):
                out[k] = FactorColumn(c.levels, c.codes[rows])
            else:
                out[k] = NumericColumn(c.values[rows])
        return Dataset(out)


# -- CSV ---------------------------------------------------------------------------


def _parse_number(cell: str) -> float | None:
    s = cell.strip()
    return float(s) if _NUMBER_RE.match(s) else None


def read_csv(source, type_hints: Mapping[str, str] | None = None) -> Dataset:
    """Read a CSV file (path or text stream) into a Dataset.

    Unhinted columns are numeric when every cell parses as a decimal number,
    otherwise factors with lexicographically sorted levels. ``type_hints``
    maps column names to ``"numeric"`` or ``"factor"``. Missing cells are an
    error.
    """
    type_hints = dict(type_hints or {})
    for name, kind in type_hints.items():
        if kind not in ("numeric", "factor"):
            raise DataError(f"type hint for {name!r} must be 'numeric' or 'factor', got {kind!r}")

    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))

    if not rows:
        raise DataError("CSV input is empty (no header row)")
    header, body = rows[0], rows[1:]
    # a trailing blank line is not a data row
    while body and body[-1] == []:
        body.pop()

    dupes = sorted({h for h in header if header.count(h) > 1})
    if dupes:
        raise DataError(f"duplicate column names in header: {dupes}")
    unknown = set(type_hints) - set(header)
    if unknown:
        raise DataError(f"type hints for unknown columns: {sorted(unknown)}")

    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"line {i}: expected {len(header)} fields, found {len(row)}")
        for name, cell in zip(header, row):
            if cell.strip() in NA_TOKENS:
                raise DataError(f"line {i}, column {name!r}: missing value {cell!r}")

    columns: dict[str, Column] = {}
    for j, name in enumerate(header):
        cells = [row[j] for row in body]
        kind = type_hints.get(name)
        parsed = [_parse_number(c) for c in cells]
        if kind == "numeric":
            for i, (c, v) in enumerate(zip(cells, parsed), start=2):
                if v is None:
                    raise DataError(f"line {i}, column {name!r}: {c!r} is not a number")
            columns[name] = NumericColumn(parsed)
        elif kind is None and all(v is not None for v in parsed):
            columns[name] = NumericColumn(parsed)
        else:
            columns[name] = FactorColumn.from_labels(cells)
    return Dataset(columns)


def write_csv(ds: Dataset, dest=None) -> str | None:
    """Write ``ds`` as CSV with ``\\n`` line endings and minimal quoting.

    ``dest`` may be a path or a text stream; with no destination the CSV text
    is returned.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    names = list(ds)
    writer.writerow(names)
    cells = [ds[n].cells() for n in names]
    writer.writerows(zip(*cells))
    text = buf.getvalue()
    if dest is None:
        return text
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dest.write(text)
    return None


# -- cell means ----------------------------------------------------------------------


@dataclass(frozen=True)
class CellMeans:
    """Mean response per combination of factor levels.

    ``means`` and ``counts`` have one axis per factor; empty cells hold NaN
    and a zero count.
    """

    factors: tuple[str, ...]
    levels: tuple[tuple[str, ...], ...]
    means: np.ndarray
    counts: np.ndarray

    @property
    def empty_cells(self) -> list[tuple[str, ...]]:
        idx = np.argwhere(self.counts == 0)
        return [tuple(self.levels[a][i] for a, i in enumerate(row)) for row in idx]

    @property
    def balanced(self) -> bool:
        return bool(self.counts.size) and bool(np.all(self.counts == self.counts.flat[0]))


def factor_cell_means(ds: Dataset, response: str, factors: Sequence[str]) -> CellMeans:
    y = ds.numeric(response)
    cols = []
    for name in factors:
        col = ds[name]
        if not isinstance(col, FactorColumn):
            raise DataError(f"{name!r} is numeric; cell means need factors")
        cols.append(col)
    shape = tuple(c.n_levels for c in cols)
    sums = np.zeros(shape)
    counts = np.zeros(shape, dtype=np.intp)
    if cols:
        flat = np.ravel_multi_index(tuple(c.codes for c in cols), shape)
        np.add.at(sums.reshape(-1), flat, y)
        np.add.at(counts.reshape(-1), flat, 1)
    else:
        sums[()] = y.sum()
        counts[()] = len(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return CellMeans(tuple(factors), tuple(c.levels for c in cols), means, counts)
