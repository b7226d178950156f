"""Ordinary least squares with alias detection, Gaussian log-likelihood, AIC/BIC."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .design import DesignMatrix

__all__ = [
    "FitError",
    "SaturatedFitWarning",
    "FitResult",
    "householder_qr",
    "fit_ols",
    "gaussian_loglik",
    "aic",
    "bic",
    "ALIAS_TOL",
]

ALIAS_TOL = 1e-10
# rss at or below this fraction of sum(y**2) counts as an exact fit
SATURATION_TOL = 1e-24


class FitError(ValueError):
    pass


class SaturatedFitWarning(RuntimeWarning):
    """Zero residual sum of squares: the Gaussian log-likelihood is unbounded."""


@dataclass(frozen=True)
class QR:
    """Compact Householder factorization of the kept columns.

    ``kept`` lists design columns in the order they were factored, ``aliased``
    the columns found to lie in the span of earlier ones.
    """

    R: np.ndarray
    reflectors: list
    kept: list
    aliased: list

    @property
    def rank(self) -> int:
        return len(self.kept)

    def qt(self, y: np.ndarray) -> np.ndarray:
        """Apply Q^T to a vector."""
        z = np.array(y, dtype=float)
        for k, v in enumerate(self.reflectors):
            z[k:] -= 2.0 * v * (v @ z[k:])
        return z


def householder_qr(X: np.ndarray, tol: float = ALIAS_TOL) -> QR:
    """Householder QR that keeps the column order.

    A column whose norm, after removing its projection on the columns kept so
    far, falls below ``tol`` times its original norm is set aside as aliased;
    the remaining columns are factored in their original order. Exactly zero
    columns are always aliased.
    """
    A = np.array(X, dtype=float)
    n, p = A.shape
    norms = np.linalg.norm(A, axis=0)
    reflectors: list[np.ndarray] = []
    kept: list[int] = []
    aliased: list[int] = []
    r_cols: list[np.ndarray] = []
    for j in range(p):
        k = len(kept)
        x = A[:, j].copy()
        for i, v in enumerate(reflectors):
            x[i:] -= 2.0 * v * (v @ x[i:])
        tail = np.linalg.norm(x[k:]) if k < n else 0.0
        if norms[j] == 0.0 or tail <= tol * norms[j]:
            aliased.append(j)
            continue
        alpha = -math.copysign(tail, x[k]) if x[k] != 0 else -tail
        v = x[k:].copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        reflectors.append(v)
        x[k] = alpha
        x[k + 1:] = 0.0
        r_cols.append(x[: k + 1])
        kept.append(j)
    r = len(kept)
    R = np.zeros((r, r))
    for c, col in enumerate(r_cols):
        R[: c + 1, c] = col
    return QR(R, reflectors, kept, aliased)


@dataclass(frozen=True)
class FitResult:
    """Result of an OLS fit.

    ``coefficients`` has one entry per design column, NaN where the column
    was aliased. ``df_model`` (rank + 1, counting the residual variance) is
    the parameter count used for AIC and BIC.
    """

    coefficients: np.ndarray
    aliased: np.ndarray
    labels: tuple[str, ...]
    rss: float
    rank: int
    n: int
    fitted: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    saturated: bool = False

    @property
    def df_residual(self) -> int:
        return self.n - self.rank

    @property
    def df_model(self) -> int:
        return self.rank + 1

    @property
    def loglik(self) -> float:
        if self.saturated:
            return math.inf
        return gaussian_loglik(self.rss, self.n)

    @property
    def aic(self) -> float:
        return aic(self.loglik, self.df_model)

    @property
    def bic(self) -> float:
        return bic(self.loglik, self.df_model, self.n)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.rss / self.df_residual) if self.df_residual > 0 else math.nan

    def to_dict(self) -> dict:
        return {
            "coefficients": {
                lb: (None if al else float(c))
                for lb, c, al in zip(self.labels, self.coefficients, self.aliased)
            },
            "rss": self.rss,
            "df_residual": self.df_residual,
            "rank": self.rank,
            "n": self.n,
            "loglik": _json_float(self.loglik),
            "df_model": self.df_model,
            "aic": _json_float(self.aic),
            "bic": _json_float(self.bic),
            "saturated": self.saturated,
        }


def _json_float(x: float):
    return x if math.isfinite(x) else repr(x)


def fit_ols(dm, y, tol: float = ALIAS_TOL) -> FitResult:
    """Least-squares fit of ``y`` on the columns of ``dm``.

    ``dm`` may be a :class:`DesignMatrix` or a plain 2-D array. Columns in the
    span of earlier columns get a NaN coefficient and do not count towards
    the rank.
    """
    if isinstance(dm, DesignMatrix):
        X, labels = dm.values, dm.labels
    else:
        X = np.asarray(dm, dtype=float)
        if X.ndim != 2:
            raise FitError("design must be two-dimensional")
        labels = tuple(f"x{j + 1}" for j in range(X.shape[1]))
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n == 0:
        raise FitError("cannot fit a model to zero rows")
    if y.shape != (n,):
        raise FitError(f"response has shape {y.shape}, design has {n} rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise FitError("non-finite values in design or response")

    qr = householder_qr(X, tol)
    coef = np.full(p, np.nan)
    if qr.rank:
        qty = qr.qt(y)[: qr.rank]
        coef[qr.kept] = _back_substitute(qr.R, qty)
        fitted = X[:, qr.kept] @ coef[qr.kept]
    else:
        fitted = np.zeros(n)
    resid = y - fitted
    rss = float(resid @ resid)
    aliased = np.zeros(p, dtype=bool)
    aliased[qr.aliased] = True
    saturated = rss <= SATURATION_TOL * float(y @ y)
    return FitResult(coef, aliased, tuple(labels), rss, qr.rank, n, fitted, resid, saturated)


def _back_substitute(R: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.zeros_like(b)
    for i in range(len(b) - 1, -1, -1):
        x[i] = (b[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
    return x


def gaussian_loglik(rss: float, n: int) -> float:
    """Maximized normal log-likelihood, -(n/2)(log(2 pi) + log(rss/n) + 1).

    For rss == 0 the likelihood is unbounded: returns +inf and emits
    :class:`SaturatedFitWarning`.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if rss < 0:
        raise ValueError(f"rss must be non-negative, got {rss}")
    if rss == 0:
        warnings.warn("rss is zero; log-likelihood is unbounded", SaturatedFitWarning, stacklevel=2)
        return math.inf
    return -0.5 * n * (math.log(2 * math.pi) + math.log(rss / n) + 1.0)


def aic(loglik: float, df: int) -> float:
    return -2.0 * loglik + 2.0 * df


def bic(loglik: float, df: int, n: int) -> float:
    return -2.0 * loglik + df * math.log(n)
