"""Upper-tail probabilities of the F and chi-squared distributions.

Both reduce to regularized incomplete functions: the F tail to the
incomplete beta ratio, the chi-squared tail to the incomplete gamma ratio.
They are evaluated with the modified Lentz continued fraction, switching to
the power series (gamma) or the symmetry relation (beta) where the fraction
converges slowly.
"""

from __future__ import annotations

import math

__all__ = [
    "regularized_beta",
    "regularized_gamma_p",
    "regularized_gamma_q",
    "f_upper_tail",
    "chisq_upper_tail",
]

EPS = 1e-16
TINY = 1e-300
MAX_ITER = 100_000


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < TINY:
        d = TINY
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise ArithmeticError(f"incomplete beta fraction did not converge (a={a}, b={b}, x={x})")


def _beta_front(a: float, b: float, x: float, xc: float) -> float:
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(xc)
    )
    return math.exp(log_front)


def _ibeta(x: float, xc: float, a: float, b: float) -> float:
    # xc is 1 - x, supplied separately so callers can avoid cancellation
    if x == 0.0 or xc == 1.0:
        return 0.0
    if xc == 0.0 or x == 1.0:
        return 1.0
    front = _beta_front(a, b, x, xc)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, xc) / b


def regularized_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return _ibeta(x, 1.0 - x, a, b)


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized P(a, x) by its power series; good for x < a + 1."""
    term = total = 1.0 / a
    ap = a
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized Q(a, x) by continued fraction; good for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma fraction did not converge (a={a}, x={x})")


def regularized_gamma_p(a: float, x: float) -> float:
    if a <= 0 or x < 0:
        raise ValueError(f"need a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    if a <= 0 or x < 0:
        raise ValueError(f"need a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _check_df(**dfs):
    for name, value in dfs.items():
        if not value >= 1:
            raise ValueError(f"{name} must be >= 1, got {value}")


def f_upper_tail(x: float, d1: float, d2: float) -> float:
    """P(F > x) for F with (d1, d2) degrees of freedom."""
    _check_df(d1=d1, d2=d2)
    if math.isnan(x) or x < 0:
        raise ValueError(f"F statistic must be non-negative, got {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    # P(F > x) = I_{d2 / (d2 + d1 x)}(d2/2, d1/2)
    denom = d2 + d1 * x
    return _ibeta(d2 / denom, d1 * x / denom, d2 / 2.0, d1 / 2.0)


def chisq_upper_tail(x: float, k: float) -> float:
    """P(X > x) for a chi-squared variable with k degrees of freedom."""
    _check_df(k=k)
    if math.isnan(x) or x < 0:
        raise ValueError(f"chi-squared statistic must be non-negative, got {x}")
    if math.isinf(x):
        return 0.0
    return regularized_gamma_q(k / 2.0, x / 2.0)
