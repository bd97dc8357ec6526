"""Exact-rational reference path, independent of the floating engine.

Everything here works on Fraction values straight from the defining
formulas: deformed integers as (p^m - q^m)/(p - q), binomials as factorial
ratios, weights with the explicit p^(-kn) and p^(n(n+1)/2) factors.  None of
the tau-form rewrites of the floating path appear, so agreement between the
two is a genuine cross-check.

This is a test instrument: weight-level operations carry hard scale caps
because rational arithmetic blows up superlinearly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = [
    "MAX_N",
    "MAX_K",
    "MAX_DEGREE",
    "ExactBracket",
    "exact_pq_int",
    "exact_pq_binomial",
    "exact_pascal_residuals",
    "exact_node",
    "exact_weight",
    "exact_weights",
    "exact_identity_residual",
    "exact_polynomial_bracket",
]

MAX_N = 8
MAX_K = 64
MAX_DEGREE = 6


@dataclass(frozen=True)
class ExactBracket:
    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("bracket is empty")

    def contains(self, value: Fraction) -> bool:
        return self.lower <= value <= self.upper

    def width(self) -> Fraction:
        return self.upper - self.lower


def _check_pair(p: Fraction, q: Fraction) -> None:
    if not (0 < q < p <= 1):
        raise ValueError("require 0 < q < p <= 1")


def exact_pq_int(m: int, p: Fraction, q: Fraction) -> Fraction:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return Fraction(0)
    return (p ** m - q ** m) / (p - q)


def exact_pq_binomial(n: int, k: int, p: Fraction, q: Fraction) -> Fraction:
    if not (0 <= k <= n):
        raise ValueError("require 0 <= k <= n")
    num = Fraction(1)
    for j in range(1, k + 1):
        num *= exact_pq_int(n - k + j, p, q) / exact_pq_int(j, p, q)
    return num


def exact_pascal_residuals(
    n: int, k: int, p: Fraction, q: Fraction
) -> tuple[Fraction, Fraction]:
    if not (1 <= k <= n - 1):
        raise ValueError("require 1 <= k <= n-1")
    c = exact_pq_binomial(n, k, p, q)
    left = exact_pq_binomial(n - 1, k - 1, p, q)
    right = exact_pq_binomial(n - 1, k, p, q)
    r1 = abs(c - q ** (n - k) * left - p ** k * right)
    r2 = abs(c - p ** (n - k) * left - q ** k * right)
    return r1, r2


def _check_caps(n: int, k: int) -> None:
    if n < 1 or n > MAX_N:
        raise ValueError(f"oracle supports 1 <= n <= {MAX_N}, got {n}")
    if k < 0 or k > MAX_K:
        raise ValueError(f"oracle supports 0 <= k <= {MAX_K}, got {k}")


def exact_node(n: int, k: int, p: Fraction, q: Fraction) -> Fraction:
    _check_pair(p, q)
    _check_caps(n, k)
    if k == 0:
        return Fraction(0)
    return p ** n * exact_pq_int(k, p, q) / exact_pq_int(n + k, p, q)


def exact_weights(
    n: int, K: int, p: Fraction, q: Fraction, x: Fraction
) -> list[Fraction]:
    """Weights w_0 .. w_K from the defining formula, exactly."""
    _check_pair(p, q)
    _check_caps(n, K)
    if not (0 <= x < 1):
        raise ValueError("x must lie in [0, 1)")
    product = Fraction(1)
    for s in range(n + 1):
        product *= p ** s - q ** s * x
    norm = product / p ** (n * (n + 1) // 2)
    out = []
    for k in range(K + 1):
        out.append(
            exact_pq_binomial(n + k, k, p, q) * x ** k / p ** (k * n) * norm
        )
    return out


def exact_weight(
    n: int, k: int, p: Fraction, q: Fraction, x: Fraction
) -> Fraction:
    return exact_weights(n, k, p, q, x)[-1]


def exact_identity_residual(
    n: int, p: Fraction, q: Fraction, x: Fraction, K: int
) -> Fraction:
    """Exact 1 - sum of the first K+1 weights; nonnegative, decreasing in K."""
    return Fraction(1) - sum(exact_weights(n, K, p, q, x), Fraction(0))


def _poly_range_bound(coeffs: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Crude but sound range of sum c_i t^i on [0,1] via t^i in [0,1]."""
    lo = coeffs[0] if coeffs else Fraction(0)
    hi = lo
    for c in coeffs[1:]:
        if c >= 0:
            hi += c
        else:
            lo += c
    return lo, hi


def exact_polynomial_bracket(
    n: int,
    p: Fraction,
    q: Fraction,
    x: Fraction,
    coeffs: Sequence[Fraction],
    K: int,
) -> ExactBracket:
    """Certified bracket for the operator applied to a polynomial.

    The truncated sum plus the tail mass times a sound range bound of the
    polynomial encloses the full series value.
    """
    if len(coeffs) - 1 > MAX_DEGREE:
        raise ValueError(f"oracle supports degree <= {MAX_DEGREE}")
    ws = exact_weights(n, K, p, q, x)
    partial = Fraction(0)
    for k, w in enumerate(ws):
        t = exact_node(n, k, p, q)
        ft = Fraction(0)
        for c in reversed(coeffs):
            ft = ft * t + c
        partial += w * ft
    tail = Fraction(1) - sum(ws, Fraction(0))
    lo, hi = _poly_range_bound(list(coeffs))
    return ExactBracket(
        lower=partial + tail * min(Fraction(0), lo),
        upper=partial + tail * max(Fraction(0), hi),
    )
