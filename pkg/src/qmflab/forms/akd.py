"""Quadratic-form averages A_{k,D}: exact rational enumeration per |a|.

A_{k,D}(x) sums Q(x)^k over binary quadratic forms Q = a x^2 + b x + c of
discriminant D with a < 0 and Q(x) > 0. For each |a| the contributing b are
the integers in a window of width 2 sqrt(D) around -2ax subject to
b^2 = D mod 4|a|, and c is determined. Two b-window conventions at the
boundary of that congruence family are exposed: "all" counts every integer b
in the window; "nonneg" restricts to b >= 0 (which is the convention under
which A_{5,5}(0) reproduces sigma_5(1) = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = ["AKD_CONVENTION", "AkdResult", "a_kd"]

# Window convention used by reconciliation checks: the one under which the
# x = 0 enumeration reproduces the odd divisor sums.
AKD_CONVENTION = "nonneg"


@dataclass(frozen=True)
class AkdResult:
    """Truncated value plus the tail bound for the discarded |a| > depth_A."""

    value: float
    tail_bound: float
    terms: int


def _validate(k: int, d: int) -> None:
    if k < 5 or k % 2 == 0:
        raise ValueError("k must be an odd integer >= 5")
    if d <= 0 or d % 4 not in (0, 1):
        raise ValueError("D must be positive and 0 or 1 mod 4")
    r = math.isqrt(d)
    if r * r == d:
        raise ValueError("D must not be a square")


def a_kd(k: int, d: int, x, depth_a: int, convention: str = "all") -> AkdResult:
    """Sum of Q(x)^k over forms with -depth_a <= a <= -1, exact until the final float.

    The tail bound counts at most 2 ceil(sqrt(D)) admissible b per |a| and
    bounds each term by (D/(4|a|))^k.
    """
    _validate(k, d)
    if depth_a < 1:
        raise ValueError("depth_a must be >= 1")
    if convention not in ("all", "nonneg"):
        raise ValueError(f"unknown convention {convention!r}")
    x = Fraction(x)
    sqrt_d = math.isqrt(d)  # floor, exact; D nonsquare so sqrt(D) is irrational
    total = Fraction(0)
    terms = 0
    for abs_a in range(1, depth_a + 1):
        center = 2 * abs_a * x  # b + 2ax = b - 2|a|x, window |b - 2|a|x| < sqrt(D)
        lo = math.floor(center) - sqrt_d
        hi = math.ceil(center) + sqrt_d
        for b in range(lo, hi + 1):
            if convention == "nonneg" and b < 0:
                continue
            if (b * b - d) % (4 * abs_a):
                continue
            s = b - center
            s2 = s * s
            if s2 >= d:
                continue
            q_val = (d - s2) / (4 * abs_a)
            total += q_val**k
            terms += 1
    tail = 0.0
    count_bound = 2 * (sqrt_d + 1)
    for abs_a in range(depth_a + 1, depth_a + 10_000):
        t = count_bound * (d / (4 * abs_a)) ** k
        tail += t
        if t < 1e-18 * max(tail, 1.0):
            break
    return AkdResult(float(total), tail, terms)
