"""Exact continued-fraction kernel.

Continued-fraction expansions and their odd-length normal form, Gauss-map
orbits with backward denominators, continuants, the modular-inverse bar
involution, Dedekind sums, the sigma phase, and membership in the
bounded-quotient sets T(B).

Everything in this module is exact integer/rational arithmetic; the only
floating point is the bound max(B, j*ln(j)^2) in `in_frak_T`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction


@dataclass(frozen=True)
class CFExpansion:
    """Finite continued fraction b0 + 1/(b1 + 1/(... + 1/br)).

    `canonical` marks the Euclid normal form (b_r != 1 unless r <= 1); the
    odd-length form produced by `cf_odd` may end in a deliberate trailing 1.
    """

    b0: int
    quotients: tuple[int, ...]
    canonical: bool = True

    def __post_init__(self):
        if any(b < 1 for b in self.quotients):
            raise ValueError("partial quotients must be >= 1")

    @property
    def length(self) -> int:
        return len(self.quotients)


def reduce(p: int, q: int) -> Fraction:
    """Reduced fraction p/q with positive denominator."""
    return Fraction(p, q)


def cf_value(cf: CFExpansion) -> Fraction:
    """Exact rational value of a finite continued fraction."""
    t = Fraction(0)
    for b in reversed(cf.quotients):
        t = Fraction(1, b + t)
    return cf.b0 + t


def cf_expand(x: Fraction) -> CFExpansion:
    """Canonical expansion [b0; b1, ..., br] by Euclid's algorithm.

    The length r is minimal: it is the least r with T^r({x}) = 0, and the
    last quotient is never 1 when r > 1.
    """
    b0 = math.floor(x)
    y = x - b0
    p, q = y.numerator, y.denominator
    quotients = []
    while p:
        b, rem = divmod(q, p)
        quotients.append(b)
        p, q = rem, p
    return CFExpansion(b0, tuple(quotients))


def cf_odd(x: Fraction) -> CFExpansion:
    """Odd-length expansion [0; b1, ..., br] of x in (0, 1], r odd.

    Uses the rewrite [..., b] <-> [..., b-1, 1] on the canonical form when
    its length is even; x = 1 is represented as [0; 1].
    """
    if not 0 < x <= 1:
        raise ValueError(f"cf_odd requires 0 < x <= 1, got {x}")
    if x == 1:
        return CFExpansion(0, (1,), canonical=False)
    cf = cf_expand(x)
    if len(cf.quotients) % 2 == 1:
        return cf
    qs = cf.quotients
    return CFExpansion(0, qs[:-1] + (qs[-1] - 1, 1), canonical=False)


def gauss_T(x: Fraction) -> Fraction:
    """One Gauss-map step T(x) = {1/x} for x in (0, 1), exactly."""
    return Fraction(x.denominator % x.numerator, x.numerator)


def gauss_orbit(x: Fraction) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    """Backward denominators u_0..u_r and the orbit T(x), ..., T^r(x) = 0.

    The iterates satisfy T^j(x) = u_{j+1}/u_j with u_0 = den(x), u_r = 1,
    and u strictly decreasing.
    """
    if not 0 < x < 1:
        raise ValueError(f"gauss_orbit requires 0 < x < 1, got {x}")
    u = [x.denominator, x.numerator]
    orbit = []
    y = x
    while y.numerator:
        y = gauss_T(y)
        orbit.append(y)
        if y.numerator:
            u.append(y.numerator)
    return tuple(u), tuple(orbit)


def backward_denominators(cf: CFExpansion) -> tuple[int, ...]:
    """u_0..u_r for the fractional part [0; b1..br]; u_j = den([0; b_{j+1}..b_r])."""
    u = [1]
    prev = 0
    for b in reversed(cf.quotients):
        u.append(b * u[-1] + prev)
        prev = u[-2]
    return tuple(reversed(u))


def continuants(cf: CFExpansion) -> tuple[int, ...]:
    """Continuant sequence v_0 = 1, v_j = b_j v_{j-1} + v_{j-2}; v_r = den(value)."""
    v = [1]
    prev, cur = 0, 1
    for b in cf.quotients:
        prev, cur = cur, b * cur + prev
        v.append(cur)
    return tuple(v)


def bar_invert(x: Fraction) -> Fraction:
    """The involution a/q -> abar/q with a*abar = 1 (mod q), abar in (0, q].

    Equals the value of the reversed quotient list for odd-length
    expansions. Convention at q = 1: the inverse of 1/1 is 1/1.
    """
    if not 0 < x <= 1:
        raise ValueError(f"bar_invert requires 0 < x <= 1, got {x}")
    q = x.denominator
    if q == 1:
        return Fraction(1)
    return Fraction(pow(x.numerator, -1, q), q)


def dedekind_sum(x: Fraction) -> Fraction:
    """Classical Dedekind sum s(b, q) = sum_m ((m/q))((mb/q)), exactly.

    Computed by the reciprocity recursion (O(log q) exact steps), which
    agrees with the O(q) sawtooth definition.
    """
    q = x.denominator
    b = x.numerator % q if q > 1 else 0
    return _dedekind(b, q)


def _dedekind(b: int, q: int) -> Fraction:
    # invariant: 0 <= b < q, gcd(b, q) = 1; empty sum when q = 1
    if b == 0:
        return Fraction(0)
    rec = Fraction(-1, 4) + (Fraction(b, q) + Fraction(q, b) + Fraction(1, b * q)) / 12
    return rec - _dedekind(q % b, b)


def sigma_phase(x: Fraction) -> int:
    """sigma(x) = 3 + sum_j (-1)^j b_j over the odd-length expansion of x.

    Satisfies sigma(x) = x + xbar - 12 s(x) exactly and is invariant under
    the bar involution.
    """
    cf = cf_odd(x)
    return 3 + sum(-b if j % 2 else b for j, b in enumerate(cf.quotients, start=1))


def in_frak_T(cf: CFExpansion, B: float) -> bool:
    """True iff b_j <= max(B, j*(ln j)^2) for every quotient.

    The j = 1 term reads max(B, 0) = B. Natural logarithm.
    """
    for j, b in enumerate(cf.quotients, start=1):
        bound = B if j == 1 else max(B, j * math.log(j) ** 2)
        if b > bound:
            return False
    return True
