"""Eichler integrals of level-1 cusp forms, truncated with certified tails.

g~(x) = sum_n a_n n^{1-k} e(nx) is 1-periodic on rationals, so it carries a
full-periodicity spec of weight 2-k with trivial twist. Coefficients obey the
Deligne bound |a_n| <= d(n) n^{(k-1)/2}, giving the hard tail estimate
2 (N^{(4-k)/2} 2/(k-4) / 2 + N^{(2-k)/2}) used to certify every truncation.
The default instance is the discriminant form with a_n = tau(n).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from pathlib import Path

from ..engine import TRIVIAL_TWIST, QmfSpec, full_spec
from ..specialfn import ramanujan_tau

__all__ = [
    "deligne_tail",
    "eichler_tilde",
    "eichler_h",
    "eichler_spec",
    "delta_coefficients",
    "delta_spec",
    "load_coefficients",
]

_DELTA_CACHE_N = 100_000
_delta: list[int] = []


def delta_coefficients(n: int | None = None) -> list[int]:
    """tau(1..n); the first call fills the cache to 10^5 regardless of n."""
    global _delta
    need = max(n or 0, _DELTA_CACHE_N)
    if len(_delta) < need:
        _delta = ramanujan_tau(need)
    return _delta if n is None else _delta[:n]


def load_coefficients(path) -> list[int]:
    """Coefficient file: one integer a_n per line, first line is a_1."""
    out = []
    for line in Path(path).read_text().split():
        out.append(int(line))
    if not out:
        raise ValueError(f"no coefficients in {path}")
    return out


def deligne_tail(n_used: int, kform: int) -> float:
    """Bound on |sum_{n>N} a_n n^{1-k} e(nx)| via |a_n| <= 2 sqrt(n) n^{(k-1)/2}."""
    if kform <= 4:
        raise ValueError("tail bound needs kform > 4")
    p = (kform - 2) / 2  # terms bounded by 2 n^{-p}
    return 2.0 * (n_used ** (1 - p) / (p - 1) + float(n_used) ** -p)


def _n_required(kform: int, tol: float) -> int:
    n = 8
    while deligne_tail(n, kform) >= tol:
        n *= 2
        if n > 10_000_000:
            raise ValueError("tolerance unreachable")
    # walk back to the smallest adequate N
    lo, hi = n // 2, n
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if deligne_tail(mid, kform) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def eichler_tilde(coeffs, kform: int, x, tol: float = 1e-9) -> complex:
    """Truncated g~(x) = sum a_n n^{1-k} e(nx) with tail certified below tol.

    Raises when the coefficient list is too short for the requested
    tolerance, quoting the bound the available terms can certify.
    """
    if kform < 12 or kform % 2:
        raise ValueError("kform must be an even integer >= 12")
    x = Fraction(x)
    need = _n_required(kform, tol)
    if len(coeffs) < need:
        have = deligne_tail(len(coeffs), kform) if coeffs else math.inf
        raise ValueError(
            f"need {need} coefficients for tail < {tol}, "
            f"got {len(coeffs)} (certifiable bound {have:.3e})"
        )
    q = x.denominator
    parts = []
    for n in range(1, need + 1):
        phase = cmath.exp(2j * math.pi * ((n * x.numerator) % q) / q)
        parts.append(coeffs[n - 1] * float(n) ** (1 - kform) * phase)
    return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))


def eichler_h(coeffs, kform: int, x, tol: float = 1e-9) -> complex:
    """Period value g~(x) - |x|^{kform-2} g~(-1/x); a polynomial in x of degree <= kform-2."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("h is undefined at 0")
    lead = math.exp((kform - 2) * (math.log(abs(x.numerator)) - math.log(x.denominator)))
    # the |x|^{k-2} factor amplifies the second truncation error
    inner_tol = tol / max(1.0, 2.0 * lead)
    return eichler_tilde(coeffs, kform, x, tol) - lead * eichler_tilde(
        coeffs, kform, Fraction(-x.denominator, x.numerator), inner_tol
    )


def eichler_spec(coeffs, kform: int, tol: float = 1e-9) -> QmfSpec:
    """Full-periodicity spec of weight 2-kform, twist 1, f(0) = sum a_n n^{1-k}."""
    f0 = eichler_tilde(coeffs, kform, Fraction(0), tol)
    return full_spec(
        weight_k=float(2 - kform),
        twist=TRIVIAL_TWIST,
        period_h=lambda t: eichler_h(coeffs, kform, t, tol),
        f0=f0,
        direct_f=lambda x: eichler_tilde(coeffs, kform, x, tol),
        name=f"eichler[k={kform}]",
    )


def delta_spec(tol: float = 1e-9) -> QmfSpec:
    """The discriminant instance: kform = 12, a_n = tau(n)."""
    return eichler_spec(delta_coefficients(), 12, tol)
