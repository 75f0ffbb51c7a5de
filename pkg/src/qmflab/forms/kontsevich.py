"""Kontsevich's function phi and its weight-3/2 quantum modular structure.

phi(x) = e(x/24) sum_{m=0}^{q-1} prod_{n<=m} (1 - e(n x)) terminates at every
rational (the product vanishes once q | n) and satisfies full twisted
periodicity phi(x+1) = e(1/24) phi(x). The running products can peak hundreds
of orders of magnitude above the final sum -- the terms cancel almost
completely -- so every evaluation tracks its own peak magnitude and reruns in
mpmath with enough digits whenever binary64 cannot certify the target
accuracy.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from ..cfcore import bar_invert, sigma_phase
from ..engine import QmfSpec, RootOfUnity, full_spec

__all__ = [
    "TWIST24",
    "kontsevich_phi",
    "kontsevich_phistar",
    "kontsevich_h",
    "kontsevich_spec",
    "kontsevich_scan",
]

TWIST24 = RootOfUnity(1, 24)

_EPS = 2.2e-16
_ABS_TARGET = 1e-9


@lru_cache(maxsize=32)
def _roots(q: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(q) / q)


def _sum_products_f64(b: int, q: int) -> tuple[complex, float]:
    """Binary64 pass: (sum of running products, error estimate).

    The estimate q*eps*max|P_m| models the relative error the cumulative
    product has accumulated by its peak; overflow shows up as inf and is
    handled by the caller like any other failed certificate.
    """
    idx = np.arange(1, q, dtype=np.int64) * b % q
    factors = 1.0 - _roots(q)[idx]
    with np.errstate(over="ignore", invalid="ignore"):
        cum = np.cumprod(factors)
        total = 1.0 + cum.sum()
        peak = float(np.abs(cum).max())
    if not (math.isfinite(peak) and math.isfinite(abs(total))):
        return complex(total), math.inf
    return complex(total), q * _EPS * max(peak, 1.0)


def _log_peak(b: int, q: int) -> float:
    """max_m ln|P_m| computed without overflow (|1 - e(t)| = 2|sin(pi t)|)."""
    idx = np.arange(1, q, dtype=np.int64) * b % q
    logs = np.log(2.0 * np.abs(np.sin(np.pi * idx / q)))
    return float(max(np.log1p(0.0), logs.cumsum().max()))


def _dps_for(log_peak: float) -> int:
    return max(30, int(log_peak / math.log(10)) + 25)


def _sum_products_mp(b: int, q: int, dps: int, roots=None) -> complex:
    """Exact-angle mpmath rerun of the running-product sum at dps digits."""
    with mp.workdps(dps):
        if roots is None:
            roots = [mp.expjpi(mp.mpf(2 * r) / q) for r in range(q)]
        P = mp.mpc(1)
        S = mp.mpc(1)
        r = 0
        for _ in range(1, q):
            r = (r + b) % q
            P *= 1 - roots[r]
            S += P
        return complex(S)


def _phase24(x: Fraction) -> complex:
    # e(x/24) at exact rational argument, reduced mod 1 before float conversion
    t = (x / 24) % 1
    return cmath.exp(2j * math.pi * float(t))


@lru_cache(maxsize=4096)
def _phi_reduced(b: int, q: int) -> complex:
    total, err = _sum_products_f64(b, q)
    if err > _ABS_TARGET * max(1.0, abs(total)):
        total = _sum_products_mp(b, q, _dps_for(_log_peak(b, q)))
    return total


def kontsevich_phi(x) -> complex:
    """phi(x), exact finite sum with adaptive working precision."""
    x = Fraction(x)
    q = x.denominator
    b = x.numerator % q if q > 1 else 0
    if q == 1:
        return _phase24(x)
    return _phase24(x) * _phi_reduced(b, q)


def kontsevich_h(x: Fraction) -> complex:
    """Period function from the relation phi(x) - e(sgn(x)/8)|x|^{-3/2} phi(-1/x)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("h is undefined at 0")
    lead = TWIST24.power(3 if x > 0 else -3)
    scale = math.exp(-1.5 * (math.log(abs(x.numerator)) - math.log(x.denominator)))
    return kontsevich_phi(x) - lead * scale * kontsevich_phi(Fraction(-x.denominator, x.numerator))


def kontsevich_spec() -> QmfSpec:
    """Full-periodicity spec: weight 3/2, twist e(1/24), f(0) = 1."""
    return full_spec(
        weight_k=1.5,
        twist=TWIST24,
        period_h=kontsevich_h,
        f0=1.0 + 0j,
        direct_f=kontsevich_phi,
        name="kontsevich",
    )


def kontsevich_phistar(x: Fraction) -> complex:
    """Normalized reversal e(-sigma(x)/24) den(x)^{-3/2} phi(xbar) on (0, 1]."""
    x = Fraction(x)
    if not 0 < x <= 1:
        raise ValueError(f"requires 0 < x <= 1, got {x}")
    q = x.denominator
    phase = TWIST24.power(-sigma_phase(x))
    return phase * q**-1.5 * kontsevich_phi(bar_invert(x))


def kontsevich_scan(q: int, residues=None) -> np.ndarray:
    """phi(b/q) for each residue b coprime to q, adaptive precision per residue.

    Heavy residues (those whose running product peaks too high for binary64)
    are reevaluated in mpmath, sharing root-of-unity tables across residues
    in matching precision buckets.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    if residues is None:
        residues = [b for b in range(1, q) if math.gcd(b, q) == 1]
    out = np.empty(len(residues), dtype=np.complex128)
    heavy: list[tuple[int, int, int]] = []  # (position, residue, dps)
    for i, b in enumerate(residues):
        bb = int(b) % q
        if math.gcd(bb, q) != 1:
            raise ValueError("all residues must be coprime to q")
        total, err = _sum_products_f64(bb, q)
        if err > _ABS_TARGET * max(1.0, abs(total)):
            heavy.append((i, bb, _dps_for(_log_peak(bb, q))))
            continue
        out[i] = total
    # precision buckets: shared exact root tables amortize the expjpi cost
    buckets: dict[int, list[tuple[int, int]]] = {}
    for i, bb, dps in heavy:
        cap = 30
        while cap < dps:
            cap *= 2
        buckets.setdefault(cap, []).append((i, bb))
    for cap, members in sorted(buckets.items()):
        with mp.workdps(cap):
            roots = [mp.expjpi(mp.mpf(2 * r) / q) for r in range(q)]
            for i, bb in members:
                out[i] = _sum_products_mp(bb, q, cap, roots=roots)
    phases = np.array([_phase24(Fraction(int(b), q)) for b in residues])
    return phases * out
