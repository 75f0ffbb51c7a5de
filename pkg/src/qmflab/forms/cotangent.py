"""Twisted cotangent sums c_a and their weak-QMF completion.

The raw sum c_a(b/q) = q^a sum_{m<q} cot(pi m b/q) zeta(-a, m/q) is odd and
1-periodic in b but misses weak periodicity by a rational correction; adding
a*kappa_1(a) den(x)^{1+a} rho(x) yields the completed form c~_a, which is a
weak quantum modular form of weight 1+a with trivial twist. The period
function h_a is exposed only through the reciprocity relation
c~_a(x) - |x|^{-1-a} c~_a(-1/x), so the small-x asymptotics checked in the
tests (kappa_2 sgn(x)|x|^{-1-a} + kappa_1(a)/x plus Bernoulli corrections)
are a genuine cross-validation against independently computed constants.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..engine import TRIVIAL_TWIST, ExtResult, QmfSpec, ext_pos, weak_spec
from ..specialfn import (
    a_kappa1,
    bernoulli,
    digamma,
    digamma_many,
    hurwitz_zeta,
    hurwitz_zeta_many,
    kappa_constants,
)

__all__ = [
    "cotangent_c",
    "cotangent_c_tilde",
    "cotangent_h",
    "cotangent_spec",
    "cotangent_ext_pos",
    "cotangent_scan",
    "coprime_residues",
    "ash_main",
    "ash0_main",
    "ash3_correction",
    "is_positive_odd",
]


_MAX_TABLE_Q = 1 << 23


@lru_cache(maxsize=8)
def _tables(a: complex, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Length-q lookup tables cot(pi j/q) and zeta(-a, j/q), index 0 unused.

    The cotangent table is built on j <= q/2 only and mirrored by
    cot(pi (q-j)/q) = -cot(pi j/q), so the pair (j, q-j) carries exactly
    opposite floats and the oddness of c_a survives rounding unchanged.
    """
    if q > _MAX_TABLE_Q:
        raise ValueError(f"denominator {q} exceeds the table limit {_MAX_TABLE_Q}")
    j = np.arange(1, q // 2 + 1, dtype=np.float64)
    half = 1.0 / np.tan(np.pi * j / q)
    cot = np.zeros(q, dtype=np.float64)
    cot[1 : q // 2 + 1] = half
    ncut = (q - 1) // 2
    cot[q - 1 : q - 1 - ncut : -1] = -half[:ncut]
    if q % 2 == 0:
        cot[q // 2] = 0.0
    full = np.zeros(q, dtype=np.complex128)
    # blockwise: the zeta evaluators keep an O(shift_K x block) work matrix
    for lo in range(1, q, 1 << 16):
        hi = min(lo + (1 << 16), q)
        grid = np.arange(lo, hi, dtype=np.float64) / q
        if a == -1:
            # zeta(1, x) pole: the digamma regularization drops a constant
            # that cancels against sum_m cot(pi m b/q) = 0
            full[lo:hi] = (-digamma_many(grid)).astype(np.complex128)
        else:
            full[lo:hi] = np.asarray(
                hurwitz_zeta_many(-complex(a), grid), dtype=np.complex128
            )
    return cot, full


def coprime_residues(q: int) -> np.ndarray:
    """All b in [1, q) with gcd(b, q) = 1, ascending."""
    b = np.arange(1, q, dtype=np.int64)
    mask = np.array([math.gcd(int(v), q) == 1 for v in b], dtype=bool)
    return b[mask]


def cotangent_c(a, b: int, q: int) -> complex:
    """c_a(b/q) = q^a sum_{m=1}^{q-1} cot(pi m b/q) zeta(-a, m/q).

    The cotangent argument is reduced in exact integers (m*b mod q) before
    any float enters, and the q-1 terms are fsum-compensated.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if math.gcd(b, q) != 1:
        raise ValueError(f"requires gcd(b, q) = 1, got b={b}, q={q}")
    if q == 1:
        return 0j
    cot, zet = _tables(complex(a), q)
    idx = (b % q) * np.arange(1, q, dtype=np.int64) % q
    parts = cot[idx] * zet[1:]
    total = complex(math.fsum(parts.real), math.fsum(parts.imag))
    return cmath.exp(complex(a) * math.log(q)) * total


def cotangent_scan(a, q: int, residues=None) -> np.ndarray:
    """c_a(b/q) for each residue b (default: all b coprime to q), as an array.

    Same terms as cotangent_c, reduced blockwise: numpy pairwise sums within
    m-chunks, chunk totals folded in with Neumaier two-sum compensation, so
    the accumulated error stays a few ulps regardless of q.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    if residues is None:
        residues = coprime_residues(q)
    res = np.asarray(residues, dtype=np.int64) % q
    if np.any(np.gcd(res, q) != 1):
        raise ValueError("all residues must be coprime to q")
    cot, zet = _tables(complex(a), q)
    scale = cmath.exp(complex(a) * math.log(q))
    out = np.empty(len(res), dtype=np.complex128)
    m_all = np.arange(1, q, dtype=np.int64)
    for lo in range(0, len(res), 512):
        block = res[lo : lo + 512]
        acc_re = np.zeros(len(block))
        acc_im = np.zeros(len(block))
        comp_re = np.zeros(len(block))
        comp_im = np.zeros(len(block))
        for mlo in range(0, q - 1, 4096):
            m = m_all[mlo : mlo + 4096]
            idx = block[:, None] * m[None, :] % q
            parts = cot[idx] * zet[m][None, :]
            for acc, comp, s in (
                (acc_re, comp_re, parts.real.sum(axis=1)),
                (acc_im, comp_im, parts.imag.sum(axis=1)),
            ):
                t = acc + s
                big = np.abs(acc) >= np.abs(s)
                comp += np.where(big, (acc - t) + s, (s - t) + acc)
                acc[:] = t
        out[lo : lo + 512] = (acc_re + comp_re) + 1j * (acc_im + comp_im)
    return scale * out


def _rho(x: Fraction) -> Fraction:
    # {bbar/q} with b*bbar = 1 mod q; integers map to the indicator of x > 0
    q = x.denominator
    if q == 1:
        return Fraction(1 if x > 0 else 0)
    return Fraction(pow(x.numerator % q, -1, q), q)


def cotangent_c_tilde(a, x: Fraction) -> complex:
    """Completed sum c~_a(x) = c_a(x) + a kappa_1(a) den(x)^{1+a} rho(x).

    The value at 0 is fixed to 0 (any choice preserves weak periodicity).
    """
    x = Fraction(x)
    if x == 0:
        return 0j
    q = x.denominator
    c = cotangent_c(a, x.numerator, q)
    corr = a_kappa1(a) * cmath.exp((1 + complex(a)) * math.log(q)) * float(_rho(x))
    return c + corr


def cotangent_h(a, x: Fraction) -> complex:
    """Period function from the relation h_a(x) = c~_a(x) - |x|^{-1-a} c~_a(-1/x)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("h_a is undefined at 0")
    minus_inv = Fraction(-x.denominator, x.numerator)
    lead = cmath.exp(-(1 + complex(a)) * (math.log(abs(x.numerator)) - math.log(x.denominator)))
    return cotangent_c_tilde(a, x) - lead * cotangent_c_tilde(a, minus_inv)


def is_positive_odd(a) -> bool:
    """True when a is a positive odd integer (there c_a vanishes identically)."""
    a = complex(a)
    return a.imag == 0 and a.real > 0 and a.real == int(a.real) and int(a.real) % 2 == 1


def cotangent_spec(a) -> QmfSpec:
    """Weak QmfSpec for c~_a: weight 1+a, trivial twist, h from the relation.

    Base values pin the expansion endpoints: c~_a(1) = a kappa_1(a) and
    c~_a(-1) = 0. Re(a) = -1 is excluded (the engine needs Re(k) != 0).
    """
    a = complex(a)
    if a.real == -1:
        raise ValueError("weight 1+a must have nonzero real part")
    return weak_spec(
        weight_k=1 + a,
        twist=TRIVIAL_TWIST,
        period_h=lambda t: cotangent_h(a, t),
        base_plus=a_kappa1(a),
        base_minus=0j,
        base_zero=0j,
        direct_f=lambda x: cotangent_c_tilde(a, x),
        name=f"cot[a={a}]",
    )


class _Recorder:
    """Iterator shim that remembers the partial quotients it hands out."""

    def __init__(self, stream):
        self._it = iter(stream)
        self.seen: list[int] = []

    def __iter__(self):
        return self

    def __next__(self):
        b = next(self._it)
        self.seen.append(b)
        return b


def cotangent_ext_pos(a, stream, tol: float = 1e-8, max_depth: int = 400) -> ExtResult:
    """ext_pos of c~_a along an irrational stream, minus a kappa_1(a) {x}.

    The fractional part {x} is taken from the deepest convergent actually
    consumed, whose distance to x is far below the stopping tolerance.
    """
    a = complex(a)
    if a.real <= -1:
        raise ValueError("requires Re(a) > -1")
    if is_positive_odd(a):
        raise ValueError("c_a vanishes identically for positive odd a")
    rec = _Recorder(stream)
    res = ext_pos(cotangent_spec(a), rec, tol=tol, max_depth=max_depth)
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1
    for b in rec.seen:
        p_prev, p_cur = p_cur, b * p_cur + p_prev
        q_prev, q_cur = q_cur, b * q_cur + q_prev
    frac = p_cur / q_cur
    value = res.value - a_kappa1(a) * frac
    return ExtResult(value, res.converged, res.depth_used, res.t_witness)


# ---------------------------------------------------------------------------
# Small-x asymptotics of h_a, assembled from independent constants.
#

_GAMMA = -digamma(1.0)


def ash_main(a, x: float) -> complex:
    """Leading terms kappa_2(a) sgn(x) |x|^{-1-a} + kappa_1(a)/x (a != 0)."""
    a = complex(a)
    k1, k2 = kappa_constants(a)
    sgn = 1.0 if x > 0 else -1.0
    return k2 * sgn * cmath.exp(-(1 + a) * math.log(abs(x))) + k1 / x


def ash0_main(x: float) -> float:
    """Leading term of h_0: -(log(2 pi |x|) - gamma)/(pi x)."""
    return -(math.log(2 * math.pi * abs(x)) - _GAMMA) / (math.pi * x)


def _zeta_line(s: complex) -> complex:
    # zeta(s); real-axis reflection below the accurate Euler-Maclaurin range
    if s.real >= -1:
        return hurwitz_zeta(s, 1.0)
    if s.imag != 0:
        raise ValueError("reflection path implemented for real s only")
    sr = s.real
    refl = (
        2.0**sr
        * math.pi ** (sr - 1)
        * math.sin(math.pi * sr / 2)
        * math.gamma(1 - sr)
        * hurwitz_zeta(1 - sr, 1.0).real
    )
    return complex(refl)


def ash3_correction(a, x: float, M: int) -> complex:
    """Bernoulli tail sum_{m<=M} (-1)^m 2B_{2m}/(2m)! zeta(1-2m-a) (2 pi x)^{2m-1}.

    Subtracting ash_main and this correction from h_a leaves O(x^{2M+1}).
    """
    a = complex(a)
    parts = []
    for m in range(1, M + 1):
        coeff = (-1) ** m * 2 * float(bernoulli(2 * m)) / math.factorial(2 * m)
        parts.append(coeff * _zeta_line(1 - 2 * m - a) * (2 * math.pi * x) ** (2 * m - 1))
    return sum(parts, start=0j)
