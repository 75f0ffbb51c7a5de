"""Generic quantum-modular-form evaluation engine.

A form is described by a QmfSpec: complex weight k, root-of-unity twist
theta, a period-function handle h, the periodicity mode, and base values.
The engine evaluates f at rationals by the iterated reciprocity expansion
along the Gauss orbit, evaluates the dual functional Psi along continuants,
and computes the two real-line extensions:

* ext_neg (Re k < 0): limit of f along the convergents of a quotient stream;
* ext_pos (Re k > 0): the dual series sum_j theta_j^{-1} v_j^{-k}
  h((-1)^{j-1} v_{j-1}/v_j) plus a constant term.

Twist bookkeeping uses exact integer exponent arithmetic mod N throughout;
only the final root-of-unity powers are floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .cfcore import (
    CFExpansion,
    backward_denominators,
    cf_expand,
    cf_odd,
    continuants,
)


@dataclass(frozen=True)
class RootOfUnity:
    """theta = e(t/N) with e(z) = exp(2*pi*i*z); exponent arithmetic stays in Z/N."""

    t: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        object.__setattr__(self, "t", self.t % self.N)

    def power(self, e: int) -> complex:
        """theta^e as a complex number, with the angle reduced exactly first."""
        r = (self.t * e) % self.N
        if r == 0:
            return 1.0 + 0.0j
        return cmath.exp(2j * math.pi * (r / self.N))

    @property
    def is_trivial(self) -> bool:
        return self.t == 0


TRIVIAL_TWIST = RootOfUnity(0, 1)


@dataclass(frozen=True)
class QmfSpec:
    """One quantum modular form, as consumed by the engine.

    For full periodicity the stored base values all equal f(0); the engine
    derives f(+-1) = theta^{+-1} f(0) where needed. For weak periodicity
    base_plus = f(1) and base_minus = f(-1) are independent data and
    base_zero is the (conventional) value at 0.

    direct_f, when given, is a native evaluator for f at rationals; ext_neg
    prefers it over the h-chain (the two routes agree by the reciprocity
    tests, and the native route avoids re-deriving f from h at every
    convergent).
    """

    weight_k: complex
    twist: RootOfUnity
    period_h: Callable[[Fraction], complex]
    periodicity: str  # "full" | "weak"
    base_plus: complex
    base_minus: complex
    base_zero: complex = 0j
    direct_f: Optional[Callable[[Fraction], complex]] = None
    name: str = ""

    def __post_init__(self):
        if self.periodicity not in ("full", "weak"):
            raise ValueError("periodicity must be 'full' or 'weak'")


def full_spec(weight_k, twist: RootOfUnity, period_h, f0, direct_f=None, name="") -> QmfSpec:
    f0 = complex(f0)
    return QmfSpec(complex(weight_k), twist, period_h, "full", f0, f0, f0,
                   direct_f=direct_f, name=name)


def weak_spec(weight_k, twist: RootOfUnity, period_h, base_plus, base_minus,
              base_zero=0j, direct_f=None, name="") -> QmfSpec:
    return QmfSpec(complex(weight_k), twist, period_h, "weak", complex(base_plus),
                   complex(base_minus), complex(base_zero), direct_f=direct_f, name=name)


@dataclass(frozen=True)
class ExtResult:
    value: complex
    converged: bool
    depth_used: int
    t_witness: float  # least B with the consumed prefix inside T(B)


def theta_exponent(quotients, twist: RootOfUnity) -> int:
    """Exponent e_j with theta_j = theta^{e_j}: sum_i (-1)^i b_i, plus 3 for odd j.

    Satisfies e_g = e_{g-1} + (-1)^g b_g + 3 (-1)^{g+1} step by step.
    """
    e = sum(-b if i % 2 else b for i, b in enumerate(quotients, start=1))
    if len(quotients) % 2 == 1:
        e += 3
    return e % twist.N


def _csum(parts) -> complex:
    vals = list(parts)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def _pow_ratio(num: int, den: int, k: complex) -> complex:
    # (num/den)^k via the real logarithm; num, den > 0 exact integers
    return cmath.exp(k * (math.log(num) - math.log(den)))


def _abs_pow(x: Fraction, k: complex) -> complex:
    # |x|^k with the real logarithm of |x|
    return cmath.exp(k * (math.log(abs(x.numerator)) - math.log(x.denominator)))


def eval_f_cf(spec: QmfSpec, cf: CFExpansion) -> complex:
    """f on (0, 1) evaluated along a given expansion [0; b_1..b_r].

    f(x) = sum_{j<r} theta_j (u_j/u_0)^{-k} h((-1)^j u_{j+1}/u_j) + trailing,
    with trailing theta_r u_0^k f(0) (full) or
    theta_r theta^{(-1)^{r+1}} u_0^k f((-1)^r) (weak).
    """
    if cf.b0 != 0 or not cf.quotients:
        raise ValueError("eval_f_cf expects an expansion of some x in (0, 1)")
    k = spec.weight_k
    tw = spec.twist
    u = backward_denominators(cf)
    r = len(cf.quotients)
    q = u[0]
    parts = []
    e = 0  # running theta exponent e_j
    for j in range(r):
        theta_j = tw.power(e)
        sign = -1 if j % 2 else 1
        arg = Fraction(sign * u[j + 1], u[j])
        parts.append(theta_j * _pow_ratio(u[j], q, -k) * complex(spec.period_h(arg)))
        g = j + 1
        b = cf.quotients[j]
        e += (b if g % 2 == 0 else -b) + (3 if g % 2 == 1 else -3)
    # e now equals the exponent of theta_r
    qk = cmath.exp(k * math.log(q))
    if spec.periodicity == "full":
        parts.append(tw.power(e) * qk * spec.base_zero)
    else:
        if r % 2 == 1:
            parts.append(tw.power(e + 1) * qk * spec.base_minus)
        else:
            parts.append(tw.power(e - 1) * qk * spec.base_plus)
    return _csum(parts)


def eval_f(spec: QmfSpec, x: Fraction) -> complex:
    """f at any rational, reduced into the unit interval by the periodicity.

    Full mode: f(x) = theta^m f({x}). Weak mode: positive x shift down into
    (0, 1], negative x shift up into [-1, 0), and the (-1, 0) strip is
    resolved through one application of the reciprocity relation
    f(y) = h(y) + theta^{-3} |y|^{-k} f(-1/y) with -1/y > 1.
    """
    x = Fraction(x)
    tw = spec.twist
    if spec.periodicity == "full":
        m = math.floor(x)
        y = x - m
        if y == 0:
            return tw.power(m) * spec.base_zero
        return tw.power(m) * eval_f_cf(spec, cf_expand(y))
    # weak
    if x == 0:
        return spec.base_zero
    if x > 0:
        m = math.ceil(x) - 1  # y = x - m in (0, 1]
        y = x - m
        if y == 1:
            return tw.power(m) * spec.base_plus
        return tw.power(m) * eval_f_cf(spec, cf_expand(y))
    # x < 0: shift up into [-1, 0)
    m = -1 - math.floor(x) if x != -1 else 0
    y = x + m
    if y == -1:
        return tw.power(-m) * spec.base_minus
    # y in (-1, 0): one reciprocity bounce lands in (1, oo)
    bounce = eval_f(spec, -1 / y)
    return tw.power(-m) * (complex(spec.period_h(y)) + tw.power(-3) * _abs_pow(y, -spec.weight_k) * bounce)


def eval_psi(spec: QmfSpec, y: Fraction) -> complex:
    """Psi(y) = sum_{j=1}^r theta_j^{-1}(y) v_j^{-k} h((-1)^{j-1} v_{j-1}/v_j) + const.

    Constant term: f(0) for full periodicity, theta*f(-1) for weak. Dual to
    eval_f through theta_r^{-1}(x) q^{-k} f(x) = Psi(xbar).
    """
    y = Fraction(y)
    if not 0 < y <= 1:
        raise ValueError("eval_psi requires y in (0, 1]")
    k = spec.weight_k
    tw = spec.twist
    cf = cf_odd(y)
    v = continuants(cf)
    parts = []
    e = 0
    for j in range(1, len(cf.quotients) + 1):
        b = cf.quotients[j - 1]
        e += (b if j % 2 == 0 else -b) + (3 if j % 2 == 1 else -3)
        sign = 1 if (j - 1) % 2 == 0 else -1
        arg = Fraction(sign * v[j - 1], v[j])
        parts.append(tw.power(-e) * cmath.exp(-k * math.log(v[j])) * complex(spec.period_h(arg)))
    if spec.periodicity == "full":
        parts.append(spec.base_zero)
    else:
        parts.append(tw.power(1) * spec.base_minus)
    return _csum(parts)


class _Quotients:
    """Single-pass reader over a stream of partial quotients b_j >= 1."""

    def __init__(self, source: Iterable[int]):
        self._it: Iterator[int] = iter(source)

    def next(self) -> Optional[int]:
        b = next(self._it, None)
        if b is None:
            return None
        b = int(b)
        if b < 1:
            raise ValueError("partial quotients must be >= 1")
        return b


def _witness(quotients) -> float:
    # least B such that the consumed prefix lies in T(B); j = 1 bound is B itself
    w = 1.0
    for j, b in enumerate(quotients, start=1):
        if j == 1 or b > j * math.log(j) ** 2:
            w = max(w, float(b))
    return w


def ext_neg(spec: QmfSpec, stream: Iterable[int], tol: float = 1e-8,
            max_depth: int = 200) -> ExtResult:
    """Extension along convergents: lim_j f(x_j) for Re k < 0.

    Stops once two consecutive successive-difference checks pass (values
    f(x_{j-2}), f(x_{j-1}), f(x_j) pairwise within tol); reports
    non-convergence at max_depth rather than guessing.
    """
    if complex(spec.weight_k).real >= 0:
        raise ValueError("ext_neg requires Re(weight_k) < 0")
    reader = _Quotients(stream)
    evaluate = spec.direct_f if spec.direct_f is not None else (lambda z: eval_f(spec, z))
    p_prev, p_cur = 1, 0  # convergent numerators of [0; b_1..b_j]
    q_prev, q_cur = 0, 1
    consumed = []
    prev_val = None
    stable = 0
    value = complex(spec.base_zero)
    depth = 0
    while depth < max_depth:
        b = reader.next()
        if b is None:
            break
        consumed.append(b)
        p_prev, p_cur = p_cur, b * p_cur + p_prev
        q_prev, q_cur = q_cur, b * q_cur + q_prev
        depth += 1
        value = complex(evaluate(Fraction(p_cur, q_cur)))
        if prev_val is not None:
            stable = stable + 1 if abs(value - prev_val) < tol else 0
            if stable >= 2:
                return ExtResult(value, True, depth, _witness(consumed))
        prev_val = value
    return ExtResult(value, False, depth, _witness(consumed))


def ext_pos(spec: QmfSpec, stream: Iterable[int], tol: float = 1e-8,
            max_depth: int = 400) -> ExtResult:
    """Dual-series extension for Re k > 0 over a quotient stream.

    Partial sums of sum_j theta_j^{-1} v_j^{-k} h((-1)^{j-1} v_{j-1}/v_j)
    plus the constant term. Stops when the sampled-|h| tail bound
    max|h| * min(2^{-Re(k) J/2}, v_J^{-Re k}) / (1 - 2^{-Re k/2}) drops
    below tol (the continuants satisfy v_{J+i} >= v_J 2^{(i-1)/2}), with the
    last term also below tol as a spike guard. A finite stream is summed
    exactly and reported converged.
    """
    k = complex(spec.weight_k)
    if k.real <= 0:
        raise ValueError("ext_pos requires Re(weight_k) > 0")
    tw = spec.twist
    ratio = 2.0 ** (-k.real / 2.0)
    geom = 1.0 / (1.0 - ratio)
    reader = _Quotients(stream)
    const = spec.base_zero if spec.periodicity == "full" else tw.power(1) * spec.base_minus
    parts = [complex(const)]
    v_prev, v_cur = 0, 1
    e = 0
    hmax = 0.0
    consumed = []
    depth = 0
    converged = False
    while depth < max_depth:
        b = reader.next()
        if b is None:
            converged = True  # finite stream: the series is the exact rational value
            break
        consumed.append(b)
        depth += 1
        j = depth
        v_prev, v_cur = v_cur, b * v_cur + v_prev
        e += (b if j % 2 == 0 else -b) + (3 if j % 2 == 1 else -3)
        sign = 1 if (j - 1) % 2 == 0 else -1
        hval = complex(spec.period_h(Fraction(sign * v_prev, v_cur)))
        hmax = max(hmax, abs(hval))
        term = tw.power(-e) * cmath.exp(-k * math.log(v_cur)) * hval
        parts.append(term)
        # v_{j+i} >= v_j 2^{(i-1)/2} anchors the tail at the current continuant
        tail = hmax * min(2.0 ** (-k.real * j / 2.0),
                          math.exp(-k.real * math.log(v_cur))) * geom
        if tail < tol and abs(term) < tol:
            converged = True
            break
    return ExtResult(_csum(parts), converged, depth, _witness(consumed))


def w_eval(j: int, lam: float, g: Callable[[Fraction], complex], x: Fraction) -> complex:
    """w(x) = 1(j <= r(x)) * (prod_{i<j} T^i(x))^lam * g(T^j(x)).

    The Gauss-orbit product telescopes to u_j/u_0 exactly, which gives the
    bound |w| <= 2^{lam(1 - j/2)} sup|g| for free.
    """
    if lam <= 0:
        raise ValueError("w_eval requires lam > 0")
    if not 0 < x < 1:
        raise ValueError("w_eval requires x in (0, 1)")
    cf = cf_expand(x)
    r = len(cf.quotients)
    if j > r:
        return 0j
    u = backward_denominators(cf)
    tj = Fraction(u[j + 1], u[j]) if j < r else Fraction(0)
    factor = math.exp(lam * (math.log(u[j]) - math.log(u[0])))
    return factor * complex(g(tj))
