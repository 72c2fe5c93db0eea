"""Outward-rounded interval arithmetic on binary64 endpoints.

Every rigorous scalar in this package is an :class:`Interval` ``[lo, hi]``
whose endpoints are IEEE-754 doubles.  The guiding invariant is containment:
each operation returns an interval that contains the exact real image of its
operand intervals.  Directed rounding is realized without touching the FPU
rounding mode: results are computed in round-to-nearest and then adjusted by
one ulp only when an exact error test shows the rounded value lies on the
wrong side.  Addition uses the 2Sum error-free transformation; multiplication,
division and square root fall back to exact rational comparison, which is
cheap at scalar granularity (the vectorized hot paths live in ``ivarray``).

Transcendental enclosures (exp, log, powf, gamma) are built from truncated
series with explicit remainder bounds, evaluated in interval arithmetic, so
no faithful-rounding assumption on libm is needed anywhere.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from typing import Iterable, Union

__all__ = [
    "Interval",
    "IntervalError",
    "DomainError",
    "DivisionByZeroInterval",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "iv_div",
    "iv_sqrt",
    "iv_pow",
    "iv_powf",
    "iv_exp",
    "iv_log",
    "iv_gamma",
    "iv_abs",
    "next_after_up",
    "next_after_down",
    "pi_interval",
    "pi_squared",
    "ln2_interval",
]

_INF = math.inf
_MAXF = sys.float_info.max

Scalar = Union[int, float, Fraction]


class IntervalError(ValueError):
    """Base class for interval arithmetic failures."""


class DomainError(IntervalError):
    """Operand outside the mathematical domain of the operation."""


class DivisionByZeroInterval(IntervalError):
    """Divisor interval contains zero."""


def next_after_up(x: float) -> float:
    """Smallest double strictly greater than ``x`` (0 -> minimal subnormal)."""
    return math.nextafter(x, _INF)


def next_after_down(x: float) -> float:
    """Largest double strictly less than ``x``."""
    return math.nextafter(x, -_INF)


# ---------------------------------------------------------------------------
# directed endpoint arithmetic
# ---------------------------------------------------------------------------

def _two_sum(a: float, b: float):
    # Error-free transformation: a + b = s + e exactly (Knuth), valid when
    # s is finite.  Returns (s, None) on overflow.
    s = a + b
    if math.isinf(s):
        return s, None
    bv = s - a
    av = s - bv
    return s, (a - av) + (b - bv)


def _add_down(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    if e is None:
        return _MAXF if s > 0 else -_INF
    return next_after_down(s) if e < 0.0 else s


def _add_up(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    if e is None:
        return _INF if s > 0 else -_MAXF
    return next_after_up(s) if e > 0.0 else s


def _fr_down(v: Fraction) -> float:
    f = float(v)
    if math.isinf(f):
        return _MAXF if f > 0 else -_INF
    return next_after_down(f) if Fraction(f) > v else f


def _fr_up(v: Fraction) -> float:
    f = float(v)
    if math.isinf(f):
        return _INF if f > 0 else -_MAXF
    return next_after_up(f) if Fraction(f) < v else f


def _mul_down(x: float, y: float) -> float:
    p = x * y
    if math.isinf(p):
        return _MAXF if p > 0 else -_INF
    return next_after_down(p) if Fraction(p) > Fraction(x) * Fraction(y) else p


def _mul_up(x: float, y: float) -> float:
    p = x * y
    if math.isinf(p):
        return _INF if p > 0 else -_MAXF
    return next_after_up(p) if Fraction(p) < Fraction(x) * Fraction(y) else p


def _div_down(x: float, y: float) -> float:
    q = x / y
    if math.isinf(q):
        return _MAXF if q > 0 else -_INF
    return next_after_down(q) if Fraction(q) > Fraction(x) / Fraction(y) else q


def _div_up(x: float, y: float) -> float:
    q = x / y
    if math.isinf(q):
        return _INF if q > 0 else -_MAXF
    return next_after_up(q) if Fraction(q) < Fraction(x) / Fraction(y) else q


def _sqrt_down(x: float) -> float:
    s = math.sqrt(x)
    return next_after_down(s) if Fraction(s) ** 2 > Fraction(x) else s


def _sqrt_up(x: float) -> float:
    s = math.sqrt(x)
    return next_after_up(s) if Fraction(s) ** 2 < Fraction(x) else s


# ---------------------------------------------------------------------------
# the Interval type
# ---------------------------------------------------------------------------

class Interval:
    """Closed interval with outward-rounded binary64 endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise IntervalError("NaN endpoint")
        if lo > hi:
            raise IntervalError(f"inverted endpoints [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- constructors ------------------------------------------------------

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def from_fraction(cls, v: Fraction) -> "Interval":
        return cls(_fr_down(v), _fr_up(v))

    @classmethod
    def coerce(cls, v: "Interval | Scalar") -> "Interval":
        if isinstance(v, Interval):
            return v
        if isinstance(v, Fraction):
            return cls.from_fraction(v)
        if isinstance(v, int) and abs(v) > 2**53:
            return cls.from_fraction(Fraction(v))
        return cls.point(float(v))

    @classmethod
    def hull(cls, items: Iterable["Interval | Scalar"]) -> "Interval":
        ivs = [cls.coerce(v) for v in items]
        if not ivs:
            raise IntervalError("hull of empty collection")
        return cls(min(v.lo for v in ivs), max(v.hi for v in ivs))

    # -- inspection --------------------------------------------------------

    @property
    def width(self) -> float:
        return _add_up(self.hi, -self.lo)

    @property
    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if math.isinf(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def mag(self) -> float:
        """Largest absolute value over the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        """Smallest absolute value over the interval."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, v: Scalar) -> bool:
        if isinstance(v, Fraction):
            return Fraction(self.lo) <= v <= Fraction(self.hi)
        return self.lo <= v <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def strictly_inside(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise IntervalError("empty intersection")
        return Interval(lo, hi)

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Interval)
            and self.lo == other.lo
            and self.hi == other.hi
        )

    def __hash__(self):
        return hash((self.lo, self.hi))

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(_add_down(self.lo, o.lo), _add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        return self + (-Interval.coerce(other))

    def __rsub__(self, other) -> "Interval":
        return Interval.coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        o = Interval.coerce(other)
        pairs = (
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        )
        return Interval(
            min(_mul_down(x, y) for x, y in pairs),
            max(_mul_up(x, y) for x, y in pairs),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = Interval.coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DivisionByZeroInterval(f"division by {o!r}")
        pairs = (
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        )
        return Interval(
            min(_div_down(x, y) for x, y in pairs),
            max(_div_up(x, y) for x, y in pairs),
        )

    def __rtruediv__(self, other) -> "Interval":
        return Interval.coerce(other) / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 0:
            raise DomainError("integer power requires k >= 0")
        if k == 0:
            return Interval(1.0, 1.0)
        flo = Fraction(self.lo)
        fhi = Fraction(self.hi)
        if k % 2 == 1:
            return Interval(_fr_down(flo**k), _fr_up(fhi**k))
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, _fr_up(max(abs(flo), abs(fhi)) ** k))
        lo_m = min(abs(flo), abs(fhi))
        hi_m = max(abs(flo), abs(fhi))
        return Interval(_fr_down(lo_m**k), _fr_up(hi_m**k))

    def abs(self) -> "Interval":
        return Interval(self.mig, self.mag)

    __abs__ = abs

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainError(f"sqrt of {self!r}")
        return Interval(_sqrt_down(self.lo), _sqrt_up(self.hi))


# ---------------------------------------------------------------------------
# spec-named operation aliases
# ---------------------------------------------------------------------------

def iv_add(a: Interval, b: Interval) -> Interval:
    return Interval.coerce(a) + b


def iv_sub(a: Interval, b: Interval) -> Interval:
    return Interval.coerce(a) - b


def iv_mul(a: Interval, b: Interval) -> Interval:
    return Interval.coerce(a) * b


def iv_div(a: Interval, b: Interval) -> Interval:
    return Interval.coerce(a) / b


def iv_sqrt(a: Interval) -> Interval:
    return Interval.coerce(a).sqrt()


def iv_pow(a: Interval, k: int) -> Interval:
    return Interval.coerce(a) ** k


def iv_abs(a: Interval) -> Interval:
    return Interval.coerce(a).abs()


# ---------------------------------------------------------------------------
# verified constants: pi and ln 2 from exact rational series
# ---------------------------------------------------------------------------

def _atan_inv_bounds(q: int, terms: int) -> tuple[Fraction, Fraction]:
    # arctan(1/q) for integer q >= 2 via the alternating Gregory series.
    # Partial sums are exact rationals; the remainder is bounded by the
    # first omitted term.
    s = Fraction(0)
    q2 = q * q
    power = Fraction(1, q)
    for j in range(terms):
        term = power / (2 * j + 1)
        s += term if j % 2 == 0 else -term
        power /= q2
    rem = power / (2 * terms + 1)
    return s - rem, s + rem


def _atanh_inv_bounds(q: int, terms: int) -> tuple[Fraction, Fraction]:
    # artanh(1/q) for integer q >= 2; positive series with geometric tail.
    s = Fraction(0)
    q2 = q * q
    power = Fraction(1, q)
    for j in range(terms):
        s += power / (2 * j + 1)
        power /= q2
    tail = power / ((2 * terms + 1) * (1 - Fraction(1, q2)))
    return s, s + tail


_PI_CACHE: Interval | None = None
_LN2_CACHE: Interval | None = None


def pi_interval() -> Interval:
    """Tight enclosure of pi (Machin's formula with rational tail bounds)."""
    global _PI_CACHE
    if _PI_CACHE is None:
        a_lo, a_hi = _atan_inv_bounds(5, 30)
        b_lo, b_hi = _atan_inv_bounds(239, 12)
        lo = 16 * a_lo - 4 * b_hi
        hi = 16 * a_hi - 4 * b_lo
        _PI_CACHE = Interval(_fr_down(lo), _fr_up(hi))
    return _PI_CACHE


def pi_squared() -> Interval:
    p = pi_interval()
    return p * p


def ln2_interval() -> Interval:
    """Tight enclosure of ln 2 = 2 artanh(1/3)."""
    global _LN2_CACHE
    if _LN2_CACHE is None:
        lo, hi = _atanh_inv_bounds(3, 24)
        _LN2_CACHE = Interval(_fr_down(2 * lo), _fr_up(2 * hi))
    return _LN2_CACHE


# ---------------------------------------------------------------------------
# exp / log / real powers
# ---------------------------------------------------------------------------

def _exp_point(x: float) -> Interval:
    # exp(x) = 2^k exp(r) with r = x - k ln2, |r| <= 0.36; Taylor series with
    # an explicit geometric remainder bound, all in interval arithmetic.
    if x == 0.0:
        return Interval(1.0, 1.0)
    k = int(round(x / 0.6931471805599453))
    r = Interval.point(x) - ln2_interval() * k
    n_terms = 18
    s = Interval(1.0, 1.0)
    term = Interval(1.0, 1.0)
    for n in range(1, n_terms + 1):
        term = term * r / n
        s = s + term
    # |R| <= |r|^(N+1)/(N+1)! * 1/(1 - |r|/(N+2))
    rm = abs(r).hi
    rem_hi = rm ** (n_terms + 1) / math.factorial(n_terms + 1) / (1 - rm / (n_terms + 2))
    rem_hi = next_after_up(next_after_up(rem_hi) * (1 + 1e-12))
    s = s + Interval(-rem_hi, rem_hi)
    lo = math.ldexp(s.lo, k)
    hi = math.ldexp(s.hi, k)
    if lo == 0.0 and s.lo > 0.0:
        lo = 0.0  # underflow: 0 is a valid lower bound for a positive value
    if math.isinf(hi):
        hi = _INF
    return Interval(lo, hi)


def iv_exp(a: Interval) -> Interval:
    a = Interval.coerce(a)
    return Interval(_exp_point(a.lo).lo, _exp_point(a.hi).hi)


def _log_point(x: float) -> Interval:
    # ln(x) = e ln2 + 2 artanh(t), t = (m-1)/(m+1), x = m 2^e, m in [0.5, 1).
    if x <= 0.0:
        raise DomainError("log of nonpositive number")
    if x == 1.0:
        return Interval(0.0, 0.0)
    m, e = math.frexp(x)
    t = (Interval.point(m) - 1.0) / (Interval.point(m) + 1.0)
    n_terms = 30
    s = Interval(0.0, 0.0)
    t2 = t * t
    power = t
    for j in range(n_terms):
        s = s + power / (2 * j + 1)
        power = power * t2
    tm = abs(t).hi
    rem_hi = tm ** (2 * n_terms + 1) / (2 * n_terms + 1) / (1 - tm * tm)
    rem_hi = next_after_up(next_after_up(rem_hi) * (1 + 1e-12))
    return 2.0 * (s + Interval(-rem_hi, rem_hi)) + ln2_interval() * e


def iv_log(a: Interval) -> Interval:
    a = Interval.coerce(a)
    if a.lo <= 0.0:
        raise DomainError(f"log of {a!r}")
    return Interval(_log_point(a.lo).lo, _log_point(a.hi).hi)


def iv_powf(a: Interval, e: Interval | Scalar) -> Interval:
    """Real power a**e = exp(e log a), requiring a > 0."""
    a = Interval.coerce(a)
    if a.lo <= 0.0:
        raise DomainError(f"powf base must be positive, got {a!r}")
    return iv_exp(Interval.coerce(e) * iv_log(a))


# ---------------------------------------------------------------------------
# gamma function
# ---------------------------------------------------------------------------
#
# Kernel on [1, 2]: the Taylor expansion of log Gamma about 3/2,
#
#   log Gamma(3/2 + s) = log Gamma(3/2) + psi(3/2) s
#                        + sum_{k>=2} (-1)^k zeta(k, 3/2) s^k / k,
#
# valid for |s| <= 1/2, with zeta(k, 3/2) <= 2 (2/3)^k so the truncation tail
# after K terms is below 3 (1/3)^(K+1)/(K+1).  The coefficients are enclosed
# by exact rational brackets: zeta(k) through the Euler-Maclaurin expansion,
# whose consecutive truncations straddle the limit because x -> x^(-k) is
# completely monotone (Knopp), and the Euler constant likewise through the
# enveloping expansion of H_n - log n.  Arguments outside [1, 2] are shifted
# with Gamma(x+1) = x Gamma(x); wide arguments are subdivided and hulled.

_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
)


def _zeta_bracket(k: int) -> tuple[Fraction, Fraction]:
    # Riemann zeta(k), k >= 2, via Euler-Maclaurin at J = 20 with the
    # enveloping property: consecutive truncations bracket the true value.
    J = 20
    s = sum(Fraction(1, j**k) for j in range(1, J))
    s += Fraction(1, (k - 1) * J ** (k - 1)) + Fraction(1, 2 * J**k)
    partials = [s]
    for m, b2m in enumerate(_BERNOULLI, start=1):
        # term_m = B_{2m}/(2m)! * k(k+1)...(k+2m-2) * J^{-(k+2m-1)}
        rising = Fraction(1)
        for i in range(2 * m - 1):
            rising *= k + i
        term = b2m / math.factorial(2 * m) * rising / J ** (k + 2 * m - 1)
        s += term
        partials.append(s)
    lo = min(partials[-1], partials[-2])
    hi = max(partials[-1], partials[-2])
    return lo, hi


def _zeta_32_bracket(k: int) -> tuple[Fraction, Fraction]:
    # Hurwitz zeta(k, 3/2) = (2^k - 1) zeta(k) - 2^k.
    z_lo, z_hi = _zeta_bracket(k)
    p = 2**k
    return (p - 1) * z_lo - p, (p - 1) * z_hi - p


_EULER_GAMMA: Interval | None = None


def euler_gamma_interval() -> Interval:
    """Enclosure of the Euler-Mascheroni constant."""
    global _EULER_GAMMA
    if _EULER_GAMMA is None:
        n = 40
        h = sum(Fraction(1, j) for j in range(1, n + 1))
        s = Interval.from_fraction(h) - _log_point(float(n))
        s = s - Interval.from_fraction(Fraction(1, 2 * n))
        partials = [s]
        for m, b2m in enumerate(_BERNOULLI[:4], start=1):
            s = s + Interval.from_fraction(b2m / (2 * m * Fraction(n) ** (2 * m)))
            partials.append(s)
        _EULER_GAMMA = Interval(
            min(partials[-1].lo, partials[-2].lo),
            max(partials[-1].hi, partials[-2].hi),
        )
    return _EULER_GAMMA


_LNGAMMA_COEFFS: list[Interval] | None = None
_LNGAMMA_ORDER = 40
_LNGAMMA_BASE: Interval | None = None
_LNGAMMA_SLOPE: Interval | None = None
_LNGAMMA_TAIL: float | None = None


def _lngamma_setup():
    global _LNGAMMA_COEFFS, _LNGAMMA_BASE, _LNGAMMA_SLOPE, _LNGAMMA_TAIL
    if _LNGAMMA_COEFFS is not None:
        return
    coeffs = [Interval(0.0), Interval(0.0)]
    for k in range(2, _LNGAMMA_ORDER + 1):
        z_lo, z_hi = _zeta_32_bracket(k)
        if k % 2 == 1:
            z_lo, z_hi = -z_hi, -z_lo
        coeffs.append(Interval(_fr_down(z_lo / k), _fr_up(z_hi / k)))
    _LNGAMMA_COEFFS = coeffs
    # log Gamma(3/2) = log(pi)/2 - log 2, psi(3/2) = 2 - gamma - 2 log 2
    _LNGAMMA_BASE = iv_log(pi_interval()) / 2 - ln2_interval()
    _LNGAMMA_SLOPE = (
        Interval(2.0) - euler_gamma_interval() - 2.0 * ln2_interval()
    )
    K = _LNGAMMA_ORDER
    tail = 3 * Fraction(1, 3) ** (K + 1) / (K + 1)
    _LNGAMMA_TAIL = _fr_up(tail)


def _gamma_kernel(x: Interval) -> Interval:
    # Gamma on an interval contained in [1, 2].
    _lngamma_setup()
    s = x - 1.5
    total = _LNGAMMA_BASE + _LNGAMMA_SLOPE * s
    p = s * s
    for k in range(2, _LNGAMMA_ORDER + 1):
        total = total + _LNGAMMA_COEFFS[k] * p
        p = p * s
    total = total + Interval(-_LNGAMMA_TAIL, _LNGAMMA_TAIL)
    return iv_exp(total)


def _gamma_piece(x: Interval) -> Interval:
    # Gamma on an interval that does not straddle an integer boundary
    # outside [1, 2]: shift into [1, 2] with Gamma(x+1) = x Gamma(x).
    if x.lo >= 1.0 and x.hi <= 2.0:
        return _gamma_kernel(x)
    if x.lo >= 2.0:
        return (x - 1.0) * _gamma_piece(x - 1.0)
    # now x.hi <= 1, x.lo > 0
    return _gamma_piece(x + 1.0) / x


def iv_gamma(a: Interval) -> Interval:
    """Enclosure of the gamma function for positive interval arguments.

    The argument is split at integer boundaries (the shift identity
    Gamma(x+1) = x Gamma(x) is applied piecewise) and wide arguments are
    subdivided so the kernel only sees narrow inputs; the result is the hull
    over all pieces.
    """
    a = Interval.coerce(a)
    if a.lo <= 0.0:
        raise DomainError(f"gamma requires positive argument, got {a!r}")
    cuts = [a.lo]
    k = math.floor(a.lo) + 1
    while k < a.hi:
        cuts.append(float(k))
        k += 1
    cuts.append(a.hi)
    pieces = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if lo > hi:
            continue
        n_sub = max(1, min(32, int(math.ceil((hi - lo) / 0.0625))))
        step = (hi - lo) / n_sub
        for i in range(n_sub):
            plo = lo if i == 0 else lo + i * step
            phi = hi if i == n_sub - 1 else lo + (i + 1) * step
            pieces.append(_gamma_piece(Interval(plo, max(plo, phi))))
    return Interval.hull(pieces)
