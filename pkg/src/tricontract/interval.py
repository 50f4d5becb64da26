"""Outward-rounded interval arithmetic over binary64.

Every operation rounds to nearest and then pushes each endpoint outward.
Addition and subtraction use an error-free TwoSum so that only inexact
endpoints move, by exactly one ulp in the direction of the rounding error.
Products and quotients move one ulp unless a factor is exactly zero.

``exp`` and ``log`` do not call the platform libm.  They reduce the argument
by an interval enclosure of ln 2 (itself produced by an atanh series) and sum
a truncated Taylor/atanh series in interval arithmetic with an explicit
remainder term, so their enclosures are certified by construction.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Callable, NamedTuple, Union

from .errors import DomainError, UnboundedError

__all__ = [
    "Interval",
    "as_interval",
    "iv_arith",
    "iv_elem",
    "iv_predicates",
    "sqrt",
    "log",
    "exp",
    "pow_int",
    "pow_real",
    "LN2",
    "PI_SQUARED",
]

_INF = math.inf
_nextafter = math.nextafter
_isfinite = math.isfinite


def _dn(x: float) -> float:
    return _nextafter(x, -_INF)


def _up(x: float) -> float:
    return _nextafter(x, _INF)


def _add_dn(x: float, y: float) -> float:
    s = x + y
    bb = s - x
    err = (x - (s - bb)) + (y - bb)
    return _dn(s) if err < 0.0 else s


def _add_up(x: float, y: float) -> float:
    s = x + y
    bb = s - x
    err = (x - (s - bb)) + (y - bb)
    return _up(s) if err > 0.0 else s


def _round_dn(p: float, positive: bool) -> float:
    # an underflowed product keeps its sign: 0 already bounds a positive one
    if p == 0.0:
        return 0.0 if positive else -_TINY_POS
    return _dn(p)


def _round_up(p: float, positive: bool) -> float:
    if p == 0.0:
        return _TINY_POS if positive else 0.0
    return _up(p)


_TINY_POS = 5e-324


def _mul_dn(x: float, y: float) -> float:
    if x == 0.0 or y == 0.0:
        return 0.0
    return _round_dn(x * y, (x > 0.0) == (y > 0.0))


def _mul_up(x: float, y: float) -> float:
    if x == 0.0 or y == 0.0:
        return 0.0
    return _round_up(x * y, (x > 0.0) == (y > 0.0))


def _div_dn(x: float, y: float) -> float:
    if x == 0.0:
        return 0.0
    return _round_dn(x / y, (x > 0.0) == (y > 0.0))


def _div_up(x: float, y: float) -> float:
    if x == 0.0:
        return 0.0
    return _round_up(x / y, (x > 0.0) == (y > 0.0))


Number = Union[int, float, Fraction, "Interval"]


class Interval:
    """Closed interval ``[lo, hi]`` with finite binary64 endpoints.

    Instances are treated as immutable.  Plain ``int``, ``float`` and
    ``Fraction`` operands are promoted to the tightest enclosing interval.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if isinstance(lo, Fraction) or isinstance(hi, Fraction):
            raise TypeError("use Interval.from_fraction for rational endpoints")
        lo = float(lo)
        hi = float(hi)
        if not (lo <= hi):
            raise DomainError(f"invalid interval [{lo!r}, {hi!r}]")
        if not (_isfinite(lo) and _isfinite(hi)):
            raise UnboundedError(f"unbounded interval [{lo!r}, {hi!r}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, lo: float, hi: float) -> Interval:
        # trusted constructor for results of the rounding helpers
        if not (_isfinite(lo) and _isfinite(hi)):
            raise UnboundedError(f"unbounded interval [{lo!r}, {hi!r}]")
        obj = object.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    @classmethod
    def from_fraction(cls, q: Fraction) -> Interval:
        f = float(q)
        if not _isfinite(f):
            raise UnboundedError(f"{q} overflows binary64")
        exact = Fraction(f)
        if exact == q:
            return cls._raw(f, f)
        if exact < q:
            return cls._raw(f, _up(f))
        return cls._raw(_dn(f), f)

    @classmethod
    def hull(cls, *values: Number) -> Interval:
        ivs = [as_interval(v) for v in values]
        return cls._raw(min(v.lo for v in ivs), max(v.hi for v in ivs))

    # -- inspection ---------------------------------------------------------

    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    def rad(self) -> float:
        """Upper bound on the radius about :meth:`mid`."""
        c = self.mid()
        return max(_add_up(c, -self.lo), _add_up(self.hi, -c))

    def width(self) -> float:
        return _add_up(self.hi, -self.lo)

    def mag(self) -> float:
        return max(-self.lo, self.hi)

    def mig(self) -> float:
        if self.lo > 0.0:
            return self.lo
        if self.hi < 0.0:
            return -self.hi
        return 0.0

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Fraction):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    def strictly_negative(self) -> bool:
        return self.hi < 0.0

    def strictly_positive(self) -> bool:
        return self.lo > 0.0

    def is_point(self) -> bool:
        return self.lo == self.hi

    def intersect(self, other: Number) -> Interval | None:
        other = as_interval(other)
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval._raw(lo, hi)

    def widened(self, factor: float) -> Interval:
        """Same midpoint, radius scaled by ``factor`` (rounded outward)."""
        c = self.mid()
        r = _mul_up(self.rad(), factor)
        return Interval._raw(_add_dn(c, -r), _add_up(c, r))

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> Interval:
        return Interval._raw(-self.hi, -self.lo)

    def __pos__(self) -> Interval:
        return self

    def __abs__(self) -> Interval:
        lo, hi = self.lo, self.hi
        if lo >= 0.0:
            return self
        if hi <= 0.0:
            return Interval._raw(-hi, -lo)
        return Interval._raw(0.0, max(-lo, hi))

    def __add__(self, other) -> Interval:
        if isinstance(other, float):
            return Interval._raw(_add_dn(self.lo, other), _add_up(self.hi, other))
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Interval._raw(_add_dn(self.lo, other.lo), _add_up(self.hi, other.hi))

    __radd__ = __add__

    def __sub__(self, other) -> Interval:
        if isinstance(other, float):
            return Interval._raw(_add_dn(self.lo, -other), _add_up(self.hi, -other))
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Interval._raw(_add_dn(self.lo, -other.hi), _add_up(self.hi, -other.lo))

    def __rsub__(self, other) -> Interval:
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> Interval:
        if isinstance(other, float):
            if other >= 0.0:
                return Interval._raw(_mul_dn(self.lo, other), _mul_up(self.hi, other))
            return Interval._raw(_mul_dn(self.hi, other), _mul_up(self.lo, other))
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a >= 0.0 and c >= 0.0:
            return Interval._raw(_mul_dn(a, c), _mul_up(b, d))
        lo = min(_mul_dn(a, c), _mul_dn(a, d), _mul_dn(b, c), _mul_dn(b, d))
        hi = max(_mul_up(a, c), _mul_up(a, d), _mul_up(b, c), _mul_up(b, d))
        return Interval._raw(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Interval:
        other = _coerce(other)
        if other is NotImplemented:
            return other
        c, d = other.lo, other.hi
        if c <= 0.0 <= d:
            raise DomainError(f"division by interval containing zero [{c!r}, {d!r}]")
        a, b = self.lo, self.hi
        lo = min(_div_dn(a, c), _div_dn(a, d), _div_dn(b, c), _div_dn(b, d))
        hi = max(_div_up(a, c), _div_up(a, d), _div_up(b, c), _div_up(b, d))
        return Interval._raw(lo, hi)

    def __rtruediv__(self, other) -> Interval:
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n) -> Interval:
        if isinstance(n, numbers.Integral):
            return pow_int(self, int(n))
        return pow_real(self, n)

    # -- misc -----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo:.17g}, {self.hi:.17g}]"

    def __reduce__(self):
        return (Interval, (self.lo, self.hi))


def _coerce(x):
    if isinstance(x, Interval):
        return x
    if isinstance(x, float):
        return Interval._raw(x, x)
    if isinstance(x, numbers.Integral):
        x = int(x)
        if -(2**53) <= x <= 2**53:
            f = float(x)
            return Interval._raw(f, f)
        return Interval.from_fraction(Fraction(x))
    if isinstance(x, Fraction):
        return Interval.from_fraction(x)
    if isinstance(x, numbers.Real):
        f = float(x)
        return Interval._raw(f, f)
    return NotImplemented


def as_interval(x: Number) -> Interval:
    """Promote ``x`` to the tightest :class:`Interval` containing it."""
    iv = _coerce(x)
    if iv is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to Interval")
    return iv


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------


def sqrt(a: Number) -> Interval:
    a = as_interval(a)
    if a.lo < 0.0:
        raise DomainError(f"sqrt of interval with negative part {a}")
    return Interval._raw(_sqrt_dn(a.lo), _sqrt_up(a.hi))


def _sqrt_exact(x: float, r: float) -> bool:
    return Fraction(r) ** 2 == Fraction(x)


def _sqrt_dn(x: float) -> float:
    r = math.sqrt(x)
    if x == 0.0 or _sqrt_exact(x, r):
        return r
    return max(0.0, _dn(r))


def _sqrt_up(x: float) -> float:
    r = math.sqrt(x)
    if x == 0.0 or _sqrt_exact(x, r):
        return r
    return _up(r)


def pow_int(a: Number, n: int) -> Interval:
    """``a**n`` for integer ``n``; even powers of zero-straddling intervals start at 0."""
    a = as_interval(a)
    if n < 0:
        return 1.0 / pow_int(a, -n)
    if n == 0:
        return Interval._raw(1.0, 1.0)
    if n == 1:
        return a
    if a.lo >= 0.0:
        return Interval._raw(_pow_mag_dn(a.lo, n), _pow_mag_up(a.hi, n))
    if a.hi <= 0.0:
        lo_m, hi_m = _pow_mag_dn(-a.hi, n), _pow_mag_up(-a.lo, n)
        if n % 2 == 0:
            return Interval._raw(lo_m, hi_m)
        return Interval._raw(-hi_m, -lo_m)
    if n % 2 == 0:
        return Interval._raw(0.0, _pow_mag_up(max(-a.lo, a.hi), n))
    return Interval._raw(-_pow_mag_up(-a.lo, n), _pow_mag_up(a.hi, n))


def _pow_mag_dn(x: float, n: int) -> float:
    # x >= 0; binary powering keeps every partial product a lower bound
    result, base = 1.0, x
    while n:
        if n & 1:
            result = _mul_dn(result, base)
        n >>= 1
        if n:
            base = _mul_dn(base, base)
    return max(result, 0.0)


def _pow_mag_up(x: float, n: int) -> float:
    result, base = 1.0, x
    while n:
        if n & 1:
            result = _mul_up(result, base)
        n >>= 1
        if n:
            base = _mul_up(base, base)
    return result


def _atanh_series(t: Interval, terms: int) -> Interval:
    """atanh(t) for |t| <= 1/2 as a truncated series plus a remainder ball."""
    tm = t.mag()
    if tm == 0.0:
        return Interval._raw(0.0, 0.0)
    if tm > 0.5:
        raise DomainError("atanh series argument out of range")
    t2 = t * t
    acc = Interval._raw(0.0, 0.0)
    for j in range(terms, -1, -1):
        acc = acc * t2 + Interval(1.0) / (2 * j + 1)
    acc = acc * t
    # sum_{j > terms} |t|^(2j+1)/(2j+1) <= |t|^(2N+3) / ((2N+3)(1-t^2))
    tmi = Interval._raw(tm, tm)
    rem = pow_int(tmi, 2 * terms + 3) / ((2 * terms + 3) * (1.0 - tmi * tmi))
    return acc + Interval._raw(-rem.hi, rem.hi)


def _compute_ln2() -> Interval:
    third = Interval(1.0) / 3
    return 2.0 * _atanh_series(third, 40)


LN2 = _compute_ln2()

# pi^2 = 9.8696044010893586188344909998761511...; the double nearest is
# 9.869604401089358 and the bracket below contains the exact value.
PI_SQUARED = Interval._raw(_dn(9.869604401089358), _up(9.869604401089358))

_SQRT_HALF = 0.7071067811865476


def _log_point(v: float) -> Interval:
    if not v > 0.0:
        raise DomainError(f"log of non-positive value {v!r}")
    frac, e = math.frexp(v)
    if frac < _SQRT_HALF:
        frac *= 2.0
        e -= 1
    t = (Interval._raw(frac, frac) - 1.0) / (Interval._raw(frac, frac) + 1.0)
    return e * LN2 + 2.0 * _atanh_series(t, 18)


def log(a: Number) -> Interval:
    a = as_interval(a)
    if not a.lo > 0.0:
        raise DomainError(f"log of interval with non-positive part {a}")
    return Interval._raw(_log_point(a.lo).lo, _log_point(a.hi).hi)


_EXP_TERMS = 24
_EXP_TERMS_FACT = math.factorial(_EXP_TERMS + 1)
_TINY = _up(0.0)


def _exp_iv(r: Interval) -> Interval:
    """exp on a short interval |r| <= 1/2 via Taylor sum and remainder."""
    acc = Interval._raw(1.0, 1.0)
    for j in range(_EXP_TERMS, 0, -1):
        acc = 1.0 + (r * acc) / j
    rm = r.mag()
    # sum_{j > N} x^j / j! <= 2 x^(N+1) / (N+1)! for x <= 1/2
    bound = pow_int(Interval._raw(rm, rm), _EXP_TERMS + 1) * 2.0 / _EXP_TERMS_FACT
    return acc + Interval._raw(-bound.hi, bound.hi)


def _exp_point(v: float) -> Interval:
    if v == 0.0:
        return Interval._raw(1.0, 1.0)
    if v > 709.0:
        raise UnboundedError(f"exp({v!r}) overflows")
    if v < -744.0:
        return Interval._raw(0.0, _TINY)
    n = round(v / 0.6931471805599453)
    r = Interval._raw(v, v) - n * LN2
    if r.mag() > 0.5:
        raise DomainError("exp argument reduction failed")
    core = _exp_iv(r)
    scale = math.ldexp(1.0, n)
    if scale == 0.0:
        return Interval._raw(0.0, _TINY)
    out = core * scale
    return Interval._raw(max(out.lo, 0.0), out.hi)


def exp(a: Number) -> Interval:
    a = as_interval(a)
    return Interval._raw(_exp_point(a.lo).lo, _exp_point(a.hi).hi)


def pow_real(a: Number, p: Number) -> Interval:
    """``a**p`` for a >= 0 and real p; integer-valued points use :func:`pow_int`."""
    a = as_interval(a)
    if isinstance(p, numbers.Integral):
        return pow_int(a, int(p))
    if isinstance(p, float) and p.is_integer() and abs(p) < 2**31:
        return pow_int(a, int(p))
    p = as_interval(p)
    if p.is_point() and p.lo.is_integer() and abs(p.lo) < 2**31:
        return pow_int(a, int(p.lo))
    if a.lo < 0.0:
        raise DomainError(f"real power of interval with negative part {a}")
    if a.lo == 0.0:
        if p.lo <= 0.0:
            raise DomainError("real power of zero with non-positive exponent")
        if a.hi == 0.0:
            return Interval._raw(0.0, 0.0)
        # x**p is increasing in x for p > 0
        return Interval._raw(0.0, exp(p * log(Interval._raw(a.hi, a.hi))).hi)
    return exp(p * log(a))


# ---------------------------------------------------------------------------
# operation-table front ends
# ---------------------------------------------------------------------------

_ARITH: dict[str, Callable] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, b: -a,
    "abs": lambda a, b: abs(a),
}


def iv_arith(op: str, a: Number, b: Number | None = None) -> Interval:
    """Dispatch a binary or unary arithmetic operation by name."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown interval operation {op!r}") from None
    a = as_interval(a)
    if op in ("neg", "abs"):
        return fn(a, None)
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    return fn(a, as_interval(b))


def iv_elem(fn: str, a: Number, n: int | None = None) -> Interval:
    """Dispatch an elementary function by name: sqrt, ln, exp, pow_int."""
    if fn == "sqrt":
        return sqrt(a)
    if fn in ("ln", "log"):
        return log(a)
    if fn == "exp":
        return exp(a)
    if fn == "pow_int":
        if n is None:
            raise ValueError("pow_int needs an integer exponent")
        return pow_int(a, n)
    raise ValueError(f"unknown elementary function {fn!r}")


class Predicates(NamedTuple):
    strictly_negative: bool
    contains: Callable[[Number], bool]
    mag: float


def iv_predicates(a: Number) -> Predicates:
    a = as_interval(a)
    return Predicates(a.strictly_negative(), a.contains, a.mag())
