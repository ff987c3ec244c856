"""Midpoint-radius ball arithmetic on top of MPFR, plus the precision policy.

A :class:`Ball` is an arbitrary precision midpoint together with a small
upward-rounded radius.  Every operation returns a ball that contains the
exact result for every pair of inputs contained in the operand balls.
Correctly rounded MPFR operations in the two directed rounding modes are
the only source of rigour: each midpoint operation is evaluated rounded
down and rounded up, and the gap is charged to the radius.
"""

from __future__ import annotations

import math
import enum
from dataclasses import dataclass
from decimal import Decimal, localcontext, ROUND_CEILING, ROUND_HALF_EVEN
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, TypeVar, Union

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import DivisorContainsZero, LogOfNonpositiveBall, PrecisionExhausted

__all__ = [
    "Ball",
    "Sign",
    "PrecisionPolicy",
    "ball_arith",
    "certify_sign",
    "escalate",
    "format_ball",
]

# Radii only need a few significant bits; they are always rounded upward.
RAD_PREC = 30
DEFAULT_PREC = 128

Number = Union[int, Fraction, "Ball"]
T = TypeVar("T")


@lru_cache(maxsize=None)
def _ctx(prec: int, rnd: int) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=rnd)


def _up(prec: int) -> gmpy2.context:
    return _ctx(prec, gmpy2.RoundUp)


def _down(prec: int) -> gmpy2.context:
    return _ctx(prec, gmpy2.RoundDown)


_RU = _ctx(RAD_PREC, gmpy2.RoundUp)
_RD = _ctx(RAD_PREC, gmpy2.RoundDown)
_ZERO = mpfr(0)


class Sign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO_UNRESOLVED = "zero_unresolved"
    EXACTLY_ZERO = "exactly_zero"


def _ru_abs(x: mpfr) -> mpfr:
    return _RU.abs(x)


def _rd_abs(x: mpfr) -> mpfr:
    return _RD.abs(x)


def _neg(x: mpfr) -> mpfr:
    return _ctx(max(x.precision, 2), gmpy2.RoundDown).minus(x)


def _gap(lo: mpfr, hi: mpfr) -> mpfr:
    """Upper bound for ``hi - lo`` at radius precision."""
    if lo == hi:
        return _ZERO
    return _RU.sub(hi, lo)


@dataclass(frozen=True, slots=True)
class Ball:
    """Closed interval ``[mid - rad, mid + rad]`` at a working precision."""

    mid: mpfr
    rad: mpfr
    prec: int = DEFAULT_PREC

    def __post_init__(self) -> None:
        if self.rad < 0 or gmpy2.is_nan(self.rad):
            raise ValueError("ball radius must be nonnegative")
        if not gmpy2.is_finite(self.mid):
            raise ValueError("ball midpoint must be finite")

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, x: int | Fraction | mpq, prec: int = DEFAULT_PREC) -> "Ball":
        """Ball enclosing the rational ``x``; radius is zero when representable."""
        if isinstance(x, Ball):
            return x
        if isinstance(x, (int, mpz)):
            q = mpz(x)
        elif isinstance(x, Fraction):
            q = mpq(x.numerator, x.denominator)
        elif isinstance(x, type(mpq(1))):
            q = x
        elif isinstance(x, type(mpfr(0))):
            return cls(x, _ZERO, max(prec, x.precision))
        else:
            raise TypeError(f"cannot make an exact ball from {type(x).__name__}")
        lo = mpfr(q, prec, _down(prec))
        hi = mpfr(q, prec, _up(prec))
        return cls(lo, _gap(lo, hi), prec)

    @classmethod
    def from_bounds(cls, lo: mpfr, hi: mpfr, prec: int) -> "Ball":
        """Smallest convenient ball containing ``[lo, hi]``."""
        if lo > hi:
            raise ValueError("empty interval")
        if lo == hi:
            return cls(lo, _ZERO, prec)
        mid = _down(prec).add(lo, _down(prec).div_2exp(_down(prec).sub(hi, lo), 1))
        rad = max(_RU.sub(hi, mid), _RU.sub(mid, lo))
        return cls(mid, rad, prec)

    @classmethod
    def pi(cls, prec: int) -> "Ball":
        return cls.from_bounds(_down(prec).const_pi(), _up(prec).const_pi(), prec)

    @classmethod
    def log2(cls, prec: int) -> "Ball":
        return cls.from_bounds(_down(prec).const_log2(), _up(prec).const_log2(), prec)

    @classmethod
    def e(cls, prec: int) -> "Ball":
        return cls.exact(1, prec).exp()

    def with_prec(self, prec: int) -> "Ball":
        return Ball(self.mid, self.rad, prec)

    def add_error(self, err) -> "Ball":
        """Widen the radius by a nonnegative error bound."""
        err = mpfr(err, RAD_PREC, _RU)
        if err < 0:
            raise ValueError("error bound must be nonnegative")
        return Ball(self.mid, _RU.add(self.rad, err), self.prec)

    # -- queries ----------------------------------------------------------

    def lower(self) -> mpfr:
        return _down(self.prec).sub(self.mid, self.rad)

    def upper(self) -> mpfr:
        return _up(self.prec).add(self.mid, self.rad)

    def mag(self) -> mpfr:
        """Upper bound on ``|x|`` for every enclosed x."""
        return _RU.add(_ru_abs(self.mid), self.rad)

    def is_exact(self) -> bool:
        return self.rad == 0

    def contains_zero(self) -> bool:
        return -self.rad <= self.mid <= self.rad

    def contains(self, x: int | Fraction | "Ball") -> bool:
        if isinstance(x, Ball):
            return self.to_mpq_bounds()[0] <= x.to_mpq_bounds()[0] and x.to_mpq_bounds()[1] <= self.to_mpq_bounds()[1]
        if isinstance(x, Fraction):
            x = mpq(x.numerator, x.denominator)
        lo, hi = self.to_mpq_bounds()
        return lo <= x <= hi

    def overlaps(self, other: "Ball") -> bool:
        return abs(mpq(self.mid) - mpq(other.mid)) <= mpq(self.rad) + mpq(other.rad)

    def to_mpq_bounds(self) -> tuple:
        m, r = mpq(self.mid), mpq(self.rad)
        return m - r, m + r

    def rel_rad(self) -> float:
        if self.rad == 0:
            return 0.0
        if self.mid == 0:
            return math.inf
        return float(_RU.div(self.rad, _rd_abs(self.mid)))

    def sign(self) -> Sign:
        return certify_sign(self)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        mid, rad = format_ball(self)
        return f"Ball({mid} +/- {rad}, prec={self.prec})"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other: Number) -> "Ball":
        if isinstance(other, Ball):
            return other
        if isinstance(other, (int, Fraction, mpz)):
            return Ball.exact(other, self.prec)
        return NotImplemented

    def __neg__(self) -> "Ball":
        # plain unary minus on mpfr rounds to the global 53-bit context
        return Ball(_neg(self.mid), self.rad, self.prec)

    def __pos__(self) -> "Ball":
        return self

    def __abs__(self) -> "Ball":
        if self.mid >= 0:
            return self
        return -self

    def __add__(self, other: Number) -> "Ball":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.prec, other.prec)
        lo = _down(prec).add(self.mid, other.mid)
        hi = _up(prec).add(self.mid, other.mid)
        rad = _RU.add(_RU.add(self.rad, other.rad), _gap(lo, hi))
        return Ball(lo, rad, prec)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Ball":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Number) -> "Ball":
        return (-self) + other

    def __mul__(self, other: Number) -> "Ball":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.prec, other.prec)
        lo = _down(prec).mul(self.mid, other.mid)
        hi = _up(prec).mul(self.mid, other.mid)
        rad = _gap(lo, hi)
        if self.rad or other.rad:
            rad = _RU.add(rad, _RU.mul(_ru_abs(self.mid), other.rad))
            rad = _RU.add(rad, _RU.mul(_ru_abs(other.mid), self.rad))
            rad = _RU.add(rad, _RU.mul(self.rad, other.rad))
        return Ball(lo, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Ball":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise DivisorContainsZero(f"divisor {other!r} contains zero")
        prec = max(self.prec, other.prec)
        lo = _down(prec).div(self.mid, other.mid)
        hi = _up(prec).div(self.mid, other.mid)
        rad = _gap(lo, hi)
        if self.rad or other.rad:
            bm_up = _ru_abs(other.mid)
            bm_dn = _rd_abs(other.mid)
            num = _RU.add(_RU.mul(_ru_abs(self.mid), other.rad), _RU.mul(self.rad, bm_up))
            den = _RD.mul(bm_dn, _RD.sub(bm_dn, other.rad))
            if den <= 0:
                raise DivisorContainsZero(f"divisor {other!r} too close to zero at radius precision")
            rad = _RU.add(rad, _RU.div(num, den))
        return Ball(lo, rad, prec)

    def __rtruediv__(self, other: Number) -> "Ball":
        return Ball.exact(other, self.prec) / self if not isinstance(other, Ball) else other / self

    def __pow__(self, k: int) -> "Ball":
        if not isinstance(k, int):
            return NotImplemented
        return self.pow_int(k)

    def pow_int(self, k: int) -> "Ball":
        if k < 0:
            return Ball.exact(1, self.prec) / self.pow_int(-k)
        if k == 0:
            return Ball.exact(1, self.prec)
        if k % 2 == 0 and self.contains_zero():
            # even power of a zero-straddling ball: [0, mag^k]
            hi = _up(self.prec).pow(self.mag(), k)
            return Ball.from_bounds(_ZERO, hi, self.prec)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- monotone elementary functions --------------------------------------

    def _endpoints(self) -> tuple[mpfr, mpfr]:
        return self.lower(), self.upper()

    def log(self) -> "Ball":
        if not self.mid > self.rad:
            raise LogOfNonpositiveBall(f"log of nonpositive ball {self!r}")
        lo, hi = self._endpoints()
        if lo <= 0:
            raise LogOfNonpositiveBall(f"log of nonpositive ball {self!r}")
        return Ball.from_bounds(_down(self.prec).log(lo), _up(self.prec).log(hi), self.prec)

    def exp(self) -> "Ball":
        lo, hi = self._endpoints()
        return Ball.from_bounds(_down(self.prec).exp(lo), _up(self.prec).exp(hi), self.prec)

    def sqrt(self) -> "Ball":
        lo, hi = self._endpoints()
        if hi < 0:
            raise ValueError("sqrt of negative ball")
        lo = max(lo, _ZERO)
        return Ball.from_bounds(_down(self.prec).sqrt(lo), _up(self.prec).sqrt(hi), self.prec)

    def power(self, y: Number) -> "Ball":
        """``self ** y`` for a positive base and real exponent."""
        if isinstance(y, int):
            return self.pow_int(y)
        return (self.log() * y).exp()


def ball_arith(a: Ball, b: Ball | int | None, kind: str) -> Ball:
    """Dispatch one of the certified operations by name."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    if kind == "pow_int":
        if isinstance(b, Ball):
            if not b.is_exact() or not gmpy2.is_integer(b.mid):
                raise ValueError("pow_int exponent must be an exact integer")
            b = int(b.mid)
        return a.pow_int(int(b))
    if kind == "log":
        return a.log()
    if kind == "exp":
        return a.exp()
    raise ValueError(f"unknown operation {kind!r}")


def certify_sign(x: Ball) -> Sign:
    if x.mid > x.rad:
        return Sign.POSITIVE
    if x.mid < -x.rad:
        return Sign.NEGATIVE
    return Sign.ZERO_UNRESOLVED


@dataclass(frozen=True)
class PrecisionPolicy:
    initial_bits: int = 256
    max_bits: int = 8192
    growth_factor: Fraction = Fraction(2)

    def __post_init__(self) -> None:
        if self.initial_bits <= 0 or self.max_bits <= 0:
            raise ValueError("precisions must be positive")
        if self.initial_bits > self.max_bits:
            raise ValueError("initial_bits exceeds max_bits")
        if Fraction(self.growth_factor) <= 1:
            raise ValueError("growth_factor must exceed 1")

    @staticmethod
    def hankel_bits(n: int) -> int:
        """Starting precision for a size-n determinant of zeta-like decay."""
        if n <= 1:
            return 256
        return max(256, math.ceil(1.5 * n * n * math.log2(2 * n)) + 64)

    @classmethod
    def for_hankel(cls, n: int, max_bits: int = 8192) -> "PrecisionPolicy":
        return cls(min(cls.hankel_bits(n), max_bits), max_bits)

    def schedule(self) -> Iterator[int]:
        prec = self.initial_bits
        while True:
            yield prec
            if prec >= self.max_bits:
                return
            prec = min(self.max_bits, math.ceil(prec * Fraction(self.growth_factor)))


def escalate(
    compute: Callable[[int], T],
    policy: PrecisionPolicy,
    accept: Callable[[T], bool],
    retry_on: tuple[type[BaseException], ...] = (DivisorContainsZero,),
) -> tuple[T, int]:
    """Run ``compute`` at increasing precision until ``accept`` holds.

    Returns the accepted result and the precision used.
    """
    last_exc = None
    for prec in policy.schedule():
        try:
            result = compute(prec)
        except retry_on as exc:
            last_exc = exc
            continue
        if accept(result):
            return result, prec
        last_exc = None
    raise PrecisionExhausted(
        f"query unresolved at max_bits={policy.max_bits}"
    ) from last_exc


def _mpfr_to_fraction(x: mpfr) -> Fraction:
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def _decimal(x: Fraction, digits: int, rounding) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        return Decimal(x.numerator) / Decimal(x.denominator)


def format_ball(x: Ball) -> tuple[str, str]:
    """Decimal strings for midpoint and radius.

    Midpoint digits beyond the radius are suppressed; the radius is given
    with three significant digits, rounded up.
    """
    mid = _mpfr_to_fraction(x.mid)
    rad = _mpfr_to_fraction(x.rad)
    max_digits = max(1, int(x.prec * math.log10(2)))
    if rad == 0:
        rad_s = "0"
        digits = max_digits
    else:
        rad_s = f"{_decimal(rad, 3, ROUND_CEILING):.2e}"
        if mid == 0:
            digits = 1
        else:
            spread = _decimal(abs(mid), 20, ROUND_HALF_EVEN).adjusted() - _decimal(rad, 20, ROUND_CEILING).adjusted()
            digits = min(max(spread + 1, 1), max_digits)
    if mid == 0:
        return "0", rad_s
    return f"{_decimal(mid, digits, ROUND_HALF_EVEN):.{digits - 1}e}", rad_s
