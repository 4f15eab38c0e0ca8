"""Constructive reals as nested rational-interval streams.

A ``CReal`` is a memoised sequence of rational intervals.  Index ``m`` has
width below ``2**-m`` and every interval sits inside its predecessor, so any
order fact read off a finite prefix stays true forever.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

from gmpy2 import mpq, mpz

from .errors import InvalidWitness, PreconditionError

Q = type(mpq(0))
RationalLike = Union[int, str, Fraction, "Q"]


def q(value: RationalLike, den: int | None = None) -> Q:
    """Coerce ints, ``"p/q"`` strings, decimals and Fractions to ``mpq``."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, Q):
        return value
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        fr = Fraction(value.strip())
        return mpq(fr.numerator, fr.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    return mpq(value)


def fmt(value: Q) -> str:
    """Canonical ``p/q`` rendering used in every serialised artefact."""
    value = q(value)
    return f"{value.numerator}/{value.denominator}"


def pow2(k: int) -> Q:
    """``2**k`` as an exact rational, for positive or negative ``k``."""
    return mpq(mpz(1) << k) if k >= 0 else mpq(1, mpz(1) << -k)


def bits_above(x: Q) -> int:
    """Smallest ``k >= 0`` with ``|x| <= 2**k``."""
    x = abs(q(x))
    if x <= 1:
        return 0
    n = x.numerator // x.denominator + 1
    return int(n).bit_length()


def precision_for(width: Q) -> int:
    """Smallest ``m >= 0`` with ``2**-m <= width``."""
    width = q(width)
    if width <= 0:
        raise PreconditionError("width must be positive")
    m = 0
    # fast path on the denominator size, then settle exactly
    if width < 1:
        m = max(0, int((width.denominator // max(width.numerator, 1)).bit_length()) - 1)
    while pow2(-m) > width:
        m += 1
    while m > 0 and pow2(-(m - 1)) <= width:
        m -= 1
    return m


@dataclass(frozen=True)
class Interval:
    """Closed rational interval ``[lo, hi]``."""

    lo: Q
    hi: Q

    def __post_init__(self):
        object.__setattr__(self, "lo", q(self.lo))
        object.__setattr__(self, "hi", q(self.hi))
        if self.lo > self.hi:
            raise PreconditionError(f"reversed interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: RationalLike) -> "Interval":
        x = q(x)
        return cls(x, x)

    @classmethod
    def around(cls, centre: RationalLike, radius: RationalLike) -> "Interval":
        c, r = q(centre), abs(q(radius))
        return cls(c - r, c + r)

    @property
    def width(self) -> Q:
        return self.hi - self.lo

    @property
    def mid(self) -> Q:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> Q:
        """Largest absolute value on the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> Q:
        """Smallest absolute value on the interval."""
        if self.lo <= 0 <= self.hi:
            return mpq(0)
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= q(x) <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise PreconditionError("disjoint intervals have no intersection")
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def widen(self, r: RationalLike) -> "Interval":
        r = abs(q(r))
        return Interval(self.lo - r, self.hi + r)

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        other = q(other)
        return Interval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo - other.hi, self.hi - other.lo)
        other = q(other)
        return Interval(self.lo - other, self.hi - other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Interval):
            ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
            return Interval(min(ps), max(ps))
        k = q(other)
        return Interval(self.lo * k, self.hi * k) if k >= 0 else Interval(self.hi * k, self.lo * k)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Interval):
            if other.lo <= 0 <= other.hi:
                raise PreconditionError("division by an interval containing zero")
            return self * Interval(1 / other.hi, 1 / other.lo)
        k = q(other)
        if k == 0:
            raise PreconditionError("division by zero")
        return self * (1 / k)

    def square(self) -> "Interval":
        lo2, hi2 = self.lo * self.lo, self.hi * self.hi
        if self.lo <= 0 <= self.hi:
            return Interval(0, max(lo2, hi2))
        return Interval(min(lo2, hi2), max(lo2, hi2))

    def to_json(self, precision: int | None = None) -> dict:
        return {"lo": fmt(self.lo), "hi": fmt(self.hi), "precision": precision}

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        return cls(q(obj["lo"]), q(obj["hi"]))


class CReal:
    """A real number given by nested intervals of width ``< 2**-m`` at index ``m``.

    ``raw(m)`` only has to contain the number and be narrow enough; nesting is
    enforced here by intersecting with the previous stage.
    """

    __slots__ = ("_raw", "_memo", "_lock", "label")

    def __init__(self, raw: Callable[[int], Interval], label: str = ""):
        self._raw = raw
        self._memo: list[Interval] = []
        self._lock = threading.Lock()
        self.label = label

    def approx(self, m: int) -> Interval:
        if m < 0:
            raise PreconditionError("precision index must be non-negative")
        with self._lock:
            while len(self._memo) <= m:
                k = len(self._memo)
                cur = self._raw(k)
                if cur.width >= pow2(-k):
                    raise PreconditionError(f"raw approximation at {k} too wide")
                if self._memo:
                    cur = cur.intersect(self._memo[-1])
                self._memo.append(cur)
            return self._memo[m]

    __getitem__ = approx

    @staticmethod
    def width_bound(m: int) -> Q:
        return pow2(-m)

    def __repr__(self):
        iv = self.approx(8)
        return f"CReal({self.label or ''}~[{float(iv.lo):.6g}, {float(iv.hi):.6g}])"

    # arithmetic sugar
    def __add__(self, other):
        return add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        if isinstance(other, CReal):
            return mul(self, other)
        return scale(self, q(other))

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, mpq(-1))


def _lift(x) -> CReal:
    return x if isinstance(x, CReal) else from_rational(x)


def from_rational(x: RationalLike) -> CReal:
    iv = Interval.point(q(x))
    return CReal(lambda m: iv, label=fmt(iv.lo))


def from_interval_stream(fn: Callable[[int], Interval], label: str = "") -> CReal:
    return CReal(fn, label)


def add(x: CReal, y: CReal) -> CReal:
    return CReal(lambda m: x.approx(m + 1) + y.approx(m + 1))


def sub(x: CReal, y: CReal) -> CReal:
    return CReal(lambda m: x.approx(m + 1) - y.approx(m + 1))


def scale(x: CReal, k: RationalLike) -> CReal:
    k = q(k)
    shift = bits_above(k)
    return CReal(lambda m: x.approx(m + shift) * k)


def mul(x: CReal, y: CReal) -> CReal:
    bound = bits_above(x.approx(0).mag + y.approx(0).mag + 1)

    def raw(m: int) -> Interval:
        k = m + bound + 2
        return x.approx(k) * y.approx(k)

    return CReal(raw)


def sup(x: CReal, y: CReal) -> CReal:
    def raw(m: int) -> Interval:
        a, b = x.approx(m), y.approx(m)
        return Interval(max(a.lo, b.lo), max(a.hi, b.hi))

    return CReal(raw)


def inf(x: CReal, y: CReal) -> CReal:
    def raw(m: int) -> Interval:
        a, b = x.approx(m), y.approx(m)
        return Interval(min(a.lo, b.lo), min(a.hi, b.hi))

    return CReal(raw)


class Order(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a budgeted comparison and the index that settled it."""

    order: Order
    index: int

    @property
    def decided(self) -> bool:
        return self.order is not Order.UNDECIDED


def compare(x: CReal, y: CReal, budget: int) -> Verdict:
    """Search indices ``0..budget`` for disjoint approximations."""
    for n in range(budget + 1):
        a, b = x.approx(n), y.approx(n)
        if a.hi < b.lo:
            return Verdict(Order.LESS, n)
        if b.hi < a.lo:
            return Verdict(Order.GREATER, n)
    return Verdict(Order.UNDECIDED, budget)


@dataclass(frozen=True)
class Split:
    """Result of a cotransitive split: which gap opened, and its certificate.

    ``left`` means x < y with ``y.lo - x.hi >= gap``; otherwise y < z with
    ``z.lo - y.hi >= gap``.  ``separator`` lies strictly inside the gap.
    """

    left: bool
    index: int
    gap: Q
    separator: Q


def cotransitive_split(x: CReal, z: CReal, n: int, y: CReal) -> Split:
    """Given ``x''(n) < z'(n)``, decide ``x < y`` or ``y < z``."""
    xn, zn = x.approx(n), z.approx(n)
    if not xn.hi < zn.lo:
        raise InvalidWitness(f"x and z overlap at index {n}")
    g = zn.lo - xn.hi
    m = precision_for(g / 3)
    ym = y.approx(m)
    if ym.lo > xn.hi:
        gap = ym.lo - xn.hi
        return Split(True, max(n, m), gap, (ym.lo + xn.hi) / 2)
    gap = zn.lo - ym.hi
    return Split(False, max(n, m), gap, (ym.hi + zn.lo) / 2)


# --- pi ---------------------------------------------------------------------

_GUARD = 24


def _atan_inv_fixed(x: int, w: int) -> int:
    """``atan(1/x) * 2**w`` truncated, error at most ``2 * terms`` ulps."""
    x2 = x * x
    term = (mpz(1) << w) // x
    total, k, sign = term, 1, -1
    while term:
        term //= x2
        total += sign * (term // (2 * k + 1))
        sign, k = -sign, k + 1
    return total


@lru_cache(maxsize=None)
def _pi_fixed(p: int) -> tuple[int, int]:
    """Integer ``P`` and error ``e`` with ``|pi * 2**p - P| <= e``."""
    w = p + _GUARD
    s = 16 * _atan_inv_fixed(5, w) - 4 * _atan_inv_fixed(239, w)
    return s >> _GUARD, 2


@lru_cache(maxsize=256)
def pi_interval(m: int) -> Interval:
    """Rational interval of width ``< 2**-m`` around pi (Machin series)."""
    p = m + 3
    val, err = _pi_fixed(p)
    den = mpz(1) << p
    return Interval(mpq(val - err, den), mpq(val + err, den))


PI = CReal(pi_interval, label="pi")
# 355/113 overestimates pi by less than 3e-7; handy for a priori bounds
PI_UPPER = mpq(355, 113)
