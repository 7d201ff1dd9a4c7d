"""Exact scalars: rationals and the real quadratic field Q(sqrt 2).

Valuation weights may be irrational, so values live in Q(sqrt 2). Ordering is
decided exactly by comparing squares, never by floats.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering

Rational = Fraction

_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<a>{_RAT})(?=$|[+-]))?(?:(?P<sign>[+-])?(?:(?P<b>\d+(?:/\d+)?)\*)?r2)?$"
)


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, QSqrt2):
        if v.b:
            raise ValueError(f"{v} is not rational")
        return v.a
    raise TypeError(f"cannot convert {v!r} to a rational")


def _sign_of(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt(2)."""
    if a >= 0 and b >= 0:
        return 0 if (a == 0 and b == 0) else 1
    if a <= 0 and b <= 0:
        return -1
    d = a * a - 2 * b * b
    if a > 0:  # b < 0
        return 1 if d > 0 else -1
    return 1 if d < 0 else -1


@total_ordering
class QSqrt2:
    """Element a + b*sqrt(2) with a, b rational."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = to_fraction(a)
        self.b = to_fraction(b)

    @classmethod
    def coerce(cls, v) -> "QSqrt2":
        if isinstance(v, QSqrt2):
            return v
        return cls(to_fraction(v), 0)

    @classmethod
    def parse(cls, s: str) -> "QSqrt2":
        """Parse "a/b", "a/b+c/d*r2", "1-2*r2", "-r2" and similar."""
        text = s.replace(" ", "")
        m = _SCALAR_RE.match(text)
        if not text or m is None:
            raise ValueError(f"bad scalar {s!r}")
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(0)
        if "r2" in text:
            b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
            if m.group("sign") == "-":
                b = -b
            elif m.group("sign") is None and m.group("a") is not None:
                raise ValueError(f"bad scalar {s!r}")
        return cls(a, b)

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        return _sign_of(self.a, self.b)

    def conjugate(self) -> "QSqrt2":
        return QSqrt2(self.a, -self.b)

    def __add__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        n = o.a * o.a - 2 * o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        return self * QSqrt2(o.a / n, -o.b / n)

    def __rtruediv__(self, o):
        return _coerce(o) / self

    def __eq__(self, o):
        if isinstance(o, _Infinity):
            return False
        o = _coerce(o)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __lt__(self, o):
        if isinstance(o, _Infinity):
            return True
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return _sign_of(self.a - o.a, self.b - o.b) < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __repr__(self):
        return f"QSqrt2({self})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        bpart = "r2" if abs(self.b) == 1 else f"{abs(self.b)}*r2"
        sign = "-" if self.b < 0 else "+"
        if self.a == 0:
            return ("-" if self.b < 0 else "") + bpart
        return f"{self.a}{sign}{bpart}"


def _coerce(o):
    if isinstance(o, QSqrt2):
        return o
    if isinstance(o, (int, Fraction)):
        return QSqrt2(o, 0)
    return NotImplemented


@total_ordering
class _Infinity:
    """The value of the zero class: larger than every scalar."""

    __slots__ = ()

    def __eq__(self, o):
        return isinstance(o, _Infinity)

    def __lt__(self, o):
        return False

    def __gt__(self, o):
        return not isinstance(o, _Infinity)

    def __add__(self, o):
        return self

    __radd__ = __add__

    def __hash__(self):
        return hash("inf")

    def __repr__(self):
        return "Infinity"

    __str__ = __repr__


Infinity = _Infinity()
