"""Sparse polynomials over Q in the variables x, y, z, t.

Arithmetic is delegated to flint's fmpq_mpoly under graded-lex order with
x > y > z > t. Everything else (parsing, formatting, jacobians, weighted
leading parts, shifts) is written here.
"""
from __future__ import annotations

import contextlib
import contextvars
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .scalars import Infinity, QSqrt2, to_fraction

VARS = ("x", "y", "z", "t")
CTX = flint.fmpq_mpoly_ctx.get(VARS, "deglex")
_GENS = CTX.gens()

DEFAULT_DEGREE_CAP = 5000
_degree_cap = contextvars.ContextVar("degree_cap", default=DEFAULT_DEGREE_CAP)


class DegreeCapExceeded(Exception):
    def __init__(self, degree, cap):
        super().__init__(f"degree {degree} exceeds cap {cap}")
        self.degree = degree
        self.cap = cap


class ParseError(ValueError):
    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else f"{msg} at position {pos}")
        self.pos = pos


def get_degree_cap() -> int:
    return _degree_cap.get()


@contextlib.contextmanager
def degree_cap(cap: int):
    """Temporarily change the degree cap used by multiplication and substitution."""
    token = _degree_cap.set(int(cap))
    try:
        yield
    finally:
        _degree_cap.reset(token)


def _check_cap(deg):
    cap = _degree_cap.get()
    if deg > cap:
        raise DegreeCapExceeded(deg, cap)


def _frac(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class QPoly:
    """Immutable polynomial in Q[x, y, z, t]."""

    __slots__ = ("_p", "_deg")

    def __init__(self, p=None):
        self._p = CTX.from_dict({}) if p is None else p
        self._deg = None

    # construction
    @classmethod
    def var(cls, name: str) -> "QPoly":
        return cls(_GENS[VARS.index(name)])

    @classmethod
    def const(cls, c) -> "QPoly":
        c = to_fraction(c)
        return cls(CTX.constant(flint.fmpq(c.numerator, c.denominator)))

    @classmethod
    def from_terms(cls, terms: dict) -> "QPoly":
        d = {}
        for e, c in terms.items():
            c = to_fraction(c)
            if c:
                d[tuple(e)] = flint.fmpq(c.numerator, c.denominator)
        return cls(CTX.from_dict(d))

    @classmethod
    def coerce(cls, v) -> "QPoly":
        if isinstance(v, QPoly):
            return v
        if isinstance(v, str):
            return parse(v)
        return cls.const(v)

    def __reduce__(self):
        return (QPoly.from_terms, (self.to_dict(),))

    # inspection
    def terms(self) -> list:
        """(exponents, coefficient) pairs in decreasing graded-lex order."""
        return [(tuple(int(k) for k in e), _frac(c)) for e, c in self._p.terms()]

    def to_dict(self) -> dict:
        return {tuple(int(k) for k in e): _frac(c) for e, c in self._p.to_dict().items()}

    def __len__(self):
        return len(self._p)

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.to_dict().get((0, 0, 0, 0), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._deg is None:
            self._deg = -1 if self._p.is_zero() else int(self._p.total_degree())
        return self._deg

    def degree_in(self, var: str) -> int:
        if self._p.is_zero():
            return -1
        return int(self._p.degrees()[VARS.index(var)])

    def leading_term(self):
        return self.terms()[0]

    def variables(self) -> set:
        degs = self._p.degrees() if not self._p.is_zero() else (0, 0, 0, 0)
        return {v for v, d in zip(VARS, degs) if d > 0}

    # arithmetic
    def __add__(self, o):
        o = _as_poly(o)
        if o is NotImplemented:
            return o
        return QPoly(self._p + o._p)

    __radd__ = __add__

    def __sub__(self, o):
        o = _as_poly(o)
        if o is NotImplemented:
            return o
        return QPoly(self._p - o._p)

    def __rsub__(self, o):
        o = _as_poly(o)
        if o is NotImplemented:
            return o
        return QPoly(o._p - self._p)

    def __neg__(self):
        return QPoly(-self._p)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            o = Fraction(o)
            return QPoly(self._p * flint.fmpq(o.numerator, o.denominator))
        o = _as_poly(o)
        if o is NotImplemented:
            return o
        if not self.is_zero() and not o.is_zero():
            _check_cap(self.total_degree() + o.total_degree())
        return QPoly(self._p * o._p)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = to_fraction(c)
        return QPoly(self._p / flint.fmpq(c.numerator, c.denominator))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        if n and not self.is_constant():
            _check_cap(self.total_degree() * n)
        return QPoly(self._p ** n)

    def divmod(self, other: "QPoly"):
        """Multivariate division: remainder has no term divisible by LT(other)."""
        q, r = divmod(self._p, other._p)
        return QPoly(q), QPoly(r)

    def derivative(self, var: str) -> "QPoly":
        return QPoly(self._p.derivative(VARS.index(var)))

    def substitute(self, images: Sequence["QPoly"]) -> "QPoly":
        """Replace (x, y, z, t) by the four given polynomials."""
        images = [_as_poly(g) for g in images]
        if self.is_zero() or self.is_constant():
            return self
        ds = [max(g.total_degree(), 0) for g in images]
        quick = min(self.total_degree() * max(ds),
                    sum(int(k) * d for k, d in zip(self._p.degrees(), ds)))
        if quick <= _degree_cap.get():
            bound = quick
        else:
            bound = max(sum(int(k) * d for k, d in zip(e, ds)) for e in self._p.monoms())
        _check_cap(bound)
        return QPoly(self._p.compose(*[g._p for g in images]))

    def evaluate(self, point: Sequence) -> Fraction:
        vals = [flint.fmpq(to_fraction(v).numerator, to_fraction(v).denominator) for v in point]
        return _frac(self._p(*vals))

    # comparison / display
    def __eq__(self, o):
        o = _as_poly(o)
        if o is NotImplemented:
            return False
        return self._p == o._p

    def __hash__(self):
        return hash(tuple(self.terms()))

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"QPoly({format_poly(self)!r})"


def _as_poly(o):
    if isinstance(o, QPoly):
        return o
    if isinstance(o, (int, Fraction)):
        return QPoly.const(o)
    return NotImplemented


X, Y, Z, T = (QPoly.var(v) for v in VARS)
ZERO = QPoly()
ONE = QPoly.const(1)


def monomial_str(e) -> str:
    parts = []
    for v, k in zip(VARS, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_poly(p: QPoly) -> str:
    """Deterministic text form; parse(format_poly(p)) == p."""
    if p.is_zero():
        return "0"
    out = []
    for i, (e, c) in enumerate(p.terms()):
        mono = monomial_str(e)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- parser

class _Parser:
    """expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
    factor := base ('^' nat)? ; base := rational | var | '(' expr ')'.
    A leading unary minus is accepted on terms."""

    def __init__(self, text):
        self.s = text
        self.i = 0

    def peek(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1
        return self.s[self.i] if self.i < len(self.s) else ""

    def eat(self, ch):
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.i)
        self.i += 1

    def nat(self):
        self.peek()
        j = self.i
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        if j == self.i:
            raise ParseError("expected a natural number", j)
        return int(self.s[j:self.i])

    def parse(self):
        if not self.peek():
            raise ParseError("empty expression", 0)
        p = self.expr()
        if self.peek():
            raise ParseError(f"unexpected {self.peek()!r}", self.i)
        return p

    def expr(self):
        p = self.term()
        while self.peek() in ("+", "-"):
            op = self.s[self.i]
            self.i += 1
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        neg = False
        while self.peek() in ("-", "+"):
            if self.s[self.i] == "-":
                neg = not neg
            self.i += 1
        p = self.factor()
        while self.peek() == "*":
            self.i += 1
            p = p * self.factor()
        return -p if neg else p

    def factor(self):
        b = self.base()
        if self.peek() == "^":
            self.i += 1
            at = self.i
            try:
                b = b ** self.nat()
            except DegreeCapExceeded as e:
                raise ParseError(f"exponent overflow ({e})", at) from None
        return b

    def base(self):
        ch = self.peek()
        if ch == "(":
            self.i += 1
            p = self.expr()
            self.eat(")")
            return p
        if ch in VARS:
            self.i += 1
            return QPoly.var(ch)
        if ch.isdigit():
            n = self.nat()
            if self.peek() == "/":
                self.i += 1
                d = self.nat()
                if d == 0:
                    raise ParseError("zero denominator", self.i)
                return QPoly.const(Fraction(n, d))
            return QPoly.const(n)
        raise ParseError(f"unexpected {ch!r}" if ch else "unexpected end of input", self.i)


def parse(text: str) -> QPoly:
    """Parse a polynomial in x, y, z, t with rational coefficients."""
    return _Parser(text).parse()


# ---------------------------------------------------------------- calculus

def jacobian_det(polys: Sequence[QPoly]) -> QPoly:
    """Determinant of the 4x4 Jacobian matrix of four polynomials."""
    m = [[p.derivative(v) for v in VARS] for p in polys]
    return _det(m)


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = ZERO
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def jac4(f0, f1, f2, f3) -> QPoly:
    return jacobian_det([f0, f1, f2, f3])


def taylor_shift(R: QPoly, p: Sequence) -> QPoly:
    """R(u + p), written in the shifted coordinates u."""
    return R.substitute([v + to_fraction(c) for v, c in zip((X, Y, Z, T), p)])


# ---------------------------------------------------------------- weights

def monomial_value(e, alpha) -> QSqrt2:
    v = QSqrt2(0)
    for k, a in zip(e, alpha):
        if k:
            v = v + a * k
    return v


def weighted_leading_part(R: QPoly, alpha):
    """(leading form, value) of R for the monomial weights alpha.

    The value is the minimum of <I, alpha> over the monomials of R and the
    leading form collects the terms reaching it. Zero gives (0, Infinity).
    """
    if R.is_zero():
        return ZERO, Infinity
    alpha = [QSqrt2.coerce(a) for a in alpha]
    best = None
    picked = []
    for e, c in R.terms():
        w = monomial_value(e, alpha)
        if best is None or w < best:
            best, picked = w, [(e, c)]
        elif w == best:
            picked.append((e, c))
    return QPoly.from_terms(dict(picked)), best


def min_weight(R: QPoly, alpha):
    return weighted_leading_part(R, alpha)[1]


def poly_from_iter(terms: Iterable) -> QPoly:
    return QPoly.from_terms(dict(terms))
