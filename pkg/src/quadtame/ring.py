"""The coordinate ring of the quadric xt - yz = 1.

Every class has a unique normal form: a polynomial with no monomial divisible
by xt, obtained by rewriting xt -> yz + 1 until none is left.
"""
from __future__ import annotations

from typing import Sequence

from .polys import ONE, VARS, ZERO, QPoly, X, Y, Z, T, jac4, parse

Q_FORM = X * T - Y * Z
RELATION = Q_FORM - 1


def normal_form(R: QPoly) -> QPoly:
    """Reduce R modulo xt - yz - 1."""
    if R.is_zero() or R.degree_in("x") == 0 or R.degree_in("t") == 0:
        return R
    return R.divmod(RELATION)[1]


def is_normal(R: QPoly) -> bool:
    return all(not (e[0] and e[3]) for e, _ in R.terms())


class QElem:
    """A class in k[Q], stored as its normal form."""

    __slots__ = ("nf",)

    def __init__(self, rep, reduced: bool = False):
        if isinstance(rep, QElem):
            self.nf = rep.nf
            return
        rep = QPoly.coerce(rep)
        self.nf = rep if reduced else normal_form(rep)

    @classmethod
    def var(cls, name):
        return cls(QPoly.var(name), reduced=True)

    def __add__(self, o):
        return QElem(self.nf + _nf_of(o), reduced=True)

    __radd__ = __add__

    def __sub__(self, o):
        return QElem(self.nf - _nf_of(o), reduced=True)

    def __rsub__(self, o):
        return QElem(_nf_of(o) - self.nf, reduced=True)

    def __neg__(self):
        return QElem(-self.nf, reduced=True)

    def __mul__(self, o):
        if isinstance(o, QElem):
            return QElem(self.nf * o.nf)
        return QElem(self.nf * o, reduced=True) if not isinstance(o, QPoly) else QElem(self.nf * o)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return QElem(self.nf / c, reduced=True)

    def __pow__(self, n):
        out = ONE
        base = self.nf
        # square-and-multiply with reduction at every step
        while n:
            if n & 1:
                out = normal_form(out * base)
            n >>= 1
            if n:
                base = normal_form(base * base)
        return QElem(out, reduced=True)

    def __eq__(self, o):
        if isinstance(o, QElem):
            return self.nf == o.nf
        try:
            return self.nf == QElem(o).nf
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash(self.nf)

    def is_zero(self):
        return self.nf.is_zero()

    def is_constant(self):
        return self.nf.is_constant()

    def degree(self) -> int:
        return class_degree(self)

    def substitute(self, images: Sequence["QElem"]) -> "QElem":
        return QElem(self.nf.substitute([_nf_of(g) for g in images]))

    def __str__(self):
        return str(self.nf)

    def __repr__(self):
        return f"QElem({self.nf})"


def _nf_of(o) -> QPoly:
    if isinstance(o, QElem):
        return o.nf
    return normal_form(QPoly.coerce(o))


def qelem(s) -> QElem:
    return QElem(parse(s) if isinstance(s, str) else s)


def class_degree(f) -> int:
    """Total degree of the normal form (-1 for zero)."""
    return QElem(f).nf.total_degree()


def pseudo_jacobian(f1, f2, f3) -> QElem:
    """j(f1, f2, f3) = Jac(q, R1, R2, R3) read in k[Q]; independent of representatives."""
    return QElem(jac4(Q_FORM, _nf_of(f1), _nf_of(f2), _nf_of(f3)))


def independence_witness(f1, f2):
    """First coordinate u in x, y, z, t with j(u, f1, f2) != 0, or None."""
    for v in VARS:
        if not pseudo_jacobian(QElem.var(v), f1, f2).is_zero():
            return v
    return None


def algebraically_independent(f1, f2) -> bool:
    return independence_witness(f1, f2) is not None


COORDS = tuple(QElem.var(v) for v in VARS)
