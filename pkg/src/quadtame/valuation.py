"""Monomial-type valuations on k[Q], parachutes and resonance.

A valuation is fixed by a base point p and negative weights alpha with
alpha_x + alpha_t = alpha_y + alpha_z. The value of a class is the best
weighted value over all its representatives; a representative is optimal
exactly when its weighted leading form is not divisible by q = xt - yz.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .polys import ONE, VARS, ZERO, QPoly, X, Y, taylor_shift, weighted_leading_part
from .ring import COORDS, Q_FORM, RELATION, QElem, independence_witness, pseudo_jacobian
from .scalars import Infinity, QSqrt2, to_fraction


class ValuationError(ValueError):
    kind = "ValuationError"


class WeightNotNegative(ValuationError):
    kind = "WeightNotNegative"


class BalanceViolated(ValuationError):
    kind = "BalanceViolated"


class DependentPair(ValuationError):
    kind = "DependentPair"


class ConstantArgument(ValuationError):
    kind = "ConstantArgument"


class CriticallyResonant(ValuationError):
    kind = "CriticallyResonant"


class HypothesisFails(Exception):
    """A checkable precondition is not met, so nothing is asserted."""


@dataclass(frozen=True)
class Valuation:
    p: tuple
    alpha: tuple

    @property
    def centered(self) -> bool:
        return all(c == 0 for c in self.p)

    def to_json(self):
        return {"p": [str(c) for c in self.p], "alpha": [str(a) for a in self.alpha]}


def make_valuation(p=None, alpha=(-1, -1, -1, -1)) -> Valuation:
    p = tuple(to_fraction(c) for c in (p or (0, 0, 0, 0)))
    al = tuple(QSqrt2.parse(a) if isinstance(a, str) else QSqrt2.coerce(a) for a in alpha)
    if len(p) != 4 or len(al) != 4:
        raise ValuationError("base point and weights need four entries")
    for a in al:
        if not a < 0:
            raise WeightNotNegative(f"weight {a} is not negative")
    if al[0] + al[3] != al[1] + al[2]:
        raise BalanceViolated(f"{al[0]} + {al[3]} != {al[1]} + {al[2]}")
    return Valuation(p, al)


def valuation_from_json(d: dict) -> Valuation:
    return make_valuation(d.get("p"), d["alpha"])


MINUS_DEG = make_valuation(alpha=(-1, -1, -1, -1))


def _as_elem(f) -> QElem:
    return f if isinstance(f, QElem) else QElem(f)


def sup_representative(nu: Valuation, f):
    """(representative in coordinates centered at p, its value).

    At the origin the normal form already is optimal: its leading form has no
    monomial divisible by xt, so q cannot divide it.
    """
    f = _as_elem(f)
    if f.is_zero():
        return ZERO, Infinity
    if nu.centered:
        return f.nf, weighted_leading_part(f.nf, nu.alpha)[1]
    return sup_representative_loop(nu, f.nf)


def sup_representative_loop(nu: Valuation, R: QPoly):
    """Generic path: shift any representative R to p, then remove q-divisible
    leading forms until none is left.  Each pass strictly raises the value."""
    R = taylor_shift(R, nu.p)
    rel = taylor_shift(RELATION, nu.p)
    while True:
        if R.is_zero():
            return R, Infinity
        lead, w = weighted_leading_part(R, nu.alpha)
        cof, rem = lead.divmod(Q_FORM)
        if not rem.is_zero():
            return R, w
        R = R - rel * cof


def nu_eval(nu: Valuation, f):
    return sup_representative(nu, f)[1]


def nu_of_xt(nu: Valuation):
    return nu.alpha[0] + nu.alpha[3]


def monomial_value_2(R: QPoly, w1, w2):
    """Two-variable monomial value of R in k[x, y] for weights (w1, w2)."""
    if R.is_zero():
        return Infinity
    best = None
    for e, _ in R.terms():
        v = QSqrt2.coerce(w1) * e[0] + QSqrt2.coerce(w2) * e[1]
        if best is None or v < best:
            best = v
    return best


def leading_form_2(R: QPoly, w1, w2) -> QPoly:
    """Terms of R in k[x, y] reaching the two-variable monomial value."""
    v = monomial_value_2(R, w1, w2)
    return QPoly.from_terms(
        {e: c for e, c in R.terms() if QSqrt2.coerce(w1) * e[0] + QSqrt2.coerce(w2) * e[1] == v}
    )


def substitute_pair(R: QPoly, f1, f2) -> QElem:
    """R(f1, f2) for R in k[x, y]."""
    if R.variables() - {"x", "y"}:
        raise ValuationError("expected a polynomial in x and y only")
    return QElem(R.substitute([_as_elem(f1).nf, _as_elem(f2).nf, ZERO, ZERO]))


# ---------------------------------------------------------------- parachute

def parachute(nu: Valuation, f1, f2):
    f1, f2 = _as_elem(f1), _as_elem(f2)
    if independence_witness(f1, f2) is None:
        raise DependentPair("the pair is algebraically dependent")
    vals = [nu_eval(nu, pseudo_jacobian(u, f1, f2)) for u in COORDS]
    return min(vals) - nu_eval(nu, f1) - nu_eval(nu, f2)


# ---------------------------------------------------------------- resonance

@dataclass(frozen=True)
class ResonanceClass:
    kind: str  # "qindependent" or "dependent"
    s1: int = 0
    s2: int = 0
    lam: Optional[Fraction] = None  # key scalar for f1^s1 - lam f2^s2, if any

    @property
    def proper(self) -> bool:
        return self.kind == "dependent" and self.s1 >= 2 and self.s2 >= 2

    @property
    def critical(self) -> bool:
        return self.kind == "dependent" and min(self.s1, self.s2) == 1 and self.lam is not None

    @property
    def k(self) -> Optional[int]:
        return max(self.s1, self.s2) if self.critical else None

    @property
    def orientation(self) -> Optional[str]:
        """Which argument carries the k-fold value in the critical case."""
        if not self.critical:
            return None
        if self.s1 == self.s2:
            return "equal"
        return "second" if self.s2 == 1 else "first"

    @property
    def label(self) -> str:
        if self.kind == "qindependent":
            return "qindependent"
        if self.proper:
            return "proper"
        if self.critical:
            return "critical"
        return "dependent"

    def to_json(self):
        lab = self.label
        if lab == "qindependent":
            return {"class": lab}
        lam = None if self.lam is None else str(self.lam)
        if lab == "critical":
            return {"class": lab, "k": self.k, "lambda": lam}
        return {"class": lab, "s1": self.s1, "s2": self.s2, "lambda": lam}


def _leading_mod_q(nu: Valuation, g: QElem):
    R, w = sup_representative(nu, g)
    lead = weighted_leading_part(R, nu.alpha)[0]
    return lead.divmod(Q_FORM)[1], w


def key_scalar(nu: Valuation, g: QElem, h: QElem) -> Optional[Fraction]:
    """The unique lam with nu(g - lam h) > nu(g), or None.

    The candidate comes from matching leading coefficients of the leading
    forms (read modulo q); it is then verified exactly.
    """
    lg, vg = _leading_mod_q(nu, g)
    lh, vh = _leading_mod_q(nu, h)
    if vg != vh or lg.is_zero() or lh.is_zero():
        return None
    eg, cg = lg.leading_term()
    ch = lh.to_dict().get(eg)
    if not ch:
        return None
    lam = cg / ch
    if nu_eval(nu, g - h * lam) > vg:
        return lam
    return None


def resonance_classify(nu: Valuation, f1, f2) -> ResonanceClass:
    f1, f2 = _as_elem(f1), _as_elem(f2)
    if f1.is_constant() or f2.is_constant():
        raise ConstantArgument("resonance needs nonconstant arguments")
    v1, v2 = nu_eval(nu, f1), nu_eval(nu, f2)
    r = v1 / v2
    if not r.is_rational():
        return ResonanceClass("qindependent")
    s2, s1 = r.a.numerator, r.a.denominator
    lam = key_scalar(nu, f1 ** s1, f2 ** s2)
    return ResonanceClass("dependent", s1, s2, lam)


# ---------------------------------------------------------------- value of R(f1, f2)

@dataclass(frozen=True)
class Thm417Report:
    lhs: object
    nu0: object
    cls: ResonanceClass
    bound_holds: bool
    bound: object = None  # the case (iii) bound when it applied

    def to_json(self):
        return {
            "lhs": str(self.lhs),
            "nu0": str(self.nu0),
            "class": self.cls.to_json(),
            "bound": None if self.bound is None else str(self.bound),
            "bound_holds": self.bound_holds,
        }


def resonant_bound(v1, v2, s1: int, s2: int):
    """min{(s1 - 1 - s1/s2) v1, (s2 - 1 - s2/s1) v2}."""
    a = v1 * (Fraction(s1 - 1) - Fraction(s1, s2))
    b = v2 * (Fraction(s2 - 1) - Fraction(s2, s1))
    return min(a, b)


def theorem_417_report(nu: Valuation, f1, f2, R: QPoly, refuse_critical: bool = True) -> Thm417Report:
    """Check the lower bound, the equality case and the resonant upper bound.

    With refuse_critical=False a critically resonant pair is still reported,
    but only the lower bound is asserted for it.
    """
    f1, f2 = _as_elem(f1), _as_elem(f2)
    if independence_witness(f1, f2) is None:
        raise DependentPair("the pair is algebraically dependent")
    cls = resonance_classify(nu, f1, f2)
    if cls.critical and refuse_critical:
        raise CriticallyResonant("the resonant bound is not available for critically resonant pairs")
    v1, v2 = nu_eval(nu, f1), nu_eval(nu, f2)
    lhs = nu_eval(nu, substitute_pair(R, f1, f2))
    nu0 = monomial_value_2(R, v1, v2)
    ok = lhs >= nu0
    bound = None
    if cls.kind == "qindependent":
        ok = ok and lhs == nu0
    elif cls.proper and lhs > nu0:
        bound = resonant_bound(v1, v2, cls.s1, cls.s2)
        ok = ok and lhs < bound
    return Thm417Report(lhs, nu0, cls, ok, bound)


def _involves_x(R: QPoly) -> bool:
    return R.degree_in("x") > 0


def corollary_419_check(nu: Valuation, f1, f2, R: QPoly) -> bool:
    """nu(f2 R(f1, f2)) < nu(f1) when nu(f1) < nu(f2), R not in k[y], pair not critical."""
    f1, f2 = _as_elem(f1), _as_elem(f2)
    if not nu_eval(nu, f1) < nu_eval(nu, f2):
        raise HypothesisFails("needs nu(f1) < nu(f2)")
    if not _involves_x(R):
        raise HypothesisFails("R must involve the first variable")
    if resonance_classify(nu, f1, f2).critical:
        raise HypothesisFails("pair is critically resonant")
    return nu_eval(nu, f2 * substitute_pair(R, f1, f2)) < nu_eval(nu, f1)


def corollary_420_check(nu: Valuation, f1, f2, R: QPoly) -> bool:
    """nu(f1 R(f1, f2)) < 4/3 nu(f1) for properly resonant pairs with nu(f1) < nu(f2)."""
    f1, f2 = _as_elem(f1), _as_elem(f2)
    if not nu_eval(nu, f1) < nu_eval(nu, f2):
        raise HypothesisFails("needs nu(f1) < nu(f2)")
    if not _involves_x(R):
        raise HypothesisFails("R must involve the first variable")
    if not resonance_classify(nu, f1, f2).proper:
        raise HypothesisFails("pair is not properly resonant")
    v1 = nu_eval(nu, f1)
    return nu_eval(nu, f1 * substitute_pair(R, f1, f2)) < v1 * Fraction(4, 3)


def lemma_49_check(nu: Valuation, f1, f2, f3) -> bool:
    """nu(j(f1, f2, f3)) >= nu(f1) + nu(f2) + nu(f3) - nu(xt)."""
    j = pseudo_jacobian(f1, f2, f3)
    rhs = nu_eval(nu, f1) + nu_eval(nu, f2) + nu_eval(nu, f3) - nu_of_xt(nu)
    return nu_eval(nu, j) >= rhs


def lemma_412_check(nu: Valuation, f1, f2, R: QPoly, n: int) -> bool:
    """nu(R(f1, f2)) < deg_y(R) nu(f2) + n * parachute, under its checked precondition."""
    if n < 1:
        raise HypothesisFails("n must be at least 1")
    f1, f2 = _as_elem(f1), _as_elem(f2)
    v1, v2 = nu_eval(nu, f1), nu_eval(nu, f2)
    D = R
    for _ in range(n):
        D = D.derivative("y")
    if D.is_zero():
        raise HypothesisFails("the n-th derivative vanishes")
    if nu_eval(nu, substitute_pair(D, f1, f2)) != monomial_value_2(D, v1, v2):
        raise HypothesisFails("the derivative does not attain its monomial value")
    lhs = nu_eval(nu, substitute_pair(R, f1, f2))
    return lhs < v2 * R.degree_in("y") + parachute(nu, f1, f2) * n


def _h_multiplicity(P: QPoly, H: QPoly) -> int:
    n = 0
    while not P.is_zero():
        q, r = P.divmod(H)
        if not r.is_zero():
            break
        n += 1
        P = q
    return n


def lemma_421_check(w1, w2, H: QPoly, R: QPoly) -> bool:
    """Leading forms commute with d/dy and each derivative drops one power of H.

    Weights (w1, w2) act on (x, y); H = x^s1 - lam y^s2 must be homogeneous for
    them and divide the leading form of R.
    """
    bar = leading_form_2(R, w1, w2)
    n = _h_multiplicity(bar, H)
    if n < 1:
        raise HypothesisFails("H does not divide the leading form")
    D, Dbar = R, bar
    for k in range(1, n + 1):
        D, Dbar = D.derivative("y"), Dbar.derivative("y")
        if leading_form_2(D, w1, w2) != Dbar:
            return False
        if _h_multiplicity(Dbar, H) != n - k:
            return False
    return True
