import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from conftest import GENERATORS, TAU, load_word, random_word, words
from test_polys import SYMS, from_sympy, to_sympy
from test_ring import sympy_nf
from quadtame.group import (
    EH, EV, SIGMA, NonUnitScalar, NotInO4, Orth, PolyVarOutOfDomain, TameAut, UnknownGenerator, Word,
    aut_degree, check_relation, generator_from_json, prefixes, volume_check, word_evaluate, word_from_json,
    word_inverse,
)
from quadtame.polys import QPoly, X, Y, parse
from quadtame.ring import COORDS, QElem, qelem

x, y, z, t = COORDS


def comps(*strs):
    return tuple(qelem(s) for s in strs)


def test_orth_examples():
    assert Orth([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).epsilon() == 1
    assert SIGMA.epsilon() == -1
    d = Orth([[3, 0, 0, 0], [0, 5, 0, 0], [0, 0, Fraction(1, 5), 0], [0, 0, 0, Fraction(1, 3)]])
    assert d.epsilon() == 1
    with pytest.raises(NotInO4):
        Orth([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_elementary_examples():
    W = lambda g: word_evaluate(Word({"g": g}, ["g"]))
    assert W(EV(1, 1, QPoly.const(0))).is_identity()
    assert W(EV(1, 1, QPoly.const(1))).comps == comps("x", "y", "z+x", "t+y")
    F = W(EV(1, 1, X))
    assert F.comps == comps("x", "y", "z+x^2", "t+x*y")
    assert F.degree() == 2 and F.epsilon() == 1
    with pytest.raises(PolyVarOutOfDomain):
        EV(1, 1, parse("z"))
    with pytest.raises(PolyVarOutOfDomain):
        EH(1, 1, parse("y"))
    with pytest.raises(NonUnitScalar):
        EV(0, 1, X)


def test_word_evaluate_examples():
    assert word_evaluate(Word({}, [])).is_identity()
    for name in GENERATORS:
        assert word_evaluate(Word(GENERATORS, [name, name + "'"])).is_identity()
        assert word_evaluate(Word(GENERATORS, [name + "'", name])).is_identity()
    F = word_evaluate(load_word("exponential.json"))
    assert F.comps == comps("x", "z+x*y^2", "y", "t+y^3")
    assert F.degree() == 3


def test_linear_fixture_components():
    F = word_evaluate(load_word("linear.json"))
    assert F.comps == comps("x", "z", "y+x^2*z", "t+x*z^2")
    assert aut_degree(F) == 3


def test_inverse_closed_forms():
    assert EV(1, 1, X).inverse().P == -X
    inv = EV(2, 1, Y).inverse()
    assert (inv.a, inv.b, inv.P) == (Fraction(1, 2), 1, Y * Fraction(-1, 2))
    assert word_inverse(Word({}, [])).letters == []


def _dense_compose(outer, inner):
    """Compose two component tuples with sympy and reduce with the sympy oracle."""
    env = dict(zip(SYMS, [to_sympy(c.nf) for c in inner]))
    return tuple(QElem(sympy_nf(from_sympy(to_sympy(c.nf).subs(env, simultaneous=True))), reduced=True)
                 for c in outer)


def test_composition_matches_dense_oracle():
    rng = random.Random(11)
    for _ in range(15):
        w = random_word(rng, 4)
        expected = tuple(COORDS)
        for g in w.applied():
            expected = _dense_compose(g.components(), expected)
        assert word_evaluate(w).comps == expected


@given(words(5))
def test_relation_and_volume(w):
    F = word_evaluate(w)
    assert F.comps[0] * F.comps[3] - F.comps[1] * F.comps[2] == 1
    assert volume_check(F, w.epsilon())
    assert F.epsilon() == w.epsilon()


@given(words(3), words(3))
def test_degree_submultiplicative_and_epsilon_morphism(u, v):
    duv = aut_degree(word_evaluate(u + v))
    assert duv <= aut_degree(word_evaluate(u)) * aut_degree(word_evaluate(v))
    assert (u + v).epsilon() == u.epsilon() * v.epsilon()


@given(words(4))
def test_inverse_degree_bound(w):
    F, G = word_evaluate(w), word_evaluate(w.inverse())
    assert G.degree() <= F.degree() ** 2
    assert F.compose(G).is_identity()


def test_epsilon_examples():
    assert Word({}, []).epsilon() == 1
    assert Word({"s": SIGMA}, ["s"]).epsilon() == -1
    assert Word({"s": SIGMA}, ["s", "s"]).epsilon() == 1
    assert Word(GENERATORS, ["a", "h'", "e"]).epsilon() == 1


def test_volume_examples():
    assert volume_check(TameAut.identity())
    assert volume_check(word_evaluate(Word({"s": SIGMA}, ["s"])))
    assert volume_check(word_evaluate(Word({"g": EV(1, 1, QPoly.const(1))}, ["g"])))
    assert not volume_check(TameAut.identity(), -1)


def test_prefixes_and_left_compose():
    w = Word(GENERATORS, ["s", "e", "a"])
    ps = prefixes(w)
    assert len(ps) == 4 and ps[0].is_identity() and ps[-1] == word_evaluate(w)
    assert ps[1] == word_evaluate(Word(GENERATORS, ["a"]))


def test_json_round_trip_and_errors():
    d = {"generators": {"e": EV(2, "-1/3", parse("x*y+1")).to_json(), "m": TAU.to_json()}, "word": ["e", "m'", "s"]}
    w = word_from_json(d)
    assert w.tokens() == ["e", "m'", "s"]
    assert generator_from_json(d["generators"]["e"]).to_json() == d["generators"]["e"]
    with pytest.raises(UnknownGenerator):
        word_from_json({"word": ["nope"]})


def test_check_relation_modular_path():
    F = word_evaluate(Word(GENERATORS, ["e", "s"] * 4))
    check_relation(F, exact_limit=0)
    bad = TameAut([F.comps[0] + 1, F.comps[1], F.comps[2], F.comps[3]])
    with pytest.raises(AssertionError):
        check_relation(bad, exact_limit=0)
    with pytest.raises(AssertionError):
        check_relation(bad)
