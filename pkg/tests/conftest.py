import json
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from quadtame import fixture_path
from quadtame.group import EH, EV, SIGMA, Orth, Word, word_from_json
from quadtame.polys import QPoly
from quadtame.ring import QElem
from quadtame.valuation import make_valuation

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TAU = Orth([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]])

VALUATIONS = {
    "minus_degree": make_valuation(alpha=("-1", "-1", "-1", "-1")),
    "weights_example": make_valuation(alpha=("-1/2", "-3/5", "-9/10", "-1")),
    "asymmetric": make_valuation(alpha=("-1", "-4/5", "-3/4", "-11/20")),
    "irrational": make_valuation(alpha=("-1", "-r2", "-r2", "1-2*r2")),
    "shifted": make_valuation(p=(2, 1, 1, 1), alpha=("-2", "-1", "-3", "-2")),
}


def load_json(name):
    return json.loads(fixture_path(name).read_text())


def load_word(name) -> Word:
    return word_from_json(load_json(name))


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.tuples(*[st.integers(0, 3)] * 4)


def polys(max_degree=4, max_terms=5):
    return st.dictionaries(exps.filter(lambda e: sum(e) <= max_degree), coeffs,
                           max_size=max_terms).map(QPoly.from_terms)


def elems(max_degree=4, max_terms=5):
    return polys(max_degree, max_terms).map(QElem)


def nonzero_elems(max_degree=4, max_terms=5):
    return elems(max_degree, max_terms).filter(lambda f: not f.is_zero())


def random_poly(rng: random.Random, max_degree=4, max_terms=5) -> QPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        d = rng.randint(0, max_degree)
        cuts = sorted(rng.randint(0, d) for _ in range(3))
        e = (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], d - cuts[2])
        terms[e] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return QPoly.from_terms(terms)


def random_nonzero_elem(rng, max_degree=4, max_terms=5) -> QElem:
    while True:
        f = QElem(random_poly(rng, max_degree, max_terms))
        if not f.is_zero():
            return f


# a small generator table for random words
GENERATORS = {
    "s": SIGMA,
    "tau": TAU,
    "d": Orth([[2, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, Fraction(1, 2)]]),
    "a": EV(1, 1, QPoly.var("x")),
    "b": EV(2, 1, QPoly.var("y")),
    "e": EV(1, 1, QPoly.var("y") ** 2),
    "h": EH(1, 1, QPoly.var("x") * QPoly.var("z")),
    "k": EH(1, Fraction(-1, 3), QPoly.var("z") + 1),
}


def random_word(rng: random.Random, max_len=5, names=None) -> Word:
    names = names or sorted(GENERATORS)
    n = rng.randint(0, max_len)
    letters = [rng.choice(names) + ("'" if rng.random() < 0.5 else "") for _ in range(n)]
    return Word(GENERATORS, letters)


def words(max_len=4, names=None):
    names = names or sorted(GENERATORS)
    letter = st.tuples(st.sampled_from(names), st.booleans()).map(lambda p: p[0] + ("'" if p[1] else ""))
    return st.lists(letter, max_size=max_len).map(lambda ls: Word(GENERATORS, ls))


@pytest.fixture(params=sorted(VALUATIONS))
def any_valuation(request):
    return VALUATIONS[request.param]


def random_poly_xy(rng: random.Random, max_degree=4, max_terms=4) -> QPoly:
    """Random nonzero polynomial in x, y only."""
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            i = rng.randint(0, max_degree)
            j = rng.randint(0, max_degree - i)
            terms[(i, j, 0, 0)] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 2))
        p = QPoly.from_terms(terms)
        if not p.is_zero():
            return p
