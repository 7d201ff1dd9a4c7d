"""Exact computations in the tame automorphism group of the quadric xt - yz = 1:
polynomial and ring arithmetic, generators and words, monomial valuations and
resonance, local pieces of the square complex, and degree growth."""
from importlib import resources

from .group import EV, EH, SIGMA, Orth, TameAut, Word, word_evaluate, word_from_json
from .polys import QPoly, degree_cap, parse
from .ring import QElem, normal_form
from .scalars import QSqrt2
from .valuation import Valuation, make_valuation, nu_eval, resonance_classify

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a shipped JSON fixture (word, pair, valuation or walk file)."""
    return resources.files(__package__).joinpath("fixtures", name)
