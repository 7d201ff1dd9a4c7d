"""Degree growth of iterates and of random products.

Degrees are always computed exactly by composing generators; nothing here
uses a closed formula for the degree of a power or of a product.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .complex import Gallery, aut_vertex, gallery_from_word, skeleton_distance_upper
from .group import Generator, GroupInputError, TameAut, Word, generator_from_json, parse_letter, word_evaluate
from .polys import DegreeCapExceeded, degree_cap, get_degree_cap


class DynamicsError(ValueError):
    kind = "DynamicsError"


class SequenceTooShort(DynamicsError):
    kind = "SequenceTooShort"


class NotExponential(DynamicsError):
    kind = "NotExponential"


class AffineInput(DynamicsError):
    kind = "AffineInput"


class BadProbabilities(DynamicsError):
    kind = "BadProbabilities"


class MismatchedConfigs(DynamicsError):
    kind = "MismatchedConfigs"


# ---------------------------------------------------------------- degree sequences

@dataclass
class DegreeSequence:
    n_max: int
    forward: list
    backward: list
    truncated: bool = False

    def rows(self):
        return [(n + 1, f, b) for n, (f, b) in enumerate(zip(self.forward, self.backward))]

    def to_json(self):
        return {"n_max": self.n_max, "forward": self.forward, "backward": self.backward, "truncated": self.truncated}


def _powers(w: Word, n_max: int) -> list:
    gens = w.applied()
    F = TameAut.identity()
    out = []
    for _ in range(n_max):
        for g in gens:
            F = F.left(g)
        out.append(F.degree())
    return out


def degree_sequence(w: Word, n_max: int, cap: Optional[int] = None) -> DegreeSequence:
    """deg f^n and deg f^-n for n = 1..n_max; stops early (flagged) at the degree cap."""
    fwd, bwd, trunc = [], [], False
    with degree_cap(cap if cap is not None else get_degree_cap()):
        for word, out in ((w, fwd), (w.inverse(), bwd)):
            gens = word.applied()
            F = TameAut.identity()
            try:
                for _ in range(n_max):
                    for g in gens:
                        F = F.left(g)
                    out.append(F.degree())
            except DegreeCapExceeded:
                trunc = True
    m = min(len(fwd), len(bwd))
    return DegreeSequence(n_max, fwd[:m], bwd[:m], trunc)


@dataclass(frozen=True)
class GrowthClass:
    kind: str  # "bounded", "linear" or "exponential"
    low: Optional[Fraction] = None
    high: Optional[Fraction] = None

    def to_json(self):
        d = {"class": self.kind}
        if self.kind == "linear":
            d["slope"] = [str(self.low), str(self.high)]
        elif self.kind == "exponential":
            d["rate"] = [str(self.low), str(self.high)]
        return d


def growth_classify(s: DegreeSequence) -> GrowthClass:
    n = min(len(s.forward), len(s.backward))
    if n < 6:
        raise SequenceTooShort(f"need at least 6 terms, got {n}")
    win = max(3, n // 2)
    tails = [list(seq[n - win:n]) for seq in (s.forward, s.backward)]
    if all(len(set(t)) == 1 for t in tails):
        return GrowthClass("bounded")
    firsts = [[b - a for a, b in zip(t, t[1:])] for t in tails]
    if all(all(d2 == 0 for d2 in (b - a for a, b in zip(d, d[1:]))) for d in firsts):
        slopes = [Fraction(d[0]) for d in firsts]
        return GrowthClass("linear", min(slopes), max(slopes))
    ratios = [Fraction(b, a) for t in tails for a, b in zip(t, t[1:])]
    return GrowthClass("exponential", min(ratios), max(ratios))


def check_theorem1_bound(s: DegreeSequence) -> dict:
    """C_fit = min_n min(deg f^n, deg f^-n) (3/4)^n over the computed range."""
    if growth_classify(s).kind != "exponential":
        raise NotExponential("the sequence is not in the exponential regime")
    best, wit = None, None
    for n, (f, b) in enumerate(zip(s.forward, s.backward), start=1):
        c = min(f, b) * Fraction(3, 4) ** n
        if best is None or c < best:
            best, wit = c, n
    return {"C_fit": best, "witness_n": wit, "holds": best > 0}


def check_theorem4(w: Word) -> dict:
    """log deg f >= log(4/3)/(2 sqrt 2) d - 2 log(4/3) with d an explored upper bound
    on the distance between [Id] and f.[Id]; a failure is only inconclusive."""
    F = word_evaluate(w)
    deg = F.degree()
    if deg <= 1:
        raise AffineInput("f is affine")
    gal = gallery_from_word(w)
    d = skeleton_distance_upper(gal, gal.squares[0].center, aut_vertex(F))
    c = math.log(4 / 3)
    lhs = math.log(deg)
    rhs = c / (2 * math.sqrt(2)) * float(d) - 2 * c
    holds = lhs - rhs > 1e-9
    return {"lhs": lhs, "rhs_upper": rhs, "distance_upper": str(d), "holds": holds,
            "status": "holds" if holds else "inconclusive"}


# ---------------------------------------------------------------- random walks

MASK64 = (1 << 64) - 1
DEFAULT_SEED = 20240601


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master: int, trial: int) -> int:
    return splitmix64(splitmix64(master & MASK64) ^ trial)


@dataclass
class WalkConfig:
    generators: dict
    support: list  # [(tuple of letters outermost first, Fraction)]
    steps: int = 10
    trials: int = 100
    seed: int = DEFAULT_SEED
    degree_cap: int = 5000
    symmetrize: bool = False
    workers: int = 1

    def __post_init__(self):
        self.support = [(tuple(parse_letter(l) if isinstance(l, str) else tuple(l) for l in word), Fraction(p))
                        for word, p in self.support]
        for word, _ in self.support:
            for name, _ in word:
                if name not in self.generators:
                    raise GroupInputError(f"unknown generator {name!r}")
        if any(p < 0 for _, p in self.support) or sum(p for _, p in self.support) != 1:
            raise BadProbabilities("probabilities must be nonnegative and sum to 1")
        if self.symmetrize:
            self.support = symmetrized(self.support)

    def echo(self):
        return {
            "support": [{"word": _tokens(w), "p": str(p)} for w, p in self.support],
            "steps": self.steps, "trials": self.trials, "seed": self.seed,
            "degree_cap": self.degree_cap, "symmetrize": self.symmetrize,
        }


def _tokens(word):
    return [n + ("'" if i else "") for n, i in word]


def invert_step(word):
    return tuple((n, not i) for n, i in reversed(word))


def symmetrized(support):
    acc = {}
    for w, p in support:
        for u in (w, invert_step(w)):
            acc[u] = acc.get(u, Fraction(0)) + p / 2
    return sorted(acc.items(), key=lambda kv: _tokens(kv[0]))


def walk_config_from_json(d: dict) -> WalkConfig:
    gens = {k: generator_from_json(v) for k, v in d["generators"].items()}
    support = []
    for e in d["support"]:
        word = e.get("word") or [e["letter"]]
        support.append((word, Fraction(str(e["p"]))))
    cfg = WalkConfig(gens, support, steps=int(d.get("steps", 10)), trials=int(d.get("trials", 100)),
                     seed=int(d.get("seed", DEFAULT_SEED)), degree_cap=int(d.get("degree_cap", 5000)),
                     symmetrize=bool(d.get("symmetrize", False)), workers=int(d.get("workers", 1)))
    if d.get("conjugate_by"):
        cfg = conjugated_config(cfg, [parse_letter(l) for l in d["conjugate_by"]])
    return cfg


def inverse_config(cfg: WalkConfig) -> WalkConfig:
    """The pushforward of the step law under g -> g^-1."""
    return WalkConfig(cfg.generators, [(invert_step(w), p) for w, p in cfg.support], cfg.steps, cfg.trials,
                      cfg.seed, cfg.degree_cap, False, cfg.workers)


def conjugated_config(cfg: WalkConfig, h) -> WalkConfig:
    """Steps s replaced by h s h^-1."""
    h = tuple(parse_letter(l) if isinstance(l, str) else tuple(l) for l in h)
    sup = [(h + w + invert_step(h), p) for w, p in cfg.support]
    return WalkConfig(cfg.generators, sup, cfg.steps, cfg.trials, cfg.seed, cfg.degree_cap, False, cfg.workers)


class _Sampler:
    def __init__(self, support):
        den = 1
        for _, p in support:
            den = den * p.denominator // math.gcd(den, p.denominator)
        self.den = den
        acc, self.cuts = 0, []
        for w, p in support:
            acc += int(p * den)
            self.cuts.append((acc, w))

    def draw(self, rng):
        r = rng.randrange(self.den)
        for cut, w in self.cuts:
            if r < cut:
                return w
        raise AssertionError("unreachable")


class _Evaluator:
    """Evaluates freely reduced words and their inverses, caching by word.

    The forward value of r + [l] is l o value(r); the inverse is
    inverse(r) o l^-1, a substitution of the small letter into the cached
    inverse.  The cache is bounded by the total number of stored terms.
    """

    def __init__(self, generators, term_budget=4_000_000):
        self.word = Word(generators, [])
        self.fwd = {(): TameAut.identity()}
        self.inv = {(): TameAut.identity()}
        self.budget = term_budget
        self.used = 0
        self._letter_inv = {}

    def _store(self, table, key, F):
        size = sum(len(c.nf) for c in F.comps)
        if self.used + size <= self.budget:
            table[key] = F
            self.used += size

    def _inverse_letter(self, letter):
        if letter not in self._letter_inv:
            g = self.word.letter_generator((letter[0], not letter[1]))
            self._letter_inv[letter] = TameAut(g.components(), g.epsilon())
        return self._letter_inv[letter]

    def get(self, applied: tuple) -> TameAut:
        hit = self.fwd.get(applied)
        if hit is not None:
            return hit
        F = self.get(applied[:-1]).left(self.word.letter_generator(applied[-1]))
        self._store(self.fwd, applied, F)
        return F

    def get_inverse(self, applied: tuple) -> TameAut:
        hit = self.inv.get(applied)
        if hit is not None:
            return hit
        F = self.get_inverse(applied[:-1]).compose(self._inverse_letter(applied[-1]))
        self._store(self.inv, applied, F)
        return F


def _reduce_push(stack: list, letter, involutions=frozenset()):
    if stack and stack[-1][0] == letter[0] and (stack[-1][1] != letter[1] or letter[0] in involutions):
        stack.pop()
    else:
        stack.append(letter)


def _run_trials(cfg: WalkConfig, trial_ids) -> list:
    sampler = _Sampler(cfg.support)
    ev = _Evaluator(cfg.generators)
    invol = frozenset(n for n, g in cfg.generators.items() if g.is_involution())
    out = []
    import random

    with degree_cap(cfg.degree_cap):
        for tr in trial_ids:
            rng = random.Random(trial_seed(cfg.seed, tr))
            steps = [sampler.draw(rng) for _ in range(cfg.steps)]
            applied = []  # application order, freely reduced
            fwd, bwd = [], []
            try:
                for w in steps:
                    for letter in reversed(w):
                        if letter[0] in invol:
                            letter = (letter[0], False)
                        _reduce_push(applied, letter, invol)
                    g = ev.get(tuple(applied))
                    ginv = ev.get_inverse(tuple(applied))
                    fwd.append(math.log(g.degree()))
                    bwd.append(math.log(ginv.degree()))
                out.append((tr, fwd, bwd, False))
            except DegreeCapExceeded:
                out.append((tr, fwd, bwd, True))
    return out


def _moments(xs):
    n = len(xs)
    if n < 2:
        return None, None, None
    m = math.fsum(xs) / n
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    if var == 0:
        return 0.0, None, None
    sd = math.sqrt(var)
    skew = math.fsum(((x - m) / sd) ** 3 for x in xs) / n
    kurt = math.fsum(((x - m) / sd) ** 4 for x in xs) / n - 3
    return var, skew, kurt


def _slope(ys):
    n = len(ys)
    if n < 2:
        return None
    xs = range(1, n + 1)
    mx = (n + 1) / 2
    my = math.fsum(ys) / n
    num = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.fsum((x - mx) ** 2 for x in xs)
    return num / den


@dataclass
class WalkReport:
    config: dict
    lambda1: Optional[float]
    lambda2: Optional[float]
    lambda1_slope: Optional[float]
    lambda2_slope: Optional[float]
    mean_logdeg: list
    mean_logdeg_inverse: list
    variance_trace: list
    clt: dict
    truncated: int
    completed: int
    trials: list = field(repr=False, default_factory=list)

    def to_json(self):
        return {
            "config": self.config,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "lambda1_slope": self.lambda1_slope,
            "lambda2_slope": self.lambda2_slope,
            "mean_logdeg": self.mean_logdeg,
            "mean_logdeg_inverse": self.mean_logdeg_inverse,
            "variance_trace": self.variance_trace,
            "clt_exploratory": self.clt,
            "completed_trials": self.completed,
            "truncated_trials": self.truncated,
            "truncation_rate": self.truncated / max(1, self.completed + self.truncated),
        }

    def csv_rows(self):
        for tr, fwd, _bwd in self.trials:
            for k, v in enumerate(fwd, start=1):
                yield (k, tr, v)


def run_random_walk(cfg: WalkConfig) -> WalkReport:
    ids = list(range(cfg.trials))
    if cfg.workers > 1:
        chunks = [ids[i::cfg.workers] for i in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(_run_trials, [cfg] * len(chunks), chunks))
        results = [r for p in parts for r in p]
    else:
        results = _run_trials(cfg, ids)
    results.sort(key=lambda r: r[0])
    good = [(tr, f, b) for tr, f, b, trunc in results if not trunc]
    n = cfg.steps
    trunc = len(results) - len(good)
    if not good:
        return WalkReport(cfg.echo(), None, None, None, None, [], [], [], {}, trunc, 0, [])
    mean = [math.fsum(f[k] for _, f, _ in good) / len(good) for k in range(n)]
    mean_inv = [math.fsum(b[k] for _, _, b in good) / len(good) for k in range(n)]
    var_trace = [(_moments([f[k] for _, f, _ in good])[0] or 0.0) for k in range(n)]
    lam1 = mean[-1] / n
    lam2 = mean_inv[-1] / n
    centered = [f[-1] - lam1 * n for _, f, _ in good]
    var, skew, kurt = _moments(centered)
    clt = {"variance": var, "variance_over_n": None if var is None else var / n,
           "skewness": skew, "excess_kurtosis": kurt}
    return WalkReport(cfg.echo(), lam1, lam2, _slope(mean), _slope(mean_inv), mean, mean_inv,
                      var_trace, clt, trunc, len(good), good)


def prop61_checks(base: WalkReport, inverse: Optional[WalkReport] = None,
                  conjugated: Optional[WalkReport] = None, symmetric: bool = False, tol: float = 0.05) -> dict:
    """Empirical consequences of the basic properties of degree exponents."""
    def key(r):
        c = r.config
        return (c["steps"], c["trials"], c["seed"])

    for other in (inverse, conjugated):
        if other is not None and key(other) != key(base):
            raise MismatchedConfigs("reports must share steps, trials and seed")
    out = {"lambda1_ge_half_lambda2": base.lambda1 >= base.lambda2 / 2 - tol}
    if symmetric:
        out["symmetric_equal"] = abs(base.lambda1 - base.lambda2) <= tol
    if inverse is not None:
        out["inverse_swaps"] = abs(base.lambda2 - inverse.lambda1) <= tol and abs(base.lambda1 - inverse.lambda2) <= tol
    if conjugated is not None:
        out["conjugation_invariant"] = (abs(base.lambda1 - conjugated.lambda1) <= tol
                                        and abs(base.lambda2 - conjugated.lambda2) <= tol)
    out["all_pass"] = all(out.values())
    return out
