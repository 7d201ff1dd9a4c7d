"""Local pieces of the square complex on which the tame group acts.

Vertices come in three types: components up to scalars (I), admissible pairs
up to GL2 (II), and automorphisms up to left composition with O4 (III).  Each
is stored in a canonical form so that equality of vertices is equality of
data.  A 2x2 square is centered at [G] and has the four corners [G_x], [G_y],
[G_z], [G_t]; galleries collect the squares centered at the partial
compositions of a word.
"""
from __future__ import annotations

import heapq
import itertools
from collections import deque
from fractions import Fraction
from typing import Iterable, Optional

from .group import TameAut, Word, prefixes, word_evaluate
from .polys import VARS, QPoly, format_poly
from .ring import QElem
from .scalars import QSqrt2
from .valuation import Valuation, nu_eval, resonance_classify


class ComplexError(ValueError):
    kind = "ComplexError"


class InadmissiblePair(ComplexError):
    kind = "InadmissiblePair"


class VertexAbsent(ComplexError):
    kind = "VertexAbsent"


class NonNegativeCorner(ComplexError):
    kind = "NonNegativeCorner"


class ConditionSevenViolated(ComplexError):
    kind = "ConditionSevenViolated"


class ConjugatorInvalid(ComplexError):
    kind = "ConjugatorInvalid"


SLOTS = ("x", "y", "z", "t")
# slot pairs joined by an edge of a 2x2 square; (x, t) and (y, z) are diagonals
SIDE_PAIRS = (("x", "y"), ("x", "z"), ("y", "t"), ("z", "t"))
OPPOSITE = {"x": "t", "t": "x", "y": "z", "z": "y"}


# ---------------------------------------------------------------- vertices

def _rref(polys) -> tuple:
    """Reduced row-echelon basis of the span, pivots on graded-lex leading terms."""
    rows = [p for p in polys if not p.is_zero()]
    done = []
    while rows:
        rows.sort(key=lambda p: _mono_key(p.leading_term()[0]), reverse=True)
        piv = rows.pop(0)
        e, c = piv.leading_term()
        piv = piv / c
        rows = [r - piv * r.to_dict().get(e, 0) for r in rows]
        rows = [r for r in rows if not r.is_zero()]
        done = [d - piv * d.to_dict().get(e, 0) for d in done]
        done.append(piv)
    return tuple(done)


def _mono_key(e):
    return (sum(e), e)


class Vertex:
    __slots__ = ("kind", "basis", "_key")

    def __init__(self, kind: str, basis: tuple):
        self.kind = kind
        self.basis = basis
        self._key = (kind, tuple(tuple(b.terms()) for b in basis))

    @property
    def rep(self) -> QElem:
        return QElem(self.basis[0], reduced=True)

    def __eq__(self, o):
        return isinstance(o, Vertex) and self._key == o._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, o):
        return self.sort_key() < o.sort_key()

    def sort_key(self):
        return (self.kind, [format_poly(b) for b in self.basis])

    def __str__(self):
        return "[" + ", ".join(format_poly(b) for b in self.basis) + "]"

    __repr__ = __str__


def vertex_canonicalize(kind: str, components, slots=None) -> Vertex:
    """Canonical vertex of type "I", "II" or "III" from component classes.

    For type II the optional slot names are checked for admissibility.
    """
    polys = [QElem(c).nf for c in components]
    if kind == "I":
        if len(polys) != 1 or polys[0].is_constant():
            raise ComplexError("a type I vertex needs one nonconstant component")
        p = polys[0]
        return Vertex("I", (p / p.leading_term()[1],))
    if kind == "II":
        if slots is not None and tuple(sorted(slots, key=SLOTS.index)) not in SIDE_PAIRS:
            raise InadmissiblePair(f"slots {tuple(slots)} do not span an edge")
        basis = _rref(polys)
        if len(polys) != 2 or len(basis) != 2:
            raise ComplexError("a type II vertex needs two independent components")
        return Vertex("II", basis)
    if kind == "III":
        basis = _rref(polys)
        if len(polys) != 4 or len(basis) != 4:
            raise ComplexError("a type III vertex needs four independent components")
        return Vertex("III", basis)
    raise ComplexError(f"unknown vertex kind {kind!r}")


def aut_vertex(F: TameAut) -> Vertex:
    return vertex_canonicalize("III", F.comps)


def act(w: Word, v: Vertex) -> Vertex:
    """g . [f] = [f o g^-1] where g is the value of w."""
    ginv = word_evaluate(w.inverse())
    imgs = [c.nf for c in ginv.comps]
    return vertex_canonicalize(v.kind, [QElem(b.substitute(imgs)) for b in v.basis])


# ---------------------------------------------------------------- squares

class BigSquare:
    """The 2x2 square centered at [G], corners labeled by the slot they come from."""

    def __init__(self, G: TameAut):
        self.aut = G
        self.center = aut_vertex(G)
        self.corners = {s: vertex_canonicalize("I", [c]) for s, c in zip(SLOTS, G.comps)}
        self._mids = None

    @property
    def mids(self) -> dict:
        if self._mids is None:
            idx = {s: i for i, s in enumerate(SLOTS)}
            self._mids = {
                (a, b): vertex_canonicalize("II", [self.aut.comps[idx[a]], self.aut.comps[idx[b]]])
                for a, b in SIDE_PAIRS
            }
        return self._mids

    def horizontal(self, pair) -> bool:
        """Whether the half edges of the side `pair` are horizontal.

        In the standard square the [x]-[x, y] edge is horizontal; the labels
        flip for automorphisms with epsilon = -1.
        """
        base = tuple(pair) in (("x", "y"), ("z", "t"))
        return base if self.aut.epsilon() == 1 else not base

    def corner_set(self):
        return frozenset(self.corners.values())

    def slot_of(self, v: Vertex) -> Optional[str]:
        for s, c in self.corners.items():
            if c == v:
                return s
        return None

    def sides(self):
        return [(self.corners[a], self.corners[b]) for a, b in SIDE_PAIRS]

    def neighbours(self, v: Vertex):
        s = self.slot_of(v)
        return [self.corners[b] if a == s else self.corners[a] for a, b in SIDE_PAIRS if s in (a, b)]

    def same_square(self, other: "BigSquare") -> bool:
        return self.center == other.center and self.corner_set() == other.corner_set()

    def __repr__(self):
        return "BigSquare(" + ", ".join(f"{s}:{self.corners[s]}" for s in SLOTS) + ")"


def standard_square() -> BigSquare:
    return BigSquare(TameAut.identity())


def shared_relation(a: BigSquare, b: BigSquare) -> str:
    """same / adjacent (a common side) / adherent (one common corner) / center / apart."""
    if a.same_square(b):
        return "same"
    common = a.corner_set() & b.corner_set()
    if len(common) >= 2:
        sides_a = {frozenset(s) for s in a.sides()}
        sides_b = {frozenset(s) for s in b.sides()}
        if any(frozenset(p) in sides_a and frozenset(p) in sides_b for p in itertools.combinations(common, 2)):
            return "adjacent"
    if len(common) >= 1:
        return "adherent"
    if a.center == b.center:
        return "center"
    return "apart"


class Gallery:
    def __init__(self, word: Word, squares, relations):
        self.word = word
        self.squares = squares
        self.relations = relations  # relation of square k to square k-1

    def corner_vertices(self):
        seen = {}
        for S in self.squares:
            for s in SLOTS:
                seen.setdefault(S.corners[s], None)
        return list(seen)

    def __len__(self):
        return len(self.squares)


def gallery_from_word(w: Word) -> Gallery:
    """Squares centered at g_k o ... o g_1 for every k, starting at the standard square."""
    squares = [BigSquare(F) for F in prefixes(w)]
    rel = [None] + [shared_relation(squares[i - 1], squares[i]) for i in range(1, len(squares))]
    return Gallery(w, squares, rel)


def flatness_predicate(P: QPoly, R: QPoly) -> bool:
    """Two elementary moves with data P(x, y) and R(x, z) give a flat configuration
    iff dP/dy * dR/dz = 0."""
    return P.derivative("y").is_zero() or R.derivative("z").is_zero()


def flatness_annotations(g: Gallery) -> list:
    """(k, flat) for each pair of consecutive elementary letters of opposite families."""
    out = []
    gens = g.word.applied()
    for k in range(len(gens) - 1):
        a, b = gens[k], gens[k + 1]
        kinds = (a.kind, b.kind)
        if kinds == ("ev", "eh"):
            out.append((k, flatness_predicate(a.P, b.P)))
        elif kinds == ("eh", "ev"):
            out.append((k, flatness_predicate(b.P, a.P)))
    return out


# ---------------------------------------------------------------- C_nu graph

def orientation_report(S: BigSquare, nu: Valuation) -> dict:
    vals = {s: nu_eval(nu, S.corners[s].rep) for s in SLOTS}
    if any(not v < 0 for v in vals.values()):
        raise NonNegativeCorner("a corner has nonnegative value")
    order = sorted(SLOTS, key=lambda s: vals[s])
    vmin = S.corners[order[0]] if vals[order[0]] < vals[order[1]] else None
    vmax = S.corners[order[-1]] if vals[order[-1]] > vals[order[-2]] else None
    identity = vals["x"] + vals["t"] == vals["y"] + vals["z"]
    return {"min": vmin, "max": vmax, "sum_identity": identity, "values": vals}


class CnuGraph:
    def __init__(self, nu: Valuation):
        self.nu = nu
        self.values = {}
        self.edges = {}  # frozenset pair -> label
        self.adj = {}

    def add_vertex(self, v: Vertex):
        if v not in self.values:
            self.values[v] = nu_eval(self.nu, v.rep)
            self.adj[v] = set()

    def add_edge(self, a, b, label):
        key = frozenset((a, b))
        if key in self.edges:
            if label == "Side":
                self.edges[key] = "Side"
            return
        self.edges[key] = label
        self.adj[a].add(b)
        self.adj[b].add(a)

    def add_square(self, S: BigSquare):
        for v in S.corners.values():
            self.add_vertex(v)
        for a, b in S.sides():
            self.add_edge(a, b, "Side")
        rep = orientation_report(S, self.nu) if all(self.values[v] < 0 for v in S.corners.values()) else None
        if rep and rep["min"] is not None and rep["max"] is not None:
            self.add_edge(rep["min"], rep["max"], "Diagonal")

    def to_json(self):
        nodes = sorted(self.values, key=Vertex.sort_key)
        ids = {v: i for i, v in enumerate(nodes)}
        edges = []
        for k, lab in self.edges.items():
            a, b = sorted(ids[v] for v in k)
            edges.append((a, b, lab))
        edges.sort()
        return {
            "nodes": [{"id": ids[v], "vertex": str(v), "nu": str(self.values[v])} for v in nodes],
            "edges": [{"source": a, "target": b, "label": lab} for a, b, lab in edges],
        }

    def to_dot(self):
        js = self.to_json()
        lines = ["graph Cnu {"]
        for n in js["nodes"]:
            lines.append(f'  n{n["id"]} [label="{n["vertex"]}\\nnu={n["nu"]}"];')
        for e in js["edges"]:
            style = " [style=dashed]" if e["label"] == "Diagonal" else ""
            lines.append(f'  n{e["source"]} -- n{e["target"]}{style};')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_cnu_graph(source, nu: Valuation) -> CnuGraph:
    g = CnuGraph(nu)
    squares = source.squares if isinstance(source, Gallery) else source
    for S in squares:
        g.add_square(S)
    return g


def dnu_distance(g: CnuGraph, v1: Vertex, v2: Vertex) -> int:
    if v1 not in g.adj or v2 not in g.adj:
        raise VertexAbsent("vertex not in the explored graph")
    dist = {v1: 0}
    todo = deque([v1])
    while todo:
        u = todo.popleft()
        if u == v2:
            return dist[u]
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                todo.append(w)
    raise VertexAbsent("vertices are not connected in the explored graph")


def dnu_distances_from(g: CnuGraph, v1: Vertex) -> dict:
    dist = {v1: 0}
    todo = deque([v1])
    while todo:
        u = todo.popleft()
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                todo.append(w)
    return dist


# ---------------------------------------------------------------- skeleton distance

SQRT2 = QSqrt2(0, 1)


def _skeleton_edges(S: BigSquare):
    C = S.center
    for (a, b), M in S.mids.items():
        yield S.corners[a], M, QSqrt2(1)
        yield S.corners[b], M, QSqrt2(1)
        yield M, C, QSqrt2(1)
    for s in SLOTS:
        # unit square at corner s: corner, its two midpoints, the center
        ms = [M for (a, b), M in S.mids.items() if s in (a, b)]
        yield S.corners[s], C, SQRT2
        yield ms[0], ms[1], SQRT2


def skeleton_distance_upper(gallery, v1: Vertex, v2: Vertex) -> QSqrt2:
    """Length of a shortest path from v1 to v2 through the explored unit squares.

    Every such path exists in the complex, so this bounds the true distance from above.
    """
    squares = gallery.squares if isinstance(gallery, Gallery) else gallery
    adj = {}
    for S in squares:
        for a, b, w in _skeleton_edges(S):
            adj.setdefault(a, []).append((b, w))
            adj.setdefault(b, []).append((a, w))
    if v1 not in adj or v2 not in adj:
        raise VertexAbsent("vertex not in the explored squares")
    best = {v1: QSqrt2(0)}
    tie = itertools.count()
    heap = [(QSqrt2(0), next(tie), v1)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if u == v2:
            return d
        if d > best[u]:
            continue
        for w, c in adj[u]:
            nd = d + c
            if w not in best or nd < best[w]:
                best[w] = nd
                heapq.heappush(heap, (nd, next(tie), w))
    raise VertexAbsent("vertices are not connected in the explored squares")


# ---------------------------------------------------------------- A-subgroup shape

def _univariate_x(p: QPoly) -> bool:
    return p.variables() <= {"x"}


def matches_stabilizer_shape(F: TameAut) -> bool:
    """(a x, b(y + x P(x)), (z + x S(x))/b, (t + z P + y S + x P S)/a) with P, S in k[x]."""
    fx, fy, fz, ft = (c.nf for c in F.comps)
    X, Y, Z, T = (QPoly.var(v) for v in VARS)
    if fx.variables() != {"x"} or fx.total_degree() != 1 or not fx.derivative("x").is_constant():
        return False
    a = fx.derivative("x").constant_value()
    if fx != X * a:
        return False
    b = fy.derivative("y")
    if not b.is_constant() or b.is_zero():
        return False
    b = b.constant_value()
    restP = fy / b - Y
    restS = fz * b - Z
    for rest in (restP, restS):
        if not _univariate_x(rest) or (not rest.is_zero() and rest.to_dict().get((0, 0, 0, 0))):
            return False
    P = restP.divmod(X)[0]
    S = restS.divmod(X)[0]
    expected = (T + Z * P + Y * S + X * P * S) / a
    return ft == expected


def a_subgroup_member(w: Word, conjugator: Optional[Word] = None, target: Optional[Vertex] = None) -> bool:
    """Whether c o f o c^-1 has the stabilizer shape, for c the conjugator."""
    if conjugator is not None and target is not None:
        if act(conjugator, target) != vertex_canonicalize("I", [QElem.var("x")]):
            raise ConjugatorInvalid("the conjugator does not send the target vertex to [x]")
    word = w if conjugator is None else conjugator + w + conjugator.inverse()
    return matches_stabilizer_shape(word_evaluate(word))


# ---------------------------------------------------------------- section-5 checks

def condition_seven(nu: Valuation) -> bool:
    vx, vy, vz, vt = (nu_eval(nu, QElem.var(v)) for v in VARS)
    return max(vy + vt, vz + vt) < vx < min(vy, vz, vt)


def verify_section5(gallery: Gallery, nu: Valuation) -> dict:
    """Square-level checks on an explored gallery.

    lemma53: sum identity and min/max duality per square.
    lemma54: minimal corners propagate across shared sides.
    drop43: across a shared side whose minimal end v1 belongs to a pair that
        is not critically resonant, the new corners v' satisfy
        nu(v') < min(4/3 nu(v2), nu(v1)).
    thm51: nu(v) <= (4/3)^(d - 1) max(nu(x), nu(y), nu(z), nu(t)) with d the
        explored C_nu distance to [t]; an explored distance only overestimates
        the true one, which makes the bound stronger.
    Each entry is "pass", "fail" or "skipped".
    """
    if not condition_seven(nu):
        raise ConditionSevenViolated("the weights do not satisfy the asymmetry condition")
    squares = gallery.squares
    graph = build_cnu_graph(gallery, nu)
    val = graph.values
    report = {"lemma53": [], "lemma54": [], "drop43": [], "thm51": []}
    orient = []
    for i, S in enumerate(squares):
        o = orientation_report(S, nu)
        orient.append(o)
        dual = (o["min"] is None) == (o["max"] is None)
        report["lemma53"].append({"square": i, "result": "pass" if (o["sum_identity"] and dual) else "fail"})

    for i, j in itertools.permutations(range(len(squares)), 2):
        S, T2 = squares[i], squares[j]
        if shared_relation(S, T2) != "adjacent":
            continue
        vmin = orient[i]["min"]
        common = S.corner_set() & T2.corner_set()
        if vmin is None or vmin not in common:
            continue
        others = [u for u in common if u != vmin and frozenset((u, vmin)) in {frozenset(s) for s in S.sides()}]
        if not others:
            continue
        v2 = others[0]
        new = [u for u in T2.neighbours(vmin) if u not in S.corner_set()]
        ok = len(new) == 1 and orient[j]["min"] == new[0]
        report["lemma54"].append({"squares": [i, j], "result": "pass" if ok else "fail"})

        if resonance_classify(nu, vmin.rep, v2.rep).critical:
            report["drop43"].append({"squares": [i, j], "result": "skipped"})
            continue
        bound = min(val[v2] * Fraction(4, 3), val[vmin])
        rest = [u for u in T2.corners.values() if u not in (vmin, v2)]
        ok = all(val[u] < bound for u in rest)
        report["drop43"].append({"squares": [i, j], "result": "pass" if ok else "fail"})

    t = vertex_canonicalize("I", [QElem.var("t")])
    dist = dnu_distances_from(graph, t)
    top = max(val[vertex_canonicalize("I", [QElem.var(v)])] for v in VARS)
    for v in sorted(graph.values, key=Vertex.sort_key):
        d = dist.get(v)
        if d is None:
            report["thm51"].append({"vertex": str(v), "result": "skipped"})
            continue
        bound = top * Fraction(4, 3) ** (d - 1) if d >= 1 else top * Fraction(3, 4)
        ok = val[v] <= bound
        report["thm51"].append({"vertex": str(v), "d_nu": d, "result": "pass" if ok else "fail"})
    report["all_pass"] = all(e["result"] != "fail" for k in ("lemma53", "lemma54", "drop43", "thm51") for e in report[k])
    return report
