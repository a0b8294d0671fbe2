"""Quivers with potential and their mutation.

Paths are tuples of arrow ids in travel order, so ``("a", "b")`` means
first ``a`` then ``b``. A potential is a finite linear combination of cycles,
each cycle kept at its lexicographically smallest rotation.

Mutation follows the usual two steps: ``premutate`` reverses the arrows at
the mutation vertex and adds composite arrows, then ``reduce`` removes the
2-cycles carried by quadratic terms of the potential.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import IndexOutOfRange, InvalidQP, ReductionUnsupported, UnknownArrow, UnknownVertex

Path = Tuple[str, ...]
Term = Tuple[Fraction, Path]

DEFAULT_MAX_CYCLE_LENGTH = 12


@dataclass(frozen=True)
class Arrow:
    id: str
    src: str
    tgt: str


@dataclass(frozen=True)
class Quiver:
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))

    def arrow(self, aid: str) -> Arrow:
        for a in self.arrows:
            if a.id == aid:
                return a
        raise UnknownArrow(aid)

    def arrow_map(self) -> Dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    def index(self, v: str) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise UnknownVertex(v) from None

    def arrows_between(self, i: str, j: str) -> List[Arrow]:
        return [a for a in self.arrows if a.src == i and a.tgt == j]

    def adjacency(self) -> List[List[int]]:
        """Entry [i][j] counts arrows from vertex i to vertex j."""
        pos = {v: n for n, v in enumerate(self.vertices)}
        m = [[0] * len(self.vertices) for _ in self.vertices]
        for a in self.arrows:
            m[pos[a.src]][pos[a.tgt]] += 1
        return m

    def is_acyclic(self) -> bool:
        indeg = Counter(a.tgt for a in self.arrows)
        out = defaultdict(list)
        for a in self.arrows:
            out[a.src].append(a.tgt)
        ready = [v for v in self.vertices if indeg[v] == 0]
        seen = 0
        while ready:
            v = ready.pop()
            seen += 1
            for w in out[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        return seen == len(self.vertices)

    def path_source(self, path: Path) -> str:
        return self.arrow(path[0]).src

    def path_target(self, path: Path) -> str:
        return self.arrow(path[-1]).tgt


def min_rotation(cycle: Sequence[str]) -> Path:
    cycle = tuple(cycle)
    if not cycle:
        return cycle
    return min(cycle[i:] + cycle[:i] for i in range(len(cycle)))


@dataclass(frozen=True)
class Potential:
    """Linear combination of cycles. Build with ``Potential.of``."""

    terms: Tuple[Term, ...] = ()

    @staticmethod
    def of(terms: Iterable[Tuple[object, Sequence[str]]]) -> "Potential":
        acc: Dict[Path, Fraction] = {}
        for coeff, cycle in terms:
            key = min_rotation(cycle)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
        keys = sorted((k for k, c in acc.items() if c != 0), key=lambda k: (len(k), k))
        return Potential(tuple((acc[k], k) for k in keys))

    def __add__(self, other: "Potential") -> "Potential":
        return Potential.of(list(self.terms) + list(other.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def scale(self, c) -> "Potential":
        return Potential.of((Fraction(c) * x, p) for x, p in self.terms)

    def arrows_used(self) -> set:
        return {a for _, p in self.terms for a in p}

    def max_length(self) -> int:
        return max((len(p) for _, p in self.terms), default=0)


@dataclass(frozen=True)
class QP:
    quiver: Quiver
    potential: Potential = field(default_factory=Potential)

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.quiver.vertices

    @property
    def arrows(self) -> Tuple[Arrow, ...]:
        return self.quiver.arrows

    @staticmethod
    def build(vertices, arrows, potential=()) -> "QP":
        """Convenience constructor: arrows as (id, src, tgt) triples and
        potential as (coeff, cycle) pairs."""
        arr = tuple(a if isinstance(a, Arrow) else Arrow(*a) for a in arrows)
        pot = potential if isinstance(potential, Potential) else Potential.of(potential)
        return QP(Quiver(tuple(str(v) for v in vertices), arr), pot)


@dataclass(frozen=True)
class VertexSubset:
    """A proper subset I of the vertex set, kept in quiver order."""

    vertices: Tuple[str, ...]
    members: Tuple[str, ...]

    @staticmethod
    def of(qp_or_quiver, members: Iterable[str]) -> "VertexSubset":
        q = qp_or_quiver.quiver if isinstance(qp_or_quiver, QP) else qp_or_quiver
        members = {str(m) for m in members}
        for m in members:
            if m not in q.vertices:
                raise UnknownVertex(m)
        if len(members) == len(q.vertices):
            raise IndexOutOfRange("subset must be proper")
        return VertexSubset(q.vertices, tuple(v for v in q.vertices if v in members))

    @property
    def complement(self) -> Tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.members)

    def indices(self) -> Tuple[int, ...]:
        return tuple(self.vertices.index(v) for v in self.members)

    def complement_indices(self) -> Tuple[int, ...]:
        return tuple(self.vertices.index(v) for v in self.complement)

    def __contains__(self, v) -> bool:
        return v in self.members


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: Tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.kind}: {', '.join(self.ids)}"


def validate_qp(qp: QP) -> List[Violation]:
    """All structural problems of a QP; an empty list means it is valid."""
    out: List[Violation] = []
    q = qp.quiver
    for v, n in Counter(q.vertices).items():
        if n > 1:
            out.append(Violation("duplicate_vertex", (v,)))
    for a, n in Counter(a.id for a in q.arrows).items():
        if n > 1:
            out.append(Violation("duplicate_arrow", (a,)))
    vs = set(q.vertices)
    for a in q.arrows:
        if a.src not in vs or a.tgt not in vs:
            out.append(Violation("unknown_vertex", (a.id,)))
        if a.src == a.tgt:
            out.append(Violation("loop", (a.id,)))
    seen = set()
    for a in q.arrows:
        for b in q.arrows:
            if a.src == b.tgt and a.tgt == b.src and a.src != a.tgt:
                pair = tuple(sorted((a.id, b.id)))
                if pair not in seen:
                    seen.add(pair)
                    out.append(Violation("two_cycle", pair))
    amap = q.arrow_map()
    for _, cyc in qp.potential.terms:
        missing = [x for x in cyc if x not in amap]
        if missing:
            out.append(Violation("unknown_arrow", tuple(missing)))
            continue
        if not cyc:
            out.append(Violation("empty_cycle", ()))
            continue
        for x, y in zip(cyc, cyc[1:] + cyc[:1]):
            if amap[x].tgt != amap[y].src:
                out.append(Violation("not_a_cycle", cyc))
                break
    return out


def check_qp(qp: QP) -> QP:
    bad = validate_qp(qp)
    if bad:
        raise InvalidQP(bad)
    return qp


# ---------------------------------------------------------------- derivatives


def cyclic_derivative(pot: Potential | Iterable[Term], aid: str) -> List[Term]:
    """Cyclic derivative with respect to one arrow, as (coeff, path) pairs.

    Each summand runs from the target of the arrow back to its source.
    """
    terms = pot.terms if isinstance(pot, Potential) else pot
    acc: Dict[Path, Fraction] = defaultdict(Fraction)
    for c, cyc in terms:
        for i, x in enumerate(cyc):
            if x == aid:
                acc[cyc[i + 1:] + cyc[:i]] += c
    return [(c, p) for p, c in sorted(acc.items()) if c != 0]


# ---------------------------------------------------------------- premutation


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def premutate(qp: QP, k: str) -> QP:
    """Reverse the arrows at k and add one composite arrow for each path of
    length two through k. The result may contain 2-cycles."""
    q = qp.quiver
    if k not in q.vertices:
        raise UnknownVertex(k)
    taken = {a.id for a in q.arrows}
    incoming = [a for a in q.arrows if a.tgt == k]
    outgoing = [a for a in q.arrows if a.src == k]
    keep = [a for a in q.arrows if a.src != k and a.tgt != k]

    composite: Dict[Tuple[str, str], str] = {}
    new_arrows: List[Arrow] = list(keep)
    for a in incoming:
        for b in outgoing:
            cid = _fresh(f"[{a.id}{b.id}]", taken)
            composite[(a.id, b.id)] = cid
            new_arrows.append(Arrow(cid, a.src, b.tgt))
    star: Dict[str, str] = {}
    for a in incoming + outgoing:
        sid = _fresh(f"{a.id}*", taken)
        star[a.id] = sid
        new_arrows.append(Arrow(sid, a.tgt, a.src))

    into_k = {a.id for a in incoming}
    out_of_k = {a.id for a in outgoing}
    terms: List[Tuple[Fraction, Path]] = []
    for c, cyc in qp.potential.terms:
        n = len(cyc)
        # rotate so the cycle does not start inside a passage through k
        start = 0
        if n and cyc[0] in out_of_k:
            start = 1
        rot = cyc[start:] + cyc[:start]
        out: List[str] = []
        i = 0
        while i < n:
            x = rot[i]
            if x in into_k:
                y = rot[(i + 1) % n]
                out.append(composite[(x, y)])
                i += 2
            else:
                out.append(x)
                i += 1
        terms.append((c, tuple(out)))
    for a in incoming:
        for b in outgoing:
            terms.append((Fraction(1), (composite[(a.id, b.id)], star[b.id], star[a.id])))
    return QP(Quiver(q.vertices, tuple(new_arrows)), Potential.of(terms))


# ---------------------------------------------------------------- reduction


def _substitute(terms: Iterable[Term], subs: Mapping[str, List[Term]]) -> List[Term]:
    out: List[Term] = []
    for c, cyc in terms:
        choices = [subs.get(x, [(Fraction(1), (x,))]) for x in cyc]
        for combo in itertools.product(*choices):
            coeff = c
            path: Tuple[str, ...] = ()
            for cc, p in combo:
                coeff *= cc
                path += p
            if coeff:
                out.append((coeff, path))
    return out


def _two_cycles(q: Quiver) -> List[Tuple[Arrow, Arrow]]:
    out = []
    for a in q.arrows:
        for b in q.arrows:
            if a.src == b.tgt and a.tgt == b.src and a.src != a.tgt and a.id < b.id:
                out.append((a, b))
    return out


def _eliminate_pair(pot: Potential, u: str, v: str, bound: int) -> Potential:
    """Change variables until u and v only occur in the quadratic term uv."""
    quad = min_rotation((u, v))
    last = 0
    while True:
        c = dict((p, x) for x, p in pot.terms)[quad]
        rest = [(x, p) for x, p in pot.terms if p != quad]
        touching = [len(p) for _, p in rest if u in p or v in p]
        if not touching:
            return pot
        shortest = min(touching)
        if shortest <= last:
            raise ReductionUnsupported(f"elimination of {u}, {v} does not converge")
        last = shortest
        du = cyclic_derivative(rest, u)
        dv = cyclic_derivative(rest, v)
        subs = {
            u: [(Fraction(1), (u,))] + [(-x / c, p) for x, p in dv],
            v: [(Fraction(1), (v,))] + [(-x / c, p) for x, p in du],
        }
        pot = Potential.of(_substitute(pot.terms, subs))
        if pot.max_length() > bound:
            raise ReductionUnsupported(f"potential term longer than {bound} while eliminating {u}, {v}")


def reduce(qp: QP, max_cycle_length: int = DEFAULT_MAX_CYCLE_LENGTH) -> QP:
    """Remove the 2-cycles of qp that carry quadratic potential terms.

    Raises ReductionUnsupported if some 2-cycle has no quadratic term, or if
    the change of variables does not terminate within the length bound.
    """
    q = qp.quiver
    pot = qp.potential
    if not _two_cycles(q):
        return qp
    amap = q.arrow_map()
    quads = [(c, p) for c, p in pot.terms if len(p) == 2]
    used: set = set()
    pairs = []
    for c, (u, v) in quads:
        if u in used or v in used:
            raise ReductionUnsupported(f"quadratic terms overlap at {u}/{v}")
        if amap[u].src == amap[u].tgt:
            raise ReductionUnsupported(f"loop {u} in quadratic term")
        used.update((u, v))
        pairs.append((u, v))
    rest_arrows = [a for a in q.arrows if a.id not in used]
    leftover = _two_cycles(Quiver(q.vertices, tuple(rest_arrows)))
    if leftover:
        a, b = leftover[0]
        raise ReductionUnsupported(f"2-cycle {a.id}, {b.id} has no quadratic term")
    for u, v in pairs:
        pot = _eliminate_pair(pot, u, v, max_cycle_length)
    for u, v in pairs:
        pot = Potential(tuple(t for t in pot.terms if u not in t[1] and v not in t[1]))
    leftovers = pot.arrows_used() & used
    if leftovers:
        raise ReductionUnsupported(f"arrows {sorted(leftovers)} survive reduction")
    return QP(Quiver(q.vertices, tuple(rest_arrows)), pot)


def mutate(qp: QP, k: str, max_cycle_length: int = DEFAULT_MAX_CYCLE_LENGTH) -> QP:
    """Mutation at vertex k: premutation followed by reduction."""
    return reduce(premutate(qp, k), max_cycle_length)


def restrict(qp: QP, keep: Iterable[str] | VertexSubset) -> QP:
    """Full subquiver on ``keep`` with the potential terms supported there."""
    members = keep.members if isinstance(keep, VertexSubset) else tuple(keep)
    for v in members:
        if v not in qp.vertices:
            raise UnknownVertex(v)
    ks = set(members)
    arrows = tuple(a for a in qp.arrows if a.src in ks and a.tgt in ks)
    ids = {a.id for a in arrows}
    terms = tuple(t for t in qp.potential.terms if set(t[1]) <= ids)
    return QP(Quiver(tuple(v for v in qp.vertices if v in ks), arrows), Potential(terms))


def ext1_matrix(qp: QP) -> List[List[int]]:
    """Arrow counts, read as dim Ext^1(S_i, S_j) for an arrow i -> j."""
    return qp.quiver.adjacency()


def tidy_ids(qp: QP, prefix: str = "a") -> QP:
    """Rename arrows to prefix1, prefix2, ... in their current order."""
    ren = {a.id: f"{prefix}{n}" for n, a in enumerate(qp.arrows, 1)}
    arrows = tuple(Arrow(ren[a.id], a.src, a.tgt) for a in qp.arrows)
    pot = Potential.of((c, tuple(ren[x] for x in p)) for c, p in qp.potential.terms)
    return QP(Quiver(qp.vertices, arrows), pot)


# ---------------------------------------------------------------- Ginzburg


@dataclass(frozen=True)
class GinzburgArrow:
    id: str
    src: str
    tgt: str
    degree: int


@dataclass(frozen=True)
class GinzburgData:
    """Graded quiver and differential of the Ginzburg dg algebra."""

    vertices: Tuple[str, ...]
    arrows: Tuple[GinzburgArrow, ...]
    differential: Dict[str, Tuple[Term, ...]]


def ginzburg(qp: QP) -> GinzburgData:
    arrows: List[GinzburgArrow] = []
    for a in qp.arrows:
        arrows.append(GinzburgArrow(a.id, a.src, a.tgt, 0))
    for a in qp.arrows:
        arrows.append(GinzburgArrow(a.id + "^", a.tgt, a.src, -1))
    for v in qp.vertices:
        arrows.append(GinzburgArrow(f"l{v}", v, v, -2))
    diff: Dict[str, Tuple[Term, ...]] = {}
    for a in qp.arrows:
        diff[a.id + "^"] = tuple(cyclic_derivative(qp.potential, a.id))
    for v in qp.vertices:
        terms: List[Term] = []
        for a in qp.arrows:
            if a.src == v:
                terms.append((Fraction(1), (a.id, a.id + "^")))
            if a.tgt == v:
                terms.append((Fraction(-1), (a.id + "^", a.id)))
        diff[f"l{v}"] = tuple(terms)
    return GinzburgData(qp.vertices, tuple(arrows), diff)


# ---------------------------------------------------------------- canonical form


def _refine(n: int, adj: List[List[int]], colors: List[int]) -> List[int]:
    while True:
        sigs = []
        for i in range(n):
            outs = tuple(sorted((colors[j], adj[i][j]) for j in range(n) if adj[i][j]))
            ins = tuple(sorted((colors[j], adj[j][i]) for j in range(n) if adj[j][i]))
            sigs.append((colors[i], outs, ins))
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _leaves(n: int, adj: List[List[int]], colors: List[int]):
    colors = _refine(n, adj, colors)
    if len(set(colors)) == n:
        yield colors
        return
    cells = Counter(colors)
    target = min(c for c, m in cells.items() if m > 1)
    for v in [i for i in range(n) if colors[i] == target]:
        # individualize v: it alone drops just below the rest of its cell
        indiv = [2 * c + 1 for c in colors]
        indiv[v] = 2 * target
        yield from _leaves(n, adj, indiv)


def canonical_form(qp: QP) -> Tuple[QP, Dict[str, str]]:
    """Canonical representative of the isomorphism class of qp.

    Returns the relabelled QP (vertices "1".."n", arrows "a1"...) and the
    vertex map old -> new. Two QPs are isomorphic (arrow renaming plus vertex
    renaming, potential matched term by term) iff their canonical forms are
    equal.
    """
    q = qp.quiver
    n = len(q.vertices)
    pos = {v: i for i, v in enumerate(q.vertices)}
    adj = q.adjacency()
    # potential participation per vertex makes the refinement sharper
    touch = [0] * n
    amap = q.arrow_map()
    for _, p in qp.potential.terms:
        for x in p:
            touch[pos[amap[x].src]] += 1
    init_sig = [(touch[i],) for i in range(n)]
    ranks = {s: r for r, s in enumerate(sorted(set(init_sig)))}
    start = [ranks[s] for s in init_sig]

    groups: Dict[Tuple[int, int], List[str]] = defaultdict(list)
    for a in q.arrows:
        groups[(pos[a.src], pos[a.tgt])].append(a.id)

    best = None
    for leaf in _leaves(n, adj, start):
        order = sorted(range(n), key=lambda i: leaf[i])
        new_index = {old: new for new, old in enumerate(order)}
        keys = sorted(groups, key=lambda st: (new_index[st[0]], new_index[st[1]]))
        arrow_pairs = tuple(
            (new_index[s], new_index[t]) for (s, t) in keys for _ in groups[(s, t)]
        )
        parallel = [itertools.permutations(groups[key]) for key in keys]
        for choice in itertools.product(*parallel):
            idx = {}
            c = 0
            for perm in choice:
                for aid in perm:
                    idx[aid] = c
                    c += 1
            pot_code = tuple(
                sorted((min_rotation(tuple(idx[x] for x in p)), coeff) for coeff, p in qp.potential.terms)
            )
            code = (arrow_pairs, pot_code)
            if best is None or code < best[0]:
                best = (code, order, dict(idx))
    if best is None:  # empty quiver
        return QP(Quiver(()), Potential()), {}
    (arrow_pairs, pot_code), order, idx = best
    vnames = [str(i + 1) for i in range(n)]
    arrows = tuple(Arrow(f"a{m + 1}", vnames[s], vnames[t]) for m, (s, t) in enumerate(arrow_pairs))
    pot = Potential.of((coeff, tuple(f"a{x + 1}" for x in cyc)) for cyc, coeff in pot_code)
    relabel = {q.vertices[old]: vnames[new] for new, old in enumerate(order)}
    return QP(Quiver(tuple(vnames), arrows), pot), relabel


def is_isomorphic(a: QP, b: QP) -> bool:
    return canonical_form(a)[0] == canonical_form(b)[0]
