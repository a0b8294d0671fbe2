"""Jacobian algebras: graded dimensions and the quiver of eJe.

All computations are exact and degree by degree. The Jacobian ideal is
generated by the cyclic derivatives of the potential; when every derivative
is homogeneous in path length the ideal is graded, and the dimension of each
graded piece is the number of paths of that length minus the rank of the
ideal in that length.
"""
from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import JacobianNotFinite, NonHomogeneousPotential, UnknownVertex
from .linalg import EchelonBasis
from .qp import QP, Arrow, Path, Potential, Quiver, VertexSubset, cyclic_derivative

DEFAULT_MAX_DEGREE = 64
# past this many paths in a single degree the computation is abandoned
MAX_PATHS_PER_DEGREE = 200_000


def default_max_degree() -> int:
    raw = os.environ.get("QPT_MAX_DEGREE")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return DEFAULT_MAX_DEGREE


@dataclass(frozen=True)
class Relation:
    arrow: str
    src: str  # target of the arrow
    tgt: str  # source of the arrow
    terms: Tuple[Tuple[Fraction, Path], ...]


@dataclass(frozen=True)
class RelationSet:
    relations: Tuple[Relation, ...]
    homogeneous: bool


def relations(qp: QP) -> RelationSet:
    """Cyclic derivatives of the potential, one per arrow that occurs in it."""
    rels = []
    for a in qp.arrows:
        terms = cyclic_derivative(qp.potential, a.id)
        if terms:
            rels.append(Relation(a.id, a.tgt, a.src, tuple(terms)))
    homogeneous = all(len({len(p) for _, p in r.terms}) == 1 for r in rels)
    return RelationSet(tuple(rels), homogeneous)


@dataclass(frozen=True)
class GradedDims:
    """Dimensions of the graded pieces J_0, J_1, ... and a verdict.

    verdict is "finite" (some piece vanished, total is the sum),
    "infinite" (a cycle provably survives) or "unknown" (bound reached).
    """

    dims: Tuple[int, ...]
    verdict: str
    total: Optional[int] = None
    note: str = ""

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"


def enumerate_paths(q: Quiver, i: str, j: str, max_len: int) -> List[Path]:
    """Paths from i to j of length at most max_len in shortlex order.

    The trivial path at i is the empty tuple.
    """
    for v in (i, j):
        if v not in q.vertices:
            raise UnknownVertex(v)
    out: List[Path] = [()] if i == j else []
    layer: List[Tuple[Path, str]] = [((), i)]
    by_src = defaultdict(list)
    for a in sorted(q.arrows, key=lambda a: a.id):
        by_src[a.src].append(a)
    for _ in range(max_len):
        nxt = []
        for p, end in layer:
            for a in by_src[end]:
                nxt.append((p + (a.id,), a.tgt))
        nxt.sort()
        out.extend(p for p, end in nxt if end == j)
        layer = nxt
        if not layer:
            break
    return out


class _PathTable:
    """Paths grouped by length, with lookup by endpoint."""

    def __init__(self, q: Quiver):
        self.q = q
        self.amap = q.arrow_map()
        self.by_src = defaultdict(list)
        for a in q.arrows:
            self.by_src[a.src].append(a)
        # length -> list of (path, src, tgt)
        self.layers: List[List[Tuple[Path, str, str]]] = [[((), v, v) for v in q.vertices]]
        self._ending: List[Dict[str, List[Path]]] = []
        self._starting: List[Dict[str, List[Path]]] = []
        self._index_layer(0)

    def _index_layer(self, d: int) -> None:
        ending = defaultdict(list)
        starting = defaultdict(list)
        for p, s, t in self.layers[d]:
            ending[t].append(p)
            starting[s].append(p)
        self._ending.append(ending)
        self._starting.append(starting)

    def extend(self) -> int:
        nxt = []
        for p, s, t in self.layers[-1]:
            for a in self.by_src[t]:
                nxt.append((p + (a.id,), s, a.tgt))
                if len(nxt) > MAX_PATHS_PER_DEGREE:
                    return -1
        self.layers.append(nxt)
        self._index_layer(len(self.layers) - 1)
        return len(nxt)

    def ending_at(self, v: str, d: int) -> List[Path]:
        return self._ending[d].get(v, [])

    def starting_at(self, v: str, d: int) -> List[Path]:
        return self._starting[d].get(v, [])


def _ideal_vectors(table: _PathTable, rels: RelationSet, d: int, ends=None):
    """Spanning vectors u*r*v of the ideal in path length d.

    If ends is given, only vectors between those (src, tgt) pairs are made.
    """
    for r in rels.relations:
        length = len(r.terms[0][1])
        if length > d:
            continue
        for left in range(d - length + 1):
            right = d - length - left
            for u in table.ending_at(r.src, left):
                s = table.amap[u[0]].src if u else r.src
                for w in table.starting_at(r.tgt, right):
                    t = table.amap[w[-1]].tgt if w else r.tgt
                    if ends is not None and (s, t) not in ends:
                        continue
                    vec: Dict[Path, Fraction] = {}
                    for c, p in r.terms:
                        key = u + p + w
                        vec[key] = vec.get(key, Fraction(0)) + c
                    yield s, t, vec


def _cycle_outside_potential(qp: QP) -> bool:
    used = qp.potential.arrows_used()
    free = Quiver(qp.vertices, tuple(a for a in qp.arrows if a.id not in used))
    return not free.is_acyclic()


def jacobian_dims(qp: QP, max_degree: Optional[int] = None) -> GradedDims:
    """Graded dimensions of the Jacobian algebra, degree 0 upwards.

    A nonzero potential that leaves some oriented cycle untouched gives an
    infinite-dimensional algebra, which is reported as "infinite" straight
    away. With the zero potential the algebra is the path algebra and only
    path counting is done.
    """
    if max_degree is None:
        max_degree = default_max_degree()
    rels = relations(qp)
    if not rels.homogeneous:
        raise NonHomogeneousPotential("some cyclic derivative mixes path lengths")
    q = qp.quiver
    n = len(q.vertices)
    if not qp.potential:
        adj = q.adjacency()
        row = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        dims = [n]
        for d in range(1, max_degree + 1):
            row = [[sum(row[i][k] * adj[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
            count = sum(map(sum, row))
            dims.append(count)
            if count == 0:
                return GradedDims(tuple(dims), "finite", sum(dims))
        return GradedDims(tuple(dims), "unknown", None, f"degree bound {max_degree} reached")
    if _cycle_outside_potential(qp):
        return GradedDims((n,), "infinite", None, "an oriented cycle avoids the potential")

    table = _PathTable(q)
    dims = [n]
    for d in range(1, max_degree + 1):
        count = table.extend()
        if count < 0:
            return GradedDims(tuple(dims), "unknown", None, f"more than {MAX_PATHS_PER_DEGREE} paths in degree {d}")
        basis = EchelonBasis()
        for _, _, vec in _ideal_vectors(table, rels, d):
            basis.add(vec)
        dims.append(count - len(basis))
        if dims[-1] == 0:
            return GradedDims(tuple(dims), "finite", sum(dims))
    return GradedDims(tuple(dims), "unknown", None, f"degree bound {max_degree} reached")


@dataclass(frozen=True)
class EjeQuiver:
    """Quiver of eJe for the idempotent e of the complement of I.

    Every arrow carries a witness: a path of the original quiver whose class
    spans that arrow modulo the square of the radical.
    """

    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    witnesses: Dict[str, Path] = field(default_factory=dict)

    def as_qp(self) -> QP:
        return QP(Quiver(self.vertices, self.arrows), Potential())

    def arrow_matrix(self) -> List[List[int]]:
        return Quiver(self.vertices, self.arrows).adjacency()


def eje_quiver(qp: QP, sub: VertexSubset, max_degree: Optional[int] = None) -> EjeQuiver:
    gd = jacobian_dims(qp, max_degree)
    if not gd.is_finite:
        raise JacobianNotFinite(gd.note or gd.verdict)
    q = qp.quiver
    keep = sub.complement
    keep_set = set(keep)
    rels = relations(qp)
    table = _PathTable(q)
    top = len(gd.dims) - 1
    found: List[Tuple[int, int, int, Path]] = []
    pos = {v: i for i, v in enumerate(q.vertices)}
    for d in range(1, top):
        table.extend()
        ends = {(i, j) for i in keep for j in keep}
        bases: Dict[Tuple[str, str], EchelonBasis] = defaultdict(EchelonBasis)
        for s, t, vec in _ideal_vectors(table, rels, d, ends):
            bases[(s, t)].add(vec)
        candidates: Dict[Tuple[str, str], List[Path]] = defaultdict(list)
        for p, s, t in table.layers[d]:
            if s not in keep_set or t not in keep_set:
                continue
            inner = [table.amap[x].tgt for x in p[:-1]]
            if any(v in keep_set for v in inner):
                bases[(s, t)].add({p: Fraction(1)})
            else:
                candidates[(s, t)].append(p)
        for (s, t), paths in candidates.items():
            for p in sorted(paths):
                if bases[(s, t)].add({p: Fraction(1)}):
                    found.append((pos[s], pos[t], d, p))
    found.sort()
    arrows = []
    witnesses = {}
    taken = set()
    for s, t, d, p in found:
        base = ".".join(p)
        aid = base
        while aid in taken:
            aid += "'"
        taken.add(aid)
        arrows.append(Arrow(aid, q.vertices[s], q.vertices[t]))
        witnesses[aid] = p
    return EjeQuiver(tuple(keep), tuple(arrows), witnesses)
