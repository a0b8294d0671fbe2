"""Finite hearts, simple tilts and exchange graphs.

A heart is stored through its simples, indexed by the vertices of the base
quiver. Tilting at simple k replaces it by its shift and every other simple
by a cone (see ``CY3Category.cone_forward``). Alongside the objects each
heart carries

* the quiver with potential mutated in step with the tilts, whose arrow
  counts must equal the Ext^1 dimensions between simples, and
* the c-matrix, the classes of the simples in the Grothendieck group.

Both are updated from the quiver alone, so they stay available when some
simple is opaque.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    NotIndependentSet,
    OpaqueHeart,
    OpaqueSource,
    QPTError,
    ReductionUnsupported,
    SearchBoundExceeded,
    UnknownVertex,
)
from .linalg import rank, to_fraction_matrix
from .objects import CY3Category, CYObject, category
from .qp import QP, VertexSubset, ext1_matrix, mutate, tidy_ids

Column = Tuple[int, ...]


def heart_key(simples: Sequence[CYObject]) -> str:
    """Order-free key of a heart all of whose simples are representable."""
    return " ".join(s.display() for s in sorted(simples, key=CYObject.sort_key))


@dataclass(frozen=True, eq=False)
class Heart:
    simples: Tuple[CYObject, ...]
    qp: Optional[QP]
    c_matrix: Tuple[Column, ...]
    key: str
    cat: CY3Category = field(repr=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, Heart) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def representable(self) -> bool:
        return all(s.representable for s in self.simples)

    @property
    def n(self) -> int:
        return len(self.simples)

    def arrows(self) -> List[List[int]]:
        if self.qp is None:
            raise ReductionUnsupported(f"no quiver available for heart {self.key}")
        return ext1_matrix(self.qp)

    def ext1_matrix(self) -> List[List[int]]:
        """dim Ext^1(S_i, S_j) computed from the objects themselves."""
        if not self.representable:
            raise OpaqueHeart(self.key)
        return [[self.cat.ext1_cy3(a, b)[0] for b in self.simples] for a in self.simples]

    def index_of(self, v: str) -> int:
        return self.cat.quiver.index(v)


def standard_heart(qp: QP) -> Heart:
    """The heart of modules over the Jacobian algebra, simples S_1..S_n."""
    cat = category(qp.quiver)
    n = len(qp.vertices)
    simples = tuple(CYObject.rep(cat.simple_root(v)) for v in qp.vertices)
    cols = tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n))
    return Heart(simples, tidy_ids(qp), cols, heart_key(simples), cat)


def _mutated(qp: Optional[QP], k: int) -> Optional[QP]:
    if qp is None:
        return None
    try:
        return tidy_ids(mutate(qp, qp.vertices[k]))
    except ReductionUnsupported:
        return None


def _check_index(h: Heart, k: int) -> None:
    if not 0 <= k < h.n:
        from .errors import IndexOutOfRange

        raise IndexOutOfRange(f"simple index {k} out of range 0..{h.n - 1}")


def _tilt(h: Heart, k: int, forward: bool, allow_opaque: bool) -> Heart:
    _check_index(h, k)
    s = h.simples[k]
    if not s.representable and not allow_opaque:
        raise OpaqueSource(f"simple {k} of heart {h.key} is opaque")
    adj = h.arrows() if h.qp is not None else None
    tag = ">+" if forward else ">-"
    new: List[CYObject] = []
    for j, sj in enumerate(h.simples):
        if j == k:
            if s.representable:
                new.append(s.shifted(1 if forward else -1))
            else:
                new.append(CYObject.opaque(f"{s.provenance}[{1 if forward else -1}]"))
            continue
        prov = f"{h.key}{tag}{k}:{j}"
        if s.representable and sj.representable:
            cone = h.cat.cone_forward if forward else h.cat.cone_backward
            new.append(cone(s, sj, prov))
        elif adj is not None and (adj[j][k] if forward else adj[k][j]) == 0:
            new.append(sj)
        else:
            new.append(CYObject.opaque(prov))
    # classes: c'_k = -c_k, c'_j = c_j + (arrows j->k or k->j) c_k
    if adj is not None:
        ck = h.c_matrix[k]
        cols = []
        for j, cj in enumerate(h.c_matrix):
            if j == k:
                cols.append(tuple(-x for x in ck))
            else:
                m = adj[j][k] if forward else adj[k][j]
                cols.append(tuple(x + m * y for x, y in zip(cj, ck)))
        c_matrix = tuple(cols)
    else:
        if not all(o.representable for o in new):
            raise ReductionUnsupported(f"cannot follow classes past heart {h.key}")
        c_matrix = tuple(o.class_vector() for o in new)
    for j, o in enumerate(new):
        if o.representable and o.class_vector() != c_matrix[j]:
            raise QPTError(f"class mismatch for simple {j} after tilting {h.key} at {k}")
    simples = tuple(new)
    if all(o.representable for o in simples):
        key = heart_key(simples)
    else:
        key = f"~{h.key}{tag}{k}"
    return Heart(simples, _mutated(h.qp, k), c_matrix, key, h.cat)


def forward_tilt(h: Heart, k: int) -> Heart:
    """Tilt at the torsion-free class generated by simple k: S_k becomes
    S_k[1] and every S_j sits in a triangle S_k^e -> F_j -> S_j."""
    return _tilt(h, k, True, False)


def backward_tilt(h: Heart, k: int) -> Heart:
    """Tilt at the torsion class generated by simple k: S_k becomes S_k[-1]
    and every S_j sits in a triangle S_j -> E_j -> S_k^e."""
    return _tilt(h, k, False, False)


def class_level_tilt(h: Heart, k: int, forward: bool = True) -> Heart:
    """Like forward_tilt/backward_tilt, but tilting at an opaque simple is
    allowed; objects that cannot be computed become opaque while the quiver
    and the c-matrix are still followed."""
    return _tilt(h, k, forward, True)


def composite_tilt(h: Heart, indices: Iterable[int], direction: str = "forward") -> Heart:
    """Tilt at the torsion(-free) class generated by pairwise orthogonal
    simples, as a sequence of simple tilts."""
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    idx = sorted(set(indices))
    for k in idx:
        _check_index(h, k)
    adj = h.arrows() if h.qp is not None else h.ext1_matrix()
    for a in idx:
        for b in idx:
            if a != b and (adj[a][b] or adj[b][a]):
                raise NotIndependentSet(f"simples {a} and {b} are not Ext^1-orthogonal")
    step = forward_tilt if direction == "forward" else backward_tilt
    for k in idx:
        h = step(h, k)
    return h


# ---------------------------------------------------------------- graph


@dataclass(frozen=True)
class TiltEdge:
    """Forward simple tilt src -> tgt at simple ``index`` of src.

    ``found_by`` records whether the edge was discovered by tilting src
    forward or tgt backward.
    """

    src: str
    tgt: str
    index: int
    label: CYObject
    found_by: str
    representable: bool


@dataclass
class VertexRecord:
    heart: Heart
    depth: int
    expanded: bool = False
    # set when an induced subgraph dropped one of its neighbours
    cut: bool = False


@dataclass
class ExchangeGraph:
    qp: QP
    root: str
    depth: int
    direction: str
    records: Dict[str, VertexRecord]
    order: List[str]
    edges: List[TiltEdge]

    def heart(self, key: str) -> Heart:
        return self.records[key].heart

    def hearts(self) -> List[Heart]:
        return [self.records[k].heart for k in self.order]

    def out_edges(self, key: str) -> List[TiltEdge]:
        return [e for e in self.edges if e.src == key]

    def in_edges(self, key: str) -> List[TiltEdge]:
        return [e for e in self.edges if e.tgt == key]

    def edge_set(self) -> set:
        return {(e.src, e.tgt) for e in self.edges}

    def fully_expanded(self, key: str) -> bool:
        rec = self.records[key]
        return rec.expanded and not rec.cut and self.direction == "both"

    def to_json(self) -> dict:
        from .io import qp_to_dict

        verts = []
        for k in self.order:
            rec = self.records[k]
            h = rec.heart
            verts.append(
                {
                    "key": k,
                    "depth": rec.depth,
                    "expanded": rec.expanded,
                    "representable": h.representable,
                    "simples": [_simple_json(s) for s in h.simples],
                    "c_matrix": [list(c) for c in h.c_matrix],
                    "quiver": qp_to_dict(h.qp) if h.qp is not None else None,
                }
            )
        return {
            "root": self.root,
            "depth": self.depth,
            "direction": self.direction,
            "vertices": verts,
            "edges": [
                {"src": e.src, "tgt": e.tgt, "label": e.label.display(), "index": e.index, "kind": e.found_by}
                for e in self.edges
            ],
        }

    def to_dot(self) -> str:
        lines = ["digraph exchange {", "  node [shape=box];"]
        for k in self.order:
            style = "" if self.records[k].heart.representable else ", style=dashed"
            lines.append(f'  "{k}" [label="{k}"{style}];')
        for e in self.edges:
            lines.append(f'  "{e.src}" -> "{e.tgt}" [label="{e.label.display()}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _simple_json(s: CYObject) -> dict:
    if s.representable:
        return {"dim": list(s.root), "shift": s.shift}
    return {"opaque": s.provenance}


def explore(qp: QP, depth: int, direction: str = "both") -> ExchangeGraph:
    """Breadth-first exploration of simple tilts from the standard heart.

    Representable hearts are deduplicated by their set of simples; opaque
    hearts get provenance keys and are never expanded. Edges always point
    along the forward tilt.
    """
    if direction not in ("forward", "backward", "both"):
        raise ValueError(f"unknown direction {direction!r}")
    root = standard_heart(qp)
    records: Dict[str, VertexRecord] = {root.key: VertexRecord(root, 0)}
    order = [root.key]
    edges: Dict[Tuple[str, str], TiltEdge] = {}
    layer = [root.key]
    for d in range(depth):
        nxt = []
        for key in layer:
            rec = records[key]
            h = rec.heart
            if not h.representable:
                continue
            rec.expanded = True
            for k in range(h.n):
                steps = []
                if direction in ("forward", "both"):
                    steps.append(True)
                if direction in ("backward", "both"):
                    steps.append(False)
                for fwd in steps:
                    t = forward_tilt(h, k) if fwd else backward_tilt(h, k)
                    if t.key not in records:
                        records[t.key] = VertexRecord(t, d + 1)
                        order.append(t.key)
                        nxt.append(t.key)
                    if fwd:
                        e = TiltEdge(h.key, t.key, k, h.simples[k], "forward", t.representable)
                    else:
                        # the stored heart may list its simples in another order
                        label = t.simples[k]
                        stored = records[t.key].heart
                        e = TiltEdge(t.key, h.key, stored.simples.index(label), label, "backward", t.representable)
                    edges.setdefault((e.src, e.tgt), e)
        layer = nxt
    return ExchangeGraph(qp, root.key, depth, direction, records, order, list(edges.values()))


def induced_subgraph(g: ExchangeGraph, keys: Iterable[str]) -> ExchangeGraph:
    """The hearts in keys and the edges between them."""
    ks = set(keys)
    missing = ks - set(g.records)
    if missing:
        raise KeyError(f"hearts not in graph: {sorted(missing)}")
    order = [k for k in g.order if k in ks]
    edges = [e for e in g.edges if e.src in ks and e.tgt in ks]
    # a heart that lost a neighbour no longer counts as fully expanded
    cut = {e.src for e in g.edges if e.tgt not in ks} | {e.tgt for e in g.edges if e.src not in ks}
    records = {}
    for k in order:
        rec = g.records[k]
        records[k] = VertexRecord(rec.heart, rec.depth, rec.expanded, rec.cut or k in cut)
    return ExchangeGraph(g.qp, g.root, g.depth, g.direction, records, order, edges)


def regularity_report(g: ExchangeGraph) -> Dict[str, Tuple[int, int]]:
    """(out-degree, in-degree) of every fully expanded heart."""
    outd = defaultdict(int)
    ind = defaultdict(int)
    for e in g.edges:
        outd[e.src] += 1
        ind[e.tgt] += 1
    return {k: (outd[k], ind[k]) for k in g.order if g.fully_expanded(k)}


# ---------------------------------------------------------------- compatibility


def _v_indices(h: Heart, sub: VertexSubset) -> List[int]:
    return [i for i, s in enumerate(h.simples) if s.representable and h.cat.in_subcategory(s, sub)]


def is_compatible(h: Heart, sub: VertexSubset) -> bool:
    """Whether h restricts to a heart of the subcategory generated by the
    simples S_i, i in I: exactly |I| simples lie there and their classes
    form a basis of Z^I."""
    if not h.representable:
        raise OpaqueHeart(h.key)
    inside = _v_indices(h, sub)
    if len(inside) != len(sub.members):
        return False
    idx = sub.indices()
    mat = [[h.simples[j].root[i] for i in idx] for j in inside]
    if not mat:
        return True
    return abs(_det(mat)) == 1


def _det(mat: List[List[int]]) -> int:
    m = to_fraction_matrix(mat)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(det)


def compatible_subgraph(g: ExchangeGraph, sub: VertexSubset) -> List[str]:
    return [k for k in g.order if g.heart(k).representable and is_compatible(g.heart(k), sub)]


def quotient_label(obj: CYObject, sub: VertexSubset) -> Tuple[Tuple[int, ...], int]:
    """Image of a simple in the quotient: dimension vector projected to the
    complement of I, together with the shift."""
    if not obj.representable:
        raise OpaqueSource(obj.provenance)
    return tuple(obj.root[i] for i in sub.complement_indices()), obj.shift


def display_label(label: Tuple[Tuple[int, ...], int]) -> str:
    return CYObject.rep(label[0], label[1]).display()


@dataclass
class QuotientClass:
    id: str
    members: Tuple[str, ...]
    labels: Tuple[Tuple[Tuple[int, ...], int], ...]
    labels_consistent: bool
    fully_expanded: bool


@dataclass(frozen=True)
class QuotientEdge:
    src: str
    tgt: str
    label: Tuple[Tuple[int, ...], int]
    lifts: Tuple[Tuple[str, str], ...]


@dataclass
class QuotientGraph:
    sub: VertexSubset
    classes: List[QuotientClass]
    edges: List[QuotientEdge]
    member_class: Dict[str, str]
    graph: ExchangeGraph

    def cls(self, cid: str) -> QuotientClass:
        return next(c for c in self.classes if c.id == cid)

    def to_json(self) -> dict:
        return {
            "subset": list(self.sub.members),
            "vertices": [
                {
                    "key": c.id,
                    "members": list(c.members),
                    "simples": [{"dim": list(d), "shift": s} for d, s in c.labels],
                    "fully_expanded": c.fully_expanded,
                    "quiver": _quotient_quiver_json(self, c),
                }
                for c in self.classes
            ],
            "edges": [
                {"src": e.src, "tgt": e.tgt, "label": display_label(e.label), "kind": "forward",
                 "lifts": [list(x) for x in e.lifts]}
                for e in self.edges
            ],
        }

    def to_dot(self) -> str:
        lines = ["digraph quotient {", "  node [shape=box];"]
        for c in self.classes:
            text = " ".join(display_label(l) for l in c.labels)
            lines.append(f'  "{c.id}" [label="{c.id}: {text}"];')
        for e in self.edges:
            lines.append(f'  "{e.src}" -> "{e.tgt}" [label="{display_label(e.label)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _quotient_quiver_json(qg: QuotientGraph, c: QuotientClass):
    from .io import qp_to_dict
    from .pathalg import eje_quiver

    h = qg.graph.heart(c.members[0])
    if h.qp is None:
        return None
    inside = _v_indices(h, qg.sub)
    try:
        sub = VertexSubset.of(h.qp, [h.qp.vertices[i] for i in inside])
        return qp_to_dict(eje_quiver(h.qp, sub).as_qp())
    except QPTError:
        return None


def quotient_graph(g: ExchangeGraph, sub: VertexSubset, merge_congruent: bool = True) -> QuotientGraph:
    """Contract the edges labelled by objects of the subcategory and keep the
    others, labelled by their image in the quotient.

    Classes are the components of the contracted edges. The subcategory's
    own exchange graph is infinite, so a class found by exploration can be
    cut in two where the path joining its halves runs through opaque hearts.
    Tilting the quotient heart at a given quotient simple is a function, so
    two classes reaching the same class by the same label (or reached from
    one class by the same label) are the same; with ``merge_congruent`` such
    classes are merged until none are left.
    """
    compat = compatible_subgraph(g, sub)
    cset = set(compat)
    rank_of = {k: i for i, k in enumerate(compat)}
    parent = {k: k for k in compat}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b) -> bool:
        a, b = find(a), find(b)
        if a == b:
            return False
        lo, hi = sorted((a, b), key=rank_of.__getitem__)
        parent[hi] = lo
        return True

    kept = []
    for e in g.edges:
        if e.src in cset and e.tgt in cset:
            if e.label.representable and g.heart(e.src).cat.in_subcategory(e.label, sub):
                union(e.src, e.tgt)
            else:
                kept.append(e)
    changed = merge_congruent
    while changed:
        changed = False
        seen: Dict[tuple, str] = {}
        for e in kept:
            lab = quotient_label(e.label, sub)
            for key, other in (((find(e.tgt), "in", lab), e.src), ((find(e.src), "out", lab), e.tgt)):
                if key in seen:
                    changed |= union(seen[key], other)
                else:
                    seen[key] = other
    groups: Dict[str, List[str]] = defaultdict(list)
    for k in compat:
        groups[find(k)].append(k)
    reps = sorted(groups, key=rank_of.__getitem__)
    member_class = {}
    classes = []
    for n, r in enumerate(reps, 1):
        cid = f"c{n}"
        members = tuple(groups[r])
        label_sets = []
        for m in members:
            h = g.heart(m)
            inside = set(_v_indices(h, sub))
            label_sets.append(
                tuple(sorted(quotient_label(s, sub) for i, s in enumerate(h.simples) if i not in inside))
            )
        full = _lifts_visible(g, members, sub, label_sets[0])
        classes.append(QuotientClass(cid, members, label_sets[0], len(set(label_sets)) == 1, full))
        for m in members:
            member_class[m] = cid
    qedges: Dict[tuple, List[Tuple[str, str]]] = {}
    for e in kept:
        key = (member_class[e.src], member_class[e.tgt], quotient_label(e.label, sub))
        qedges.setdefault(key, []).append((e.src, e.tgt))
    order = {c.id: i for i, c in enumerate(classes)}
    edges = [
        QuotientEdge(s, t, lab, tuple(lifts))
        for (s, t, lab), lifts in sorted(qedges.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]], kv[0][2]))
    ]
    return QuotientGraph(sub, classes, edges, member_class, g)


def _lifts_visible(g: ExchangeGraph, members, sub, labels) -> bool:
    """A class counts as fully expanded when, for every quotient simple, some
    expanded member satisfies the lifting condition for it in both
    directions and the lifted tilts land on representable hearts. Then each
    of its quotient edges is witnessed inside the explored region."""
    fwd, bwd = set(), set()
    for m in members:
        if not g.fully_expanded(m):
            continue
        h = g.heart(m)
        vi = _v_indices(h, sub)
        adj = h.arrows()
        for k in range(h.n):
            if k in vi:
                continue
            lab = quotient_label(h.simples[k], sub)
            if all(adj[i][k] == 0 for i in vi) and forward_tilt(h, k).representable:
                fwd.add(lab)
            if all(adj[k][i] == 0 for i in vi) and backward_tilt(h, k).representable:
                bwd.add(lab)
    want = set(labels)
    return fwd == want and bwd == want


def quotient_regularity(qg: QuotientGraph) -> Dict[str, Tuple[int, int]]:
    outd = defaultdict(int)
    ind = defaultdict(int)
    for e in qg.edges:
        outd[e.src] += 1
        ind[e.tgt] += 1
    return {c.id: (outd[c.id], ind[c.id]) for c in qg.classes if c.fully_expanded}


# ---------------------------------------------------------------- lifting


@dataclass(frozen=True)
class LiftResult:
    indices: Tuple[int, ...]
    labels: Tuple[str, ...]
    heart: Heart
    # direction of each tilt, True for forward
    directions: Tuple[bool, ...] = ()


def no_arrows_into(h: Heart, k: int, sources: Iterable[int]) -> bool:
    adj = h.arrows()
    return all(adj[i][k] == 0 for i in sources)


def no_arrows_from(h: Heart, k: int, targets: Iterable[int]) -> bool:
    adj = h.arrows()
    return all(adj[k][i] == 0 for i in targets)


def lift_tilt_search(
    h: Heart, k: int, sub: VertexSubset, bound: int = 8, forward: bool = True, mixed: bool = False
) -> LiftResult:
    """Shortest sequence of forward tilts at simples of the subcategory after
    which no arrow runs from any of those simples to simple k.

    With forward=False the tilts are backward and the goal is that no arrow
    runs from simple k into the subcategory. With mixed=True tilts in both
    directions are allowed and a lift from a representable heart
    after which tilting at k stays representable is preferred, looking at
    most two tilts past the shortest lift, which is returned otherwise."""
    _check_index(h, k)
    v_idx = _v_indices(h, sub)
    if k in v_idx:
        raise NotIndependentSet(f"simple {k} lies in the subcategory")
    done = no_arrows_into if forward else no_arrows_from
    final = forward_tilt if forward else backward_tilt
    moves = [(True, forward_tilt), (False, backward_tilt)] if mixed else [(forward, final)]
    seen = {h.key}
    queue = deque([(h, (), (), ())])
    fallback = None
    while queue:
        cur, seq, dirs, labels = queue.popleft()
        if done(cur, k, v_idx):
            found = LiftResult(seq, labels, cur, dirs)
            if not mixed or (cur.representable and final(cur, k).representable):
                return found
            if fallback is None:
                fallback = found
        if len(seq) >= bound or (fallback is not None and len(seq) >= len(fallback.indices) + 2):
            continue
        for i in v_idx:
            if not cur.simples[i].representable:
                continue
            for fwd, step in moves:
                nxt = step(cur, i)
                if nxt.key in seen:
                    continue
                seen.add(nxt.key)
                queue.append((nxt, seq + (i,), dirs + (fwd,), labels + (cur.simples[i].display(),)))
    if fallback is not None:
        return fallback
    raise SearchBoundExceeded(f"no lift within {bound} tilts")
