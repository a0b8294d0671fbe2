"""Silting objects through their g-matrices, paired with hearts.

A silting object is recorded by the classes of its summands (the columns of
its g-matrix) together with its companion heart. Mutating the summand k
changes one column,

    g'_k = -g_k + sum_i a_ik g_i,

where a_ik counts arrows i -> k in the companion heart's quiver, and tilts
the heart forward at its simple k. The two matrices stay dual: G^T C = 1.

For a vertex subset I, a partial silting object keeps only the summands dual
to the simples outside the subcategory generated by the S_i, i in I.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    HeartNotLifted,
    IsomorphismFailure,
    OpaqueCompanion,
    PairingViolation,
    QPTError,
    ReductionUnsupported,
)
from .exchange import (
    ExchangeGraph,
    Heart,
    QuotientGraph,
    _v_indices,
    backward_tilt,
    class_level_tilt,
    forward_tilt,
    lift_tilt_search,
    quotient_label,
    standard_heart,
)
from .linalg import inverse, to_fraction_matrix
from .qp import QP, VertexSubset

Column = Tuple[int, ...]


def pairing(g_matrix: Sequence[Column], c_matrix: Sequence[Column]) -> List[List[int]]:
    """Matrix of the pairing <g_i, c_j>."""
    return [[sum(x * y for x, y in zip(g, c)) for c in c_matrix] for g in g_matrix]


def is_identity(m: List[List[int]]) -> bool:
    return all(m[i][j] == (1 if i == j else 0) for i in range(len(m)) for j in range(len(m)))


def g_from_c(c_matrix: Sequence[Column]) -> Tuple[Column, ...]:
    """The unique g-matrix dual to a c-matrix, G = C^{-T}, as columns."""
    n = len(c_matrix)
    # rows of this matrix are the c-columns, so it is C^T and its inverse is G
    inv = inverse(to_fraction_matrix(c_matrix))
    cols = []
    for j in range(n):
        col = [inv[i][j] for i in range(n)]
        if any(x.denominator != 1 for x in col):
            raise PairingViolation("c-matrix is not unimodular")
        cols.append(tuple(int(x) for x in col))
    return tuple(cols)


@dataclass(frozen=True)
class SiltingState:
    g_matrix: Tuple[Column, ...]
    heart: Heart
    # forward steps are recorded as k, backward steps as -k-1
    word: Tuple[int, ...] = ()

    @property
    def key(self) -> tuple:
        # T and T[2] share g-vectors, so the companion heart is part of the key
        return (tuple(sorted(self.g_matrix)), self.heart.key)

    def check(self) -> None:
        if not is_identity(pairing(self.g_matrix, self.heart.c_matrix)):
            raise PairingViolation(f"g/c pairing is not the identity after word {self.word}")


def initial_silting(qp: QP) -> SiltingState:
    h = standard_heart(qp)
    n = h.n
    g = tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n))
    return SiltingState(g, h, ())


def state_from_heart(h: Heart, word: Tuple[int, ...] = ()) -> SiltingState:
    """Silting state dual to a heart, computed from its c-matrix alone."""
    s = SiltingState(g_from_c(h.c_matrix), h, word)
    s.check()
    return s


def silting_mutate(s: SiltingState, k: int, forward: bool = True) -> SiltingState:
    """Mutate summand k and tilt the companion heart at simple k.

    Forward: g'_k = -g_k + sum_i a_ik g_i with a_ik the arrows i -> k.
    Backward uses the arrows k -> i instead and undoes a forward step."""
    h = s.heart
    try:
        adj = h.arrows()
    except ReductionUnsupported as e:
        raise OpaqueCompanion(str(e)) from e
    gk = s.g_matrix[k]
    new_k = [-x for x in gk]
    for i, gi in enumerate(s.g_matrix):
        m = adj[i][k] if forward else adj[k][i]
        if m:
            new_k = [x + m * y for x, y in zip(new_k, gi)]
    g = tuple(tuple(new_k) if j == k else col for j, col in enumerate(s.g_matrix))
    if h.simples[k].representable:
        nh = forward_tilt(h, k) if forward else backward_tilt(h, k)
    else:
        nh = class_level_tilt(h, k, forward)
    out = SiltingState(g, nh, s.word + ((k,) if forward else (-k - 1,)))
    out.check()
    return out


@dataclass
class SiltingGraph:
    root: tuple
    states: Dict[tuple, SiltingState]
    order: List[tuple]
    edges: List[Tuple[tuple, tuple, int, str]]


def seg_explore(qp: QP, depth: int) -> SiltingGraph:
    """Breadth-first silting mutation from the standard silting object,
    deduplicated by the set of g-vectors and the companion heart. Edge labels name the simple of the
    companion heart dual to the mutated summand."""
    root = initial_silting(qp)
    states = {root.key: root}
    order = [root.key]
    edges = []
    layer = [root]
    for _ in range(depth):
        nxt = []
        for s in layer:
            for k in range(len(s.g_matrix)):
                t = silting_mutate(s, k)
                if t.key not in states:
                    states[t.key] = t
                    order.append(t.key)
                    nxt.append(t)
                edges.append((s.key, t.key, k, s.heart.simples[k].display()))
        layer = nxt
    return SiltingGraph(root.key, states, order, edges)


@dataclass
class GraphIsomorphism:
    vertex_map: Dict[object, object]
    edge_map: List[Tuple[object, object]]


def seg_isomorphism(seg: SiltingGraph, eg: ExchangeGraph) -> GraphIsomorphism:
    """Match the forward exchange graph of hearts with the silting graph on
    their representable part, vertex by vertex and label by label."""
    vmap = {}
    for key in eg.order:
        h = eg.heart(key)
        gkey = (tuple(sorted(g_from_c(h.c_matrix))), key)
        if h.representable:
            if gkey not in seg.states:
                raise IsomorphismFailure(f"heart {key} has no silting partner")
            vmap[key] = gkey
    inverse_map = {}
    for k, v in vmap.items():
        if v in inverse_map:
            raise IsomorphismFailure(f"hearts {inverse_map[v]} and {k} share a silting partner")
        inverse_map[v] = k
    sedges = {(s, t): lab for s, t, _, lab in seg.edges}
    emap = []
    for e in eg.edges:
        if e.src in vmap and e.tgt in vmap:
            pair = (vmap[e.src], vmap[e.tgt])
            if sedges.get(pair) != e.label.display():
                raise IsomorphismFailure(f"edge {e.src} -> {e.tgt} has no silting partner")
            emap.append(((e.src, e.tgt), pair))
    heart_pairs = {(e.src, e.tgt) for e in eg.edges}
    for (s, t), lab in sedges.items():
        if s in inverse_map and t in inverse_map and (inverse_map[s], inverse_map[t]) not in heart_pairs:
            if eg.records[inverse_map[s]].expanded:
                raise IsomorphismFailure(f"silting edge {lab} has no heart partner")
    return GraphIsomorphism(vmap, emap)


# ---------------------------------------------------------------- partial silting


@dataclass(frozen=True)
class PartialSilting:
    columns: Tuple[Column, ...]
    indices: Tuple[int, ...]
    state: SiltingState = field(compare=False)
    sub: VertexSubset = field(compare=False)

    @property
    def key(self) -> Tuple[Column, ...]:
        return tuple(sorted(self.columns))


def _standard_v(h: Heart, sub: VertexSubset) -> bool:
    vi = _v_indices(h, sub)
    want = {h.cat.simple_root(v) for v in sub.members}
    got = {h.simples[i].root for i in vi if h.simples[i].shift == 0}
    return len(vi) == len(sub.members) and got == want


def partial_silting(s: SiltingState, sub: VertexSubset) -> PartialSilting:
    """Columns of the summands dual to the simples outside the subcategory.

    The companion heart must contain exactly the standard simples S_i,
    i in I, as its simples in the subcategory."""
    h = s.heart
    if not h.representable or not _standard_v(h, sub):
        raise HeartNotLifted(f"heart {h.key} does not contain the standard simples of I")
    vi = set(_v_indices(h, sub))
    idx = tuple(i for i in range(h.n) if i not in vi)
    return PartialSilting(tuple(s.g_matrix[i] for i in idx), idx, s, sub)


def partial_mutate(
    p: PartialSilting, j: int, lift_bound: int = 8, forward: bool = True
) -> Tuple[PartialSilting, str]:
    """Mutate the partial silting object at its summand in slot j.

    The companion heart is first moved by tilts inside the subcategory, in
    either direction, until no arrow runs from the subcategory's simples to
    simple j (backward: from simple j into the subcategory); those tilts
    leave the partial columns alone. Returns the new partial object and the quotient label of the
    simple that was tilted."""
    if j not in p.indices:
        raise HeartNotLifted(f"slot {j} is not a partial summand")
    lift = lift_tilt_search(p.state.heart, j, p.sub, lift_bound, forward, mixed=True)
    s = p.state
    for i, fwd in zip(lift.indices, lift.directions):
        s = silting_mutate(s, i, fwd)
    for i, col in zip(p.indices, p.columns):
        if s.g_matrix[i] != col:
            raise QPTError("lifting tilts changed a partial column")
    label = _label_text(quotient_label(s.heart.simples[j], p.sub))
    s = silting_mutate(s, j, forward)
    return PartialSilting(tuple(s.g_matrix[i] for i in p.indices), p.indices, s, p.sub), label


def _companion_labels(p: PartialSilting):
    h = p.state.heart
    if not h.representable:
        return None
    vi = set(_v_indices(h, p.sub))
    return tuple(sorted(quotient_label(x, p.sub) for i, x in enumerate(h.simples) if i not in vi))


def _edge_explored(g: ExchangeGraph, p: PartialSilting, j: int, q: PartialSilting, bound: int) -> bool:
    """Whether exploration would have recorded the tilt behind a partial
    mutation: the lifted heart was expanded and the result was kept."""
    lifted = lift_tilt_search(p.state.heart, j, p.sub, bound, mixed=True).heart
    rec = g.records.get(lifted.key)
    return rec is not None and rec.expanded and q.state.heart.key in g.records


def _label_text(lab) -> str:
    from .exchange import display_label

    return display_label(lab)


@dataclass
class BulletIsomorphism:
    vertex_map: Dict[str, Tuple[Column, ...]]
    edge_map: List[Tuple[Tuple[str, str, str], Tuple[Tuple[Column, ...], Tuple[Column, ...], str]]]
    skipped: List[str]


def seg_bullet(qg: QuotientGraph, qp: QP, sub: VertexSubset, lift_bound: int = 8) -> BulletIsomorphism:
    """Match a quotient exchange graph with partial silting mutation.

    Each class is sent to the partial silting object of a member that
    contains the standard simples of I (all such members must agree), and
    no two classes may share both the object and its quotient simples. Every
    quotient edge must then be reproduced by partial mutation with the same
    label, and partial mutations between matched classes must be quotient
    edges whenever the tilt behind them lies in the explored region.
    Classes with no such member are listed in ``skipped``.
    """
    g = qg.graph
    vmap: Dict[str, Tuple[Column, ...]] = {}
    start: Dict[str, List[PartialSilting]] = {}
    skipped = []
    for c in qg.classes:
        found = []
        for m in c.members:
            h = g.heart(m)
            if not h.representable or not _standard_v(h, sub):
                continue
            p = partial_silting(state_from_heart(h), sub)
            if found and p.key != found[0].key:
                raise IsomorphismFailure(f"members of class {c.id} disagree on the partial silting object")
            found.append(p)
        if not found:
            skipped.append(c.id)
            continue
        vmap[c.id] = found[0].key
        start[c.id] = found
    # g-vectors cannot see the shift [2], so objects are told apart by their
    # columns together with the quotient simples of the companion heart
    owners: Dict[tuple, str] = {}
    for cid, ps in start.items():
        ident = (ps[0].key, _companion_labels(ps[0]))
        if ident in owners:
            raise IsomorphismFailure(f"classes {owners[ident]} and {cid} share a partial silting object")
        owners[ident] = cid
    from .exchange import display_label

    qedges = {(e.src, e.tgt, display_label(e.label)) for e in qg.edges}
    emap = []
    produced = set()
    for cid, ps in start.items():
        # every member of the class mutates to the same columns; any member
        # whose tilt stays representable names the target class
        results: Dict[str, List[Tuple[PartialSilting, int, PartialSilting]]] = {}
        for p in ps:
            for j in p.indices:
                q, label = partial_mutate(p, j, lift_bound)
                results.setdefault(label, []).append((p, j, q))
        for label, outs in results.items():
            if len({q.key for _, _, q in outs}) > 1:
                raise IsomorphismFailure(f"members of class {cid} disagree on mutation at {label}")
            tgt = None
            for p, j, q in outs:
                t = q.state.heart.key
                if t in qg.member_class and qg.member_class[t] in vmap:
                    tgt = qg.member_class[t]
                elif t not in g.records:
                    tgt = owners.get((q.key, _companion_labels(q)))
                if tgt is None:
                    continue
                if q.key != vmap[tgt]:
                    raise IsomorphismFailure(f"partial mutation {cid} -{label}-> {tgt} lands on other columns")
                produced.add((cid, tgt, label))
                if (cid, tgt, label) not in qedges and _edge_explored(g, p, j, q, lift_bound):
                    raise IsomorphismFailure(f"partial mutation {cid} -{label}-> {tgt} is not a quotient edge")
                emap.append(((cid, tgt, label), (p.key, q.key, label)))
                break
    for e in qedges:
        if e[0] in vmap and e[1] in vmap and e not in produced:
            raise IsomorphismFailure(f"quotient edge {e} is not a partial mutation")
    return BulletIsomorphism(vmap, emap, skipped)
