"""Two polygons glued along an edge, their triangulations and flips.

The polygons P_k and P_l glued along S are drawn as one convex polygon with
N = k + l - 2 vertices labelled 1..N counterclockwise, where S is the
diagonal (1, k). P_k has vertices 1..k and P_l has vertices k..N, 1.
Chords are sorted pairs (a, b) with a < b.

The diagonal d_k of P_k closes a triangle with S and the edge after S at
vertex 1, so d_k = (2, k); likewise d_l = (1, k + 1). A triangle has no
diagonal to offer, so d is None when the polygon has three vertices.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import ChordNotPresent, InvalidTriangulation, ParseError, PolygonMismatch
from .qp import QP, Arrow, Potential, Quiver

Chord = Tuple[int, int]
Triangulation = FrozenSet[Chord]


def chord(a: int, b: int) -> Chord:
    return (a, b) if a < b else (b, a)


def crossing(c: Chord, d: Chord) -> bool:
    """Two chords of a convex polygon cross when their endpoints interleave."""
    a, b = c
    x, y = d
    if len({a, b, x, y}) < 4:
        return False
    return (a < x < b) != (a < y < b)


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def is_boundary(c: Chord, n: int) -> bool:
    a, b = c
    return b - a == 1 or (a == 1 and b == n)


def triangulations(n: int, lo: int = 1, hi: Optional[int] = None) -> List[Triangulation]:
    """All triangulations of the convex polygon on vertices lo..hi (default
    1..n), as sets of chords, in a fixed order."""
    if hi is None:
        hi = n
    out = []

    def rec(a: int, b: int) -> List[FrozenSet[Chord]]:
        # triangulations of the sub-polygon a..b, including chord (a, b) if internal
        if b - a < 2:
            return [frozenset()]
        res = []
        for m in range(a + 1, b):
            for left in rec(a, m):
                for right in rec(m, b):
                    extra = set()
                    if m - a > 1:
                        extra.add((a, m))
                    if b - m > 1:
                        extra.add((m, b))
                    res.append(left | right | frozenset(extra))
        return res

    out = rec(lo, hi)
    return sorted(out, key=lambda t: sorted(t))


def triangles(n: int, edges: Iterable[Chord]) -> List[Tuple[int, int, int]]:
    """Faces of a triangulated convex n-gon given its chords."""
    es = {chord(*e) for e in edges}
    es |= {(i, i + 1) for i in range(1, n)} | {(1, n)}
    out = []
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if (a, b) not in es:
                continue
            for c in range(b + 1, n + 1):
                if (b, c) in es and (a, c) in es:
                    out.append((a, b, c))
    return out


def check_triangulation(n: int, chords: Iterable[Chord]) -> Triangulation:
    cs = frozenset(chord(*c) for c in chords)
    for a, b in cs:
        if not (1 <= a < b <= n) or is_boundary((a, b), n):
            raise InvalidTriangulation(f"({a}, {b}) is not a diagonal of the {n}-gon")
    for c in cs:
        for d in cs:
            if c < d and crossing(c, d):
                raise InvalidTriangulation(f"chords {c} and {d} cross")
    if len(cs) != n - 3:
        raise InvalidTriangulation(f"{len(cs)} chords cannot triangulate an {n}-gon")
    return cs


def flip_chords(n: int, t: Iterable[Chord], e: Chord) -> Triangulation:
    """Replace e by the other diagonal of the quadrilateral around it."""
    t = frozenset(t)
    e = chord(*e)
    if e not in t:
        raise ChordNotPresent(f"{e} is not in the triangulation")
    apex = [c for tri in triangles(n, t) if e[0] in tri and e[1] in tri for c in tri if c not in e]
    if len(apex) != 2:
        raise InvalidTriangulation(f"{e} does not border two triangles")
    return (t - {e}) | {chord(*apex)}


def flip_graph(n: int) -> Dict[Triangulation, List[Triangulation]]:
    """Flip graph of the n-gon grown by search from the fan at vertex 1."""
    start = frozenset((1, j) for j in range(3, n))
    seen = {start: []}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for e in sorted(t):
            u = flip_chords(n, t, e)
            seen[t].append(u)
            if u not in seen:
                seen[u] = []
                queue.append(u)
    return seen


# ---------------------------------------------------------------- quivers


def chord_name(c: Chord) -> str:
    return f"{c[0]}-{c[1]}"


def triangulation_qp(
    n: int,
    chords: Iterable[Chord],
    identifications: Sequence[Tuple[Chord, Chord]] = (),
    names: Optional[Dict[Chord, str]] = None,
) -> QP:
    """Quiver with potential of a triangulated n-gon.

    Vertices are the chords plus any identified boundary edges. Inside each
    triangle (a < b < c) with sides s1 = (a, b), s2 = (b, c), s3 = (a, c)
    there are arrows s1 -> s3, s3 -> s2 and s2 -> s1 between internal sides,
    and a triangle with three internal sides adds its 3-cycle to W.
    Opposite arrows that no potential term uses cancel in pairs.
    """
    cs = sorted({chord(*c) for c in chords})
    names = dict(names or {})
    rep: Dict[Chord, Chord] = {}
    for e, f in identifications:
        e, f = chord(*e), chord(*f)
        for x in (e, f):
            if not is_boundary(x, n):
                raise PolygonMismatch(f"{x} is not a boundary edge")
        rep[f] = rep.get(e, e)
        rep.setdefault(e, e)
    internal: Dict[Chord, str] = {}
    for c in cs:
        internal[c] = names.get(c, chord_name(c))
    for x, r in rep.items():
        internal[x] = names.get(r, chord_name(r))
    vertices = list(dict.fromkeys(internal[c] for c in cs + sorted(set(rep.values()))))
    raw: List[Tuple[str, str, Tuple[int, int, int]]] = []
    cycles = []
    for tri in triangles(n, cs):
        a, b, c = tri
        s1, s2, s3 = (a, b), (b, c), (a, c)
        here = []
        for x, y in ((s1, s3), (s3, s2), (s2, s1)):
            if x in internal and y in internal:
                here.append(len(raw))
                raw.append((internal[x], internal[y], tri))
        if len(here) == 3:
            cycles.append(here)
    in_cycle = {i for cyc in cycles for i in cyc}
    dead = set()
    for i, (s, t, _) in enumerate(raw):
        if i in dead or i in in_cycle:
            continue
        for j in range(i + 1, len(raw)):
            if j in dead or j in in_cycle:
                continue
            if raw[j][0] == t and raw[j][1] == s:
                dead |= {i, j}
                break
    ids = {}
    arrows = []
    for i, (s, t, tri) in enumerate(raw):
        if i in dead:
            continue
        ids[i] = f"a{len(arrows) + 1}"
        arrows.append(Arrow(ids[i], s, t))
    pot = Potential.of((1, [ids[i] for i in cyc]) for cyc in cycles)
    return QP(Quiver(tuple(vertices), tuple(arrows)), pot)


# ---------------------------------------------------------------- glued pairs


@dataclass(frozen=True)
class PolygonPair:
    k: int
    l: int
    identifications: Tuple[Tuple[Chord, Chord], ...] = ()

    def __post_init__(self):
        if self.k < 3 or self.l < 3:
            raise PolygonMismatch("both polygons need at least three vertices")
        for e, f in self.identifications:
            for x in (e, f):
                if not is_boundary(chord(*x), self.n):
                    raise PolygonMismatch(f"{x} is not a boundary edge of the glued polygon")

    @property
    def n(self) -> int:
        return self.k + self.l - 2

    @property
    def shared(self) -> Chord:
        return (1, self.k)

    def side(self, which: str) -> Tuple[int, int]:
        """Vertex range of one polygon on the glued boundary."""
        if which == "k":
            return (1, self.k)
        if which == "l":
            return (self.k, self.n + 1)
        raise PolygonMismatch(f"unknown side {which!r}")

    def triangulations(self) -> List[Triangulation]:
        left = triangulations(self.n, 1, self.k)
        # P_l is k..N,1; relabel it as k..N+1 and fold N+1 back to 1
        fold = lambda c: chord(c[0], 1 if c[1] == self.n + 1 else c[1])
        right = [frozenset(fold(c) for c in t) for t in triangulations(self.n, self.k, self.n + 1)]
        return [a | b for a in left for b in right]


def diagonal_d(pp: PolygonPair, side: str) -> Optional[Chord]:
    if side == "k":
        return None if pp.k == 3 else (2, pp.k)
    if side == "l":
        return None if pp.l == 3 else (1, pp.k + 1)
    raise PolygonMismatch(f"unknown side {side!r}")


def check_pair_triangulation(pp: PolygonPair, chords: Iterable[Chord]) -> Triangulation:
    t = frozenset(chord(*c) for c in chords)
    if pp.shared in t:
        raise InvalidTriangulation("the shared edge is not a chord of either polygon")
    full = check_triangulation(pp.n, t | {pp.shared})
    return full - {pp.shared}


def crossing_edges(t: Iterable[Chord], c: Chord) -> List[Chord]:
    """Chords of t crossing c, sorted lexicographically, which lists them
    counterclockwise starting from the shared edge."""
    c = chord(*c)
    return sorted(e for e in t if crossing(e, c))


def flip(pp: PolygonPair, t: Iterable[Chord], e: Chord) -> Triangulation:
    full = flip_chords(pp.n, frozenset(t) | {pp.shared}, e) if chord(*e) != pp.shared else None
    if full is None:
        raise ChordNotPresent("the shared edge is not flipped")
    return full - {pp.shared}


def exconvrep_sequence(pp: PolygonPair, t: Iterable[Chord]) -> Tuple[List[Chord], Triangulation]:
    """Flip the chords crossing d_k, then those crossing d_l, each in
    lexicographic order. Returns the flipped chords and the final
    triangulation, which contains d_k and d_l when they exist."""
    t = check_pair_triangulation(pp, t)
    flips: List[Chord] = []
    for side in ("k", "l"):
        d = diagonal_d(pp, side)
        if d is None:
            continue
        for e in crossing_edges(t, d):
            t = flip(pp, t, e)
            flips.append(e)
        if d not in t:
            raise InvalidTriangulation(f"flipping the crossers of {d} did not produce it")
    return flips, t


def polygon_quiver(pp: PolygonPair, t: Iterable[Chord]) -> QP:
    """QP of the triangulation t together with the shared edge, which is
    the vertex "S"."""
    t = check_pair_triangulation(pp, t)
    return triangulation_qp(pp.n, t | {pp.shared}, pp.identifications, {pp.shared: "S"})


def vertex_of(pp: PolygonPair, c: Chord) -> str:
    c = chord(*c)
    return "S" if c == pp.shared else chord_name(c)


# ---------------------------------------------------------------- files


def pair_from_dict(data) -> Tuple[PolygonPair, Triangulation]:
    """Read {"k", "l", "shared", "identifications", "chords"}; "shared" is
    optional and must be [1, k] if given."""
    try:
        k, l = int(data["k"]), int(data["l"])
        idents = tuple((chord(*e), chord(*f)) for e, f in data.get("identifications", []))
        chords = [chord(int(a), int(b)) for a, b in data.get("chords", [])]
        shared = data.get("shared")
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed polygon document: {e}") from e
    pp = PolygonPair(k, l, idents)
    if shared is not None and chord(*shared) != pp.shared:
        raise PolygonMismatch(f"shared edge must be [1, {k}] in this labelling")
    return pp, check_pair_triangulation(pp, chords)


def pair_to_dict(pp: PolygonPair, t: Iterable[Chord]) -> dict:
    return {
        "k": pp.k,
        "l": pp.l,
        "shared": list(pp.shared),
        "identifications": [[list(e), list(f)] for e, f in pp.identifications],
        "chords": [list(c) for c in sorted(t)],
    }


def load_pair(path) -> Tuple[PolygonPair, Triangulation]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"cannot read polygon file {path}: {e}") from e
    return pair_from_dict(data)
