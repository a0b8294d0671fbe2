"""Objects of the 3-Calabi-Yau category of an acyclic Dynkin quiver.

The engine only knows objects of the form M[s] with M an indecomposable
kQ-module. Morphisms between them are computed in the bounded derived
category of kQ and then corrected by the 3-Calabi-Yau duality:

    Ext^1(A, B) = Hom_D(A, B[1])  (+)  Hom_D(B, A[2])^dual

Anything the engine cannot pin down is returned as an Opaque object that
carries a provenance string instead of a dimension vector.

Representations act on column vectors: the matrix of an arrow a: i -> j has
shape dim_j x dim_i.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import NotAnExtension, NotFiniteType, OpaqueSource, UnknownVertex
from .linalg import Matrix, nullspace, rank, rref, zeros
from .qp import Quiver, VertexSubset

Root = Tuple[int, ...]


# ---------------------------------------------------------------- objects


@dataclass(frozen=True)
class CYObject:
    """Either M[shift] for the indecomposable M of dimension vector ``root``,
    or an opaque object known only through ``provenance``."""

    root: Optional[Root] = None
    shift: int = 0
    provenance: Optional[str] = None

    @staticmethod
    def rep(root: Sequence[int], shift: int = 0) -> "CYObject":
        return CYObject(tuple(int(x) for x in root), int(shift), None)

    @staticmethod
    def opaque(provenance: str) -> "CYObject":
        return CYObject(None, 0, provenance)

    @property
    def representable(self) -> bool:
        return self.root is not None

    def shifted(self, n: int) -> "CYObject":
        if not self.representable:
            raise OpaqueSource(f"cannot shift opaque object {self.provenance}")
        return CYObject(self.root, self.shift + n, None)

    def class_vector(self) -> Tuple[int, ...]:
        """Class in the Grothendieck group, (-1)^shift times the root."""
        if not self.representable:
            raise OpaqueSource(self.provenance)
        sign = -1 if self.shift % 2 else 1
        return tuple(sign * x for x in self.root)

    def display(self) -> str:
        """Dimension vector followed by _i, where M_1 = M and M_2 = M[1]."""
        if not self.representable:
            return f"?{self.provenance}"
        if all(0 <= x < 10 for x in self.root):
            body = "".join(map(str, self.root))
        else:
            body = ",".join(map(str, self.root))
        return f"{body}_{self.shift + 1}"

    def sort_key(self):
        if self.representable:
            return (0, self.root, self.shift)
        return (1, (), 0, self.provenance)


# ---------------------------------------------------------------- Dynkin check


def _dynkin_component_ok(nodes: List[int], nbrs: Dict[int, set]) -> bool:
    edges = sum(len(nbrs[v]) for v in nodes) // 2
    if edges != len(nodes) - 1:
        return False
    branch = [v for v in nodes if len(nbrs[v]) >= 3]
    if not branch:
        return True
    if len(branch) > 1 or len(nbrs[branch[0]]) > 3:
        return False
    b = branch[0]
    arms = []
    for start in nbrs[b]:
        length, prev, cur = 1, b, start
        while True:
            nxt = [w for w in nbrs[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    p, q, r = sorted(arms)
    return Fraction(1, p + 1) + Fraction(1, q + 1) + Fraction(1, r + 1) > 1


def check_dynkin(q: Quiver) -> None:
    """Raise NotFiniteType unless q is an acyclic quiver of type ADE."""
    n = len(q.vertices)
    pos = {v: i for i, v in enumerate(q.vertices)}
    nbrs: Dict[int, set] = {i: set() for i in range(n)}
    seen_pairs = set()
    for a in q.arrows:
        i, j = pos[a.src], pos[a.tgt]
        pair = frozenset((i, j))
        if i == j or pair in seen_pairs:
            raise NotFiniteType("loop or multiple edge")
        seen_pairs.add(pair)
        nbrs[i].add(j)
        nbrs[j].add(i)
    left = set(range(n))
    while left:
        root = left.pop()
        comp, stack = [root], [root]
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if w in left:
                    left.discard(w)
                    comp.append(w)
                    stack.append(w)
        if not _dynkin_component_ok(comp, nbrs):
            raise NotFiniteType("underlying graph is not a Dynkin diagram")


# ---------------------------------------------------------------- representations


@dataclass
class Rep:
    dims: Tuple[int, ...]
    maps: Dict[str, Matrix]


@dataclass
class Morphism:
    """Family of linear maps, one per vertex, shape dim_target x dim_source."""

    comps: List[Matrix]


def _mat(rows: int, cols: int) -> Matrix:
    return zeros(rows, cols)


def _mul(a: Matrix, b: Matrix, inner: int, rows: int, cols: int) -> Matrix:
    out = _mat(rows, cols)
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


class CY3Category:
    """Computations with shifted indecomposables over a Dynkin quiver."""

    def __init__(self, quiver: Quiver):
        check_dynkin(quiver)
        self.quiver = quiver
        self.n = len(quiver.vertices)
        self._pos = {v: i for i, v in enumerate(quiver.vertices)}
        self._arrows = [(a.id, self._pos[a.src], self._pos[a.tgt]) for a in quiver.arrows]
        self._roots = self._positive_roots()
        self._root_set = set(self._roots)
        self._reps: Dict[Root, Rep] = {}
        self._hom_cache: Dict[Tuple[Root, Root], int] = {}
        self._cone_cache: Dict[tuple, Optional[CYObject]] = {}

    # -- roots and modules

    def tits_form(self, d: Sequence[int]) -> int:
        return sum(x * x for x in d) - sum(d[s] * d[t] for _, s, t in self._arrows)

    def euler(self, d: Sequence[int], e: Sequence[int]) -> int:
        """<d, e> = sum d_i e_i - sum over arrows i->j of d_i e_j."""
        return sum(x * y for x, y in zip(d, e)) - sum(d[s] * e[t] for _, s, t in self._arrows)

    def _positive_roots(self) -> List[Root]:
        simple = [tuple(1 if i == j else 0 for j in range(self.n)) for i in range(self.n)]
        found = list(simple)
        seen = set(found)
        layer = list(simple)
        while layer:
            nxt = []
            for d in layer:
                for i in range(self.n):
                    e = tuple(x + (1 if j == i else 0) for j, x in enumerate(d))
                    if e not in seen and self.tits_form(e) == 1:
                        seen.add(e)
                        nxt.append(e)
            found.extend(sorted(nxt))
            layer = nxt
        return found

    def indecomposables(self) -> List[Root]:
        """Dimension vectors of the indecomposable modules (positive roots)."""
        return list(self._roots)

    def is_root(self, d: Sequence[int]) -> bool:
        return tuple(d) in self._root_set

    def simple_root(self, v: str) -> Root:
        if v not in self._pos:
            raise UnknownVertex(v)
        i = self._pos[v]
        return tuple(1 if j == i else 0 for j in range(self.n))

    def module(self, root: Sequence[int]) -> Rep:
        root = tuple(root)
        if root in self._reps:
            return self._reps[root]
        if not self.is_root(root):
            raise NotAnExtension(f"{root} is not a positive root")
        if sum(root) == 1:
            rep = Rep(root, {aid: _mat(root[t], root[s]) for aid, s, t in self._arrows})
        else:
            rep = self._build(root)
        self._reps[root] = rep
        return rep

    def _build(self, root: Root) -> Rep:
        for i in range(self.n):
            if root[i] == 0:
                continue
            smaller = tuple(x - (1 if j == i else 0) for j, x in enumerate(root))
            if not self.is_root(smaller):
                continue
            m = self.module(smaller)
            s = self.module(self.simple_root(self.quiver.vertices[i]))
            for sub, quot in ((m, s), (s, m)):
                basis = self.ext1_basis(quot, sub)
                for eta in _cocycle_candidates(basis):
                    e = self._extension(sub, quot, [eta])
                    if self.endo_dim(e) == 1:
                        return e
        raise NotAnExtension(f"could not build an indecomposable of dimension {root}")

    # -- linear algebra on representations

    def hom_basis(self, m: Rep, n: Rep) -> List[Morphism]:
        """Basis of Hom(m, n)."""
        offs = []
        total = 0
        for i in range(self.n):
            offs.append(total)
            total += n.dims[i] * m.dims[i]
        if total == 0:
            return []
        eqs: List[List[Fraction]] = []
        # unknown f_i[r][c] sits at offs[i] + r * m.dims[i] + c
        for aid, s, t in self._arrows:
            na, ma = n.maps[aid], m.maps[aid]
            for r in range(n.dims[t]):
                for c in range(m.dims[s]):
                    row = [Fraction(0)] * total
                    # (N_a f_s)[r][c] = sum_k N_a[r][k] f_s[k][c]
                    for k in range(n.dims[s]):
                        if na[r][k]:
                            row[offs[s] + k * m.dims[s] + c] += na[r][k]
                    # (f_t M_a)[r][c] = sum_k f_t[r][k] M_a[k][c]
                    for k in range(m.dims[t]):
                        if ma[k][c]:
                            row[offs[t] + r * m.dims[t] + k] -= ma[k][c]
                    if any(row):
                        eqs.append(row)
        out = []
        for vec in nullspace(eqs, total):
            comps = []
            for i in range(self.n):
                o = offs[i]
                comps.append(
                    [[vec[o + r * m.dims[i] + c] for c in range(m.dims[i])] for r in range(n.dims[i])]
                )
            out.append(Morphism(comps))
        return out

    def endo_dim(self, m: Rep) -> int:
        return len(self.hom_basis(m, m))

    def ext1_basis(self, n: Rep, m: Rep) -> List[Dict[str, Matrix]]:
        """Cocycles representing a basis of Ext^1(n, m), i.e. of the
        extensions 0 -> m -> E -> n -> 0."""
        cols = []  # coordinates of the cocycle space: (arrow, r, c) with eta_a: n_s -> m_t
        for aid, s, t in self._arrows:
            for r in range(m.dims[t]):
                for c in range(n.dims[s]):
                    cols.append((aid, r, c))
        if not cols:
            return []
        index = {k: i for i, k in enumerate(cols)}
        image = []
        # coboundary of f = (f_i: n_i -> m_i) is  m_a f_s - f_t n_a
        for i in range(self.n):
            for r in range(m.dims[i]):
                for c in range(n.dims[i]):
                    vec = [Fraction(0)] * len(cols)
                    for aid, s, t in self._arrows:
                        if s == i:
                            ma = m.maps[aid]
                            for rr in range(m.dims[t]):
                                if ma[rr][r]:
                                    vec[index[(aid, rr, c)]] += ma[rr][r]
                        if t == i:
                            na = n.maps[aid]
                            for cc in range(n.dims[s]):
                                if na[c][cc]:
                                    vec[index[(aid, r, cc)]] -= na[c][cc]
                    image.append(vec)
        span, _ = rref(image, len(cols)) if image else ([], [])
        basis = []
        current = [list(r) for r in span]
        base_rank = len(current)
        for k in range(len(cols)):
            unit = [Fraction(0)] * len(cols)
            unit[k] = Fraction(1)
            if rank(current + [unit]) > base_rank:
                current.append(unit)
                base_rank += 1
                basis.append(unit)
        out = []
        for vec in basis:
            eta = {aid: _mat(m.dims[t], n.dims[s]) for aid, s, t in self._arrows}
            for k, x in enumerate(vec):
                if x:
                    aid, r, c = cols[k]
                    eta[aid][r][c] = x
            out.append(eta)
        return out

    def _extension(self, sub: Rep, quot: Rep, etas: List[Dict[str, Matrix]]) -> Rep:
        """Middle term of 0 -> sub^e -> E -> quot -> 0 for the classes etas."""
        e = len(etas)
        dims = tuple(sub.dims[i] * e + quot.dims[i] for i in range(self.n))
        maps = {}
        for aid, s, t in self._arrows:
            mat = _mat(dims[t], dims[s])
            ms, mt = sub.dims[s], sub.dims[t]
            for blk in range(e):
                for r in range(mt):
                    for c in range(ms):
                        mat[blk * mt + r][blk * ms + c] = sub.maps[aid][r][c]
                    for c in range(quot.dims[s]):
                        mat[blk * mt + r][e * ms + c] = etas[blk][aid][r][c]
            for r in range(quot.dims[t]):
                for c in range(quot.dims[s]):
                    mat[e * mt + r][e * ms + c] = quot.maps[aid][r][c]
            maps[aid] = mat
        return Rep(dims, maps)

    def _extension_by(self, sub: Rep, quot: Rep, etas: List[Dict[str, Matrix]]) -> Rep:
        """Middle term of 0 -> sub -> E -> quot^e -> 0 (etas in Ext^1(quot, sub))."""
        e = len(etas)
        dims = tuple(sub.dims[i] + quot.dims[i] * e for i in range(self.n))
        maps = {}
        for aid, s, t in self._arrows:
            mat = _mat(dims[t], dims[s])
            ms, mt = sub.dims[s], sub.dims[t]
            qs, qt = quot.dims[s], quot.dims[t]
            for r in range(mt):
                for c in range(ms):
                    mat[r][c] = sub.maps[aid][r][c]
                for blk in range(e):
                    for c in range(qs):
                        mat[r][ms + blk * qs + c] = etas[blk][aid][r][c]
            for blk in range(e):
                for r in range(qt):
                    for c in range(qs):
                        mat[mt + blk * qt + r][ms + blk * qs + c] = quot.maps[aid][r][c]
            maps[aid] = mat
        return Rep(dims, maps)

    def _kernel(self, src: Rep, comps: List[Matrix], tgt_dims: Sequence[int]) -> Rep:
        bases = []
        for i in range(self.n):
            if src.dims[i] == 0:
                bases.append([])
                continue
            bases.append(nullspace(comps[i], src.dims[i]) if tgt_dims[i] else _unit_basis(src.dims[i]))
        return self._induced_sub(src, bases)

    def _induced_sub(self, src: Rep, bases: List[List[List[Fraction]]]) -> Rep:
        """Subrepresentation spanned at each vertex by the given vectors."""
        dims = tuple(len(b) for b in bases)
        maps = {}
        for aid, s, t in self._arrows:
            a = src.maps[aid]
            mat = _mat(dims[t], dims[s])
            for c, v in enumerate(bases[s]):
                img = [sum(a[r][k] * v[k] for k in range(src.dims[s])) for r in range(src.dims[t])]
                coords = _solve_in_basis(bases[t], img)
                for r, x in enumerate(coords):
                    mat[r][c] = x
            maps[aid] = mat
        return Rep(dims, maps)

    def _cokernel(self, tgt: Rep, comps: List[Matrix], src_dims: Sequence[int]) -> Rep:
        """Quotient of tgt by the image of the map with components comps."""
        quots = []  # per vertex: (image basis, complement basis)
        for i in range(self.n):
            d = tgt.dims[i]
            img = [[comps[i][r][c] for r in range(d)] for c in range(src_dims[i])] if d else []
            span, _ = rref(img, d) if img else ([], [])
            cur = [list(r) for r in span]
            comp = []
            for k in range(d):
                unit = [Fraction(0)] * d
                unit[k] = Fraction(1)
                if rank(cur + [unit]) > len(cur):
                    cur.append(unit)
                    comp.append(unit)
            quots.append((list(span), comp))
        dims = tuple(len(c) for _, c in quots)
        maps = {}
        for aid, s, t in self._arrows:
            a = tgt.maps[aid]
            mat = _mat(dims[t], dims[s])
            img_t, comp_t = quots[t]
            full = comp_t + img_t
            for c, v in enumerate(quots[s][1]):
                w = [sum(a[r][k] * v[k] for k in range(tgt.dims[s])) for r in range(tgt.dims[t])]
                coords = _solve_in_basis(full, w)
                for r in range(dims[t]):
                    mat[r][c] = coords[r]
            maps[aid] = mat
        return Rep(dims, maps)

    def _root_of(self, rep: Rep) -> Optional[Root]:
        if self.is_root(rep.dims) and self.endo_dim(rep) == 1:
            return tuple(rep.dims)
        return None

    # -- graded morphisms in the CY3 category

    def hom_dim(self, d: Root, e: Root) -> int:
        key = (d, e)
        if key not in self._hom_cache:
            self._hom_cache[key] = len(self.hom_basis(self.module(d), self.module(e)))
        return self._hom_cache[key]

    def ext1_dim(self, d: Root, e: Root) -> int:
        return self.hom_dim(d, e) - self.euler(d, e)

    def hom_db(self, a: CYObject, b: CYObject) -> Dict[int, int]:
        """Nonzero dims of Hom_D(a, b[p]) by degree p, in the derived category."""
        for x in (a, b):
            if not x.representable:
                raise OpaqueSource(x.provenance)
        p = a.shift - b.shift
        out = {}
        h = self.hom_dim(a.root, b.root)
        if h:
            out[p] = h
        e = self.ext1_dim(a.root, b.root)
        if e:
            out[p + 1] = e
        return out

    def ext1_cy3(self, a: CYObject, b: CYObject) -> Tuple[int, int, int]:
        """(total, derived part, dual part) of Ext^1(a, b)."""
        db = self.hom_db(a, b).get(1, 0)
        dual = self.hom_db(b, a).get(2, 0)
        return db + dual, db, dual

    def in_subcategory(self, obj: CYObject, sub: VertexSubset) -> bool:
        """Whether obj lies in the subcategory generated by the simples in I."""
        if not obj.representable:
            raise OpaqueSource(obj.provenance)
        allowed = set(sub.indices())
        return all(x == 0 or i in allowed for i, x in enumerate(obj.root))

    # -- cones

    def cone_forward(self, s: CYObject, sj: CYObject, provenance: str = "") -> CYObject:
        """New simple F_j when tilting forward at s: the cone of the universal
        map s (x) Ext^1(sj, s) -> ... fitting into s^e -> F_j -> sj."""
        total, db, dual = self.ext1_cy3(sj, s)
        if total == 0:
            return sj
        if dual:
            return CYObject.opaque(provenance or f"fwd({s.display()},{sj.display()})")
        key = ("f", s.root, sj.root, sj.shift - s.shift)
        if key not in self._cone_cache:
            self._cone_cache[key] = self._cone_forward(s.root, sj.root, sj.shift - s.shift)
        res = self._cone_cache[key]
        if res is None:
            return CYObject.opaque(provenance or f"fwd({s.display()},{sj.display()})")
        root, rel = res
        return CYObject(root, s.shift + rel)

    def _cone_forward(self, m_root: Root, n_root: Root, gap: int):
        m, n = self.module(m_root), self.module(n_root)
        if gap == 0:
            etas = self.ext1_basis(n, m)
            r = self._root_of(self._extension(m, n, etas))
            return None if r is None else (r, 0)
        if gap == 1:
            basis = self.hom_basis(n, m)
            e = len(basis)
            comps = [_stack([phi.comps[i] for phi in basis], m.dims[i], n.dims[i]) for i in range(self.n)]
            tgt = _power(m, e, self._arrows)
            return self._map_cone(n, tgt, comps, injective_shift=0, surjective_shift=1)
        return None

    def cone_backward(self, s: CYObject, sj: CYObject, provenance: str = "") -> CYObject:
        """New simple E_j when tilting backward at s: sj -> E_j -> s^e with
        e = dim Ext^1(s, sj)."""
        total, db, dual = self.ext1_cy3(s, sj)
        if total == 0:
            return sj
        if dual:
            return CYObject.opaque(provenance or f"bwd({s.display()},{sj.display()})")
        key = ("b", s.root, sj.root, sj.shift - s.shift)
        if key not in self._cone_cache:
            self._cone_cache[key] = self._cone_backward(s.root, sj.root, sj.shift - s.shift)
        res = self._cone_cache[key]
        if res is None:
            return CYObject.opaque(provenance or f"bwd({s.display()},{sj.display()})")
        root, rel = res
        return CYObject(root, s.shift + rel)

    def _cone_backward(self, m_root: Root, n_root: Root, gap: int):
        m, n = self.module(m_root), self.module(n_root)
        if gap == 0:
            etas = self.ext1_basis(m, n)
            r = self._root_of(self._extension_by(n, m, etas))
            return None if r is None else (r, 0)
        if gap == -1:
            basis = self.hom_basis(m, n)
            e = len(basis)
            comps = [_concat([phi.comps[i] for phi in basis], n.dims[i], m.dims[i]) for i in range(self.n)]
            src = _power(m, e, self._arrows)
            return self._map_cone(src, n, comps, injective_shift=-1, surjective_shift=0)
        return None

    def _map_cone(self, src: Rep, tgt: Rep, comps: List[Matrix], injective_shift: int, surjective_shift: int):
        """Kernel or cokernel of a module map that is injective or surjective."""
        inj = all(rank(comps[i]) == src.dims[i] for i in range(self.n) if src.dims[i])
        surj = all(rank(comps[i]) == tgt.dims[i] for i in range(self.n) if tgt.dims[i])
        if inj and not surj:
            r = self._root_of(self._cokernel(tgt, comps, src.dims))
            return None if r is None else (r, injective_shift)
        if surj and not inj:
            r = self._root_of(self._kernel(src, comps, tgt.dims))
            return None if r is None else (r, surjective_shift)
        return None


def _cocycle_candidates(basis: List[Dict[str, Matrix]]):
    """Basis cocycles, their sum, then a few seeded random combinations."""
    if not basis:
        return
    yield from basis
    keys = list(basis[0])

    def combo(coeffs):
        return {
            k: [[sum(c * b[k][r][col] for c, b in zip(coeffs, basis)) for col in range(len(basis[0][k][r]))]
                for r in range(len(basis[0][k]))]
            for k in keys
        }

    if len(basis) > 1:
        yield combo([1] * len(basis))
        rng = random.Random(len(basis))
        for _ in range(20):
            yield combo([rng.randint(-3, 3) for _ in basis])


def _unit_basis(d: int) -> List[List[Fraction]]:
    return [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]


def _solve_in_basis(basis: List[List[Fraction]], vec: List[Fraction]) -> List[Fraction]:
    """Coordinates of vec in the given (independent) basis."""
    if not basis:
        if any(vec):
            raise ValueError("vector not in span")
        return []
    d = len(vec)
    k = len(basis)
    aug = [[basis[c][r] for c in range(k)] + [vec[r]] for r in range(d)]
    rows, piv = rref(aug, k + 1)
    if k in piv:
        raise ValueError("vector not in span")
    out = [Fraction(0)] * k
    for row, p in zip(rows, piv):
        out[p] = row[k]
    return out


def _stack(mats: List[Matrix], rows_each: int, cols: int) -> Matrix:
    out: Matrix = []
    for m in mats:
        out.extend(list(r) for r in m)
    return out


def _concat(mats: List[Matrix], rows: int, cols_each: int) -> Matrix:
    out = [[] for _ in range(rows)]
    for m in mats:
        for r in range(rows):
            out[r].extend(m[r])
    return out


def _power(m: Rep, e: int, arrows) -> Rep:
    dims = tuple(d * e for d in m.dims)
    maps = {}
    for aid, s, t in arrows:
        mat = _mat(dims[t], dims[s])
        for blk in range(e):
            for r in range(m.dims[t]):
                for c in range(m.dims[s]):
                    mat[blk * m.dims[t] + r][blk * m.dims[s] + c] = m.maps[aid][r][c]
        maps[aid] = mat
    return Rep(dims, maps)


@lru_cache(maxsize=None)
def _category_cached(quiver: Quiver) -> CY3Category:
    return CY3Category(quiver)


def category(quiver: Quiver) -> CY3Category:
    """Shared engine instance per quiver."""
    return _category_cached(quiver)
