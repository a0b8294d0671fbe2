from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpt.errors import ReductionUnsupported, UnknownVertex
from qpt.io import load_qp
from qpt.qp import (
    QP,
    Potential,
    VertexSubset,
    canonical_form,
    cyclic_derivative,
    ext1_matrix,
    ginzburg,
    is_isomorphic,
    min_rotation,
    mutate,
    premutate,
    reduce,
    restrict,
    tidy_ids,
    validate_qp,
)

from conftest import FIXTURES, fixture


def kinds(qp):
    return sorted(v.kind for v in validate_qp(qp))


def test_validate_accepts_a3(a3):
    assert validate_qp(a3) == []


def test_validate_reports_loop():
    qp = QP.build(["1", "2"], [("a", "1", "1"), ("b", "1", "2")])
    assert kinds(qp) == ["loop"]


def test_validate_reports_two_cycle():
    qp = load_qp(FIXTURES / "invalid_two_cycle.qp", validate=False)
    assert kinds(qp) == ["two_cycle"]


def test_validate_reports_bad_potential():
    qp = QP.build(["1", "2"], [("a", "1", "2")], [(1, ["a", "a"])])
    assert validate_qp(qp)


def test_min_rotation():
    assert min_rotation(("c", "a", "b")) == ("a", "b", "c")
    assert Potential.of([(1, ["b", "c", "a"]), (2, ["a", "b", "c"])]).terms == ((Fraction(3), ("a", "b", "c")),)


def test_potential_drops_zero_terms():
    assert not Potential.of([(1, ["a", "b"]), (-1, ["b", "a"])])


def test_premutate_a3(a3):
    raw = premutate(a3, "2")
    arrows = {(a.id, a.src, a.tgt) for a in raw.arrows}
    assert arrows == {("[ab]", "1", "3"), ("a*", "2", "1"), ("b*", "3", "2")}
    assert raw.potential.terms == ((Fraction(1), min_rotation(("[ab]", "b*", "a*"))),)


def test_premutate_isolated_vertex():
    a1 = fixture("a1")
    assert premutate(a1, "1") == a1


def test_premutate_reverses_single_arrow():
    a2 = fixture("a2")
    out = premutate(a2, "2")
    assert [(a.src, a.tgt) for a in out.arrows] == [("2", "1")]
    assert not out.potential


def test_premutate_unknown_vertex(a3):
    with pytest.raises(UnknownVertex):
        premutate(a3, "9")


def test_mutate_a3_matches_fixture(a3, mu2_a3):
    assert canonical_form(mutate(a3, "2"))[0] == canonical_form(mu2_a3)[0]


def test_mutation_twice_returns_a3(a3):
    twice = mutate(mutate(a3, "2"), "2")
    assert canonical_form(twice)[0] == canonical_form(a3)[0]
    assert not twice.potential


def test_reduce_without_two_cycles_is_identity(a3, mu2_a3):
    assert reduce(a3) == a3
    assert reduce(mu2_a3) == mu2_a3


def test_reduce_substitutes_into_higher_terms():
    # W = ab + acd: the pair a,b cancels and the cubic term dies with a
    qp = QP.build(
        ["1", "2", "3"],
        [("a", "1", "2"), ("b", "2", "1"), ("c", "2", "3"), ("d", "3", "1")],
        [(1, ["a", "b"]), (1, ["a", "c", "d"])],
    )
    out = reduce(qp)
    assert sorted(a.id for a in out.arrows) == ["c", "d"]
    assert not out.potential


def test_reduce_rewrites_cycle_through_removed_arrow():
    # W = ab + bcd: a = -cd, and the cubic term is absorbed
    qp = QP.build(
        ["1", "2", "3", "4"],
        [("a", "1", "2"), ("b", "2", "1"), ("c", "1", "3"), ("d", "3", "2"), ("e", "2", "4"), ("f", "4", "1")],
        [(1, ["a", "b"]), (1, ["b", "c", "d"]), (1, ["a", "e", "f"])],
    )
    out = reduce(qp)
    assert {a.id for a in out.arrows} == {"c", "d", "e", "f"}
    assert validate_qp(out) == []
    assert out.potential.terms == ((Fraction(-1), min_rotation(("c", "d", "e", "f"))),)


def test_reduce_refuses_bare_two_cycle():
    qp = QP.build(["1", "2"], [("a", "1", "2"), ("b", "2", "1")])
    with pytest.raises(ReductionUnsupported):
        reduce(qp)


def test_mutate_a1():
    a1 = fixture("a1")
    assert mutate(a1, "1") == a1


def test_restrict_examples(a3, mu2_a3):
    for qp in (a3, mu2_a3):
        r = restrict(qp, VertexSubset.of(qp, ["2"]))
        assert r.vertices == ("2",) and r.arrows == () and not r.potential
    iso = fixture("a3_isolated")
    assert restrict(iso, ["1", "2", "3"]) == a3


def test_ginzburg_a3(a3):
    gd = ginzburg(a3)
    degrees = sorted(a.degree for a in gd.arrows)
    assert degrees == [-2, -2, -2, -1, -1, 0, 0]
    assert all(gd.differential[a.id + "^"] == () for a in a3.arrows)


def test_ginzburg_mu2_a3(a3):
    m = mutate(a3, "2")
    gd = ginzburg(m)
    assert gd.differential["[ab]^"] == ((Fraction(1), ("b*", "a*")),)


def test_ginzburg_loop_differential():
    a2 = fixture("a2")
    gd = ginzburg(a2)
    assert gd.differential["l1"] == ((Fraction(1), ("a", "a^")),)
    assert gd.differential["l2"] == ((Fraction(-1), ("a^", "a")),)
    a1 = ginzburg(fixture("a1"))
    assert [a.id for a in a1.arrows] == ["l1"] and a1.differential["l1"] == ()


def test_cyclic_derivative_mu2_a3(mu2_a3):
    assert cyclic_derivative(mu2_a3.potential, "c") == [(Fraction(1), ("b'", "a'"))]
    assert cyclic_derivative(mu2_a3.potential, "b'") == [(Fraction(1), ("a'", "c"))]


def test_ext1_matrix(a3, mu2_a3):
    assert ext1_matrix(a3) == [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert ext1_matrix(mu2_a3) == [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    assert ext1_matrix(QP.build(["1", "2"], [])) == [[0, 0], [0, 0]]


def test_canonical_form_invariance(a3, mu2_a3):
    other = QP.build(["z", "y", "x"], [("q", "x", "y"), ("p", "y", "z")])
    assert canonical_form(other)[0] == canonical_form(a3)[0]
    assert canonical_form(a3)[0] != canonical_form(mu2_a3)[0]
    assert is_isomorphic(other, a3)


def test_canonical_form_sees_potential():
    bare = fixture("three_cycle")
    with_w = fixture("three_cycle_w")
    assert canonical_form(bare)[0] != canonical_form(with_w)[0]


def test_tidy_ids(a3):
    t = tidy_ids(mutate(a3, "2"))
    assert sorted(a.id for a in t.arrows) == ["a1", "a2", "a3"]


def test_vertex_subset_must_be_proper(a3):
    with pytest.raises(Exception):
        VertexSubset.of(a3, ["1", "2", "3"])
    assert VertexSubset.of(a3, []).complement == ("1", "2", "3")


# ---------------------------------------------------------------- properties


@st.composite
def acyclic_quivers(draw):
    n = draw(st.integers(1, 6))
    verts = [str(i + 1) for i in range(n)]
    arrows = []
    for i in range(n):
        for j in range(i + 1, n):
            m = draw(st.integers(0, 1))
            if m and draw(st.booleans()):
                arrows.append((f"a{len(arrows)}", verts[j], verts[i]))
            elif m:
                arrows.append((f"a{len(arrows)}", verts[i], verts[j]))
    return QP.build(verts, arrows)


@settings(max_examples=60, deadline=None)
@given(acyclic_quivers(), st.data())
def test_mutation_is_involutive_on_quivers(qp, data):
    k = data.draw(st.sampled_from(qp.vertices))
    try:
        back = mutate(mutate(qp, k), k)
    except ReductionUnsupported:
        return
    assert validate_qp(back) == []
    assert canonical_form(QP(back.quiver))[0] == canonical_form(QP(qp.quiver))[0]


@settings(max_examples=60, deadline=None)
@given(acyclic_quivers(), st.data())
def test_mutation_never_creates_loops_or_two_cycles(qp, data):
    k = data.draw(st.sampled_from(qp.vertices))
    try:
        out = mutate(qp, k)
    except ReductionUnsupported:
        return
    assert validate_qp(out) == []


@settings(max_examples=40, deadline=None)
@given(acyclic_quivers(), st.data())
def test_canonical_form_ignores_relabelling(qp, data):
    perm = data.draw(st.permutations(list(qp.vertices)))
    ren = dict(zip(qp.vertices, perm))
    other = QP.build(
        [ren[v] for v in reversed(qp.vertices)],
        [(f"x{a.id}", ren[a.src], ren[a.tgt]) for a in reversed(qp.arrows)],
    )
    assert canonical_form(other)[0] == canonical_form(qp)[0]


def test_mutation_rule_on_arrow_matrix(a3):
    # b_ij changes sign at k, and b_ij += sgn * max(b_ik b_kj, 0) elsewhere
    def b(qp):
        m = ext1_matrix(qp)
        n = len(m)
        return [[m[i][j] - m[j][i] for j in range(n)] for i in range(n)]

    for qp in (a3, fixture("a4"), fixture("d4"), fixture("a3_sink")):
        for k in qp.vertices:
            kk = qp.vertices.index(k)
            old, new = b(qp), b(mutate(qp, k))
            n = len(old)
            for i in range(n):
                for j in range(n):
                    if kk in (i, j):
                        want = -old[i][j]
                    else:
                        want = old[i][j] + (abs(old[i][kk]) * old[kk][j] + old[i][kk] * abs(old[kk][j])) // 2
                    assert new[i][j] == want
