from fractions import Fraction

import pytest

from qpt.errors import JacobianNotFinite, NonHomogeneousPotential
from qpt.pathalg import default_max_degree, eje_quiver, enumerate_paths, jacobian_dims, relations
from qpt.polygon import triangulation_qp, triangulations
from qpt.qp import QP, VertexSubset, canonical_form, mutate

from conftest import fixture


def test_relations_a3_empty(a3):
    rs = relations(a3)
    assert rs.relations == () and rs.homogeneous


def test_relations_mu2_a3(mu2_a3):
    rs = relations(mu2_a3)
    got = {r.arrow: r.terms for r in rs.relations}
    assert got == {
        "c": ((Fraction(1), ("b'", "a'")),),
        "b'": ((Fraction(1), ("a'", "c")),),
        "a'": ((Fraction(1), ("c", "b'")),),
    }
    assert rs.homogeneous


def test_relations_three_cycle():
    rs = relations(fixture("three_cycle_w"))
    assert len(rs.relations) == 3 and all(len(r.terms[0][1]) == 2 for r in rs.relations)


def test_jacobian_a3(a3):
    gd = jacobian_dims(a3)
    assert gd.verdict == "finite" and gd.total == 6
    assert gd.dims == (3, 2, 1, 0)


def test_jacobian_mu2_a3(mu2_a3):
    gd = jacobian_dims(mu2_a3)
    assert gd.verdict == "finite" and gd.total == 6
    assert gd.dims == (3, 3, 0)


def test_jacobian_three_cycle_without_potential():
    gd = jacobian_dims(fixture("three_cycle"), 64)
    assert gd.verdict == "unknown" and gd.total is None
    assert gd.dims == (3,) * 65


def test_jacobian_three_cycle_with_potential():
    gd = jacobian_dims(fixture("three_cycle_w"))
    assert gd.dims == (3, 3, 0) and gd.total == 6


def test_jacobian_cycle_outside_potential():
    assert jacobian_dims(fixture("free_cycle")).verdict == "infinite"


def test_jacobian_cycle_through_relation_is_finite():
    # the only cycle missing W passes through ab, which is a relation
    gd = jacobian_dims(fixture("three_cycle_tail"))
    assert gd.dims == (4, 5, 3, 2, 1, 0) and gd.total == 15


def test_jacobian_refuses_mixed_lengths():
    qp = QP.build(
        ["1", "2", "3", "4"],
        [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1"), ("d", "3", "4"), ("e", "4", "1")],
        [(1, ["a", "b", "c"]), (1, ["a", "b", "d", "e"])],
    )
    with pytest.raises(NonHomogeneousPotential):
        jacobian_dims(qp)


def test_max_degree_from_environment(monkeypatch, a3):
    monkeypatch.setenv("QPT_MAX_DEGREE", "5")
    assert default_max_degree() == 5
    assert len(jacobian_dims(fixture("three_cycle")).dims) == 6
    monkeypatch.delenv("QPT_MAX_DEGREE")
    assert default_max_degree() == 64


def test_acyclic_total_counts_paths():
    for name in ("a2", "a3", "a4", "d4", "a3_sink"):
        qp = fixture(name)
        paths = sum(len(enumerate_paths(qp.quiver, i, j, 10)) for i in qp.vertices for j in qp.vertices)
        assert jacobian_dims(qp).total == paths


def test_degree_zero_and_one():
    for name in ("a3", "mu2_a3", "three_cycle_w", "d4"):
        qp = fixture(name)
        gd = jacobian_dims(qp)
        assert gd.dims[0] == len(qp.vertices) and gd.dims[1] == len(qp.arrows)


def test_enumerate_paths(a3):
    assert enumerate_paths(a3.quiver, "1", "3", 2) == [("a", "b")]
    assert enumerate_paths(a3.quiver, "1", "1", 5) == [()]
    cyc = fixture("three_cycle").quiver
    assert enumerate_paths(cyc, "1", "1", 6) == [(), ("a", "b", "c"), ("a", "b", "c", "a", "b", "c")]


def test_eje_a3(a3):
    eq = eje_quiver(a3, VertexSubset.of(a3, ["2"]))
    assert eq.vertices == ("1", "3")
    assert [(a.src, a.tgt) for a in eq.arrows] == [("1", "3")]
    assert eq.witnesses == {"a.b": ("a", "b")}


def test_eje_mu2_a3(mu2_a3):
    eq = eje_quiver(mu2_a3, VertexSubset.of(mu2_a3, ["2"]))
    assert [(a.src, a.tgt) for a in eq.arrows] == [("1", "3")]
    assert list(eq.witnesses.values()) == [("c",)]


def test_eje_empty_subset_gives_quiver(a3, mu2_a3):
    for qp in (a3, mu2_a3, fixture("d4")):
        eq = eje_quiver(qp, VertexSubset.of(qp, []))
        assert canonical_form(eq.as_qp())[0] == canonical_form(QP(qp.quiver))[0]


def test_eje_refuses_infinite():
    qp = fixture("three_cycle")
    with pytest.raises(JacobianNotFinite):
        eje_quiver(qp, VertexSubset.of(qp, ["1"]), 8)


def test_eje_invariant_under_mutation_inside_i():
    # mutating at a vertex of I does not change eJe
    for name, keep in (("a3", ["2"]), ("a4", ["2"]), ("a4", ["3"]), ("d4", ["2"])):
        qp = fixture(name)
        sub = VertexSubset.of(qp, keep)
        base = canonical_form(eje_quiver(qp, sub).as_qp())[0]
        for k in keep:
            m = mutate(qp, k)
            assert canonical_form(eje_quiver(m, VertexSubset.of(m, keep)).as_qp())[0] == base


def test_graded_dims_vanish_after_first_zero():
    for n in (5, 6, 7):
        for t in triangulations(n):
            gd = jacobian_dims(triangulation_qp(n, t))
            assert gd.is_finite and gd.dims[-1] == 0
            assert all(d > 0 for d in gd.dims[:-1])
