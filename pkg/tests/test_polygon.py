import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpt.errors import ChordNotPresent, InvalidTriangulation, PolygonMismatch
from qpt.exchange import forward_tilt, lift_tilt_search, standard_heart
from qpt.polygon import (
    PolygonPair,
    catalan,
    check_pair_triangulation,
    crossing,
    crossing_edges,
    diagonal_d,
    exconvrep_sequence,
    flip,
    flip_chords,
    flip_graph,
    load_pair,
    pair_from_dict,
    pair_to_dict,
    polygon_quiver,
    triangulation_qp,
    triangulations,
    vertex_of,
)
from qpt.qp import QP, VertexSubset, canonical_form, ext1_matrix, mutate, validate_qp

from conftest import FIXTURES

KL_FINAL = {(1, 9), (2, 4), (2, 5), (2, 6), (2, 8), (6, 8), (9, 11), (9, 12)}


def test_diagonals():
    assert diagonal_d(PolygonPair(4, 3), "k") == (2, 4)
    assert diagonal_d(PolygonPair(4, 3), "l") is None
    assert diagonal_d(PolygonPair(3, 5), "l") == (1, 4)
    assert diagonal_d(PolygonPair(5, 5), "k") == (2, 5)
    assert diagonal_d(PolygonPair(3, 3), "k") is None
    with pytest.raises(PolygonMismatch):
        diagonal_d(PolygonPair(4, 4), "m")


def test_pair_shape():
    pp = PolygonPair(8, 6)
    assert pp.n == 12 and pp.shared == (1, 8)
    assert len(pp.triangulations()) == catalan(6) * catalan(4)
    with pytest.raises(PolygonMismatch):
        PolygonPair(2, 5)


def test_crossing():
    assert crossing((1, 3), (2, 4))
    assert not crossing((1, 3), (3, 5))
    assert not crossing((1, 4), (2, 3))
    assert crossing((2, 6), (1, 4)) and crossing((1, 4), (2, 6))


def test_flip_examples():
    assert flip_chords(4, {(1, 3)}, (1, 3)) == {(2, 4)}
    assert flip_chords(5, {(1, 3), (1, 4)}, (1, 3)) == {(2, 4), (1, 4)}
    pp = PolygonPair(4, 3)
    assert flip(pp, {(1, 3)}, (1, 3)) == {(2, 4)}
    with pytest.raises(ChordNotPresent):
        flip(pp, {(1, 3)}, (1, 4))
    with pytest.raises(ChordNotPresent):
        flip(pp, {(1, 3)}, (2, 4))


def test_flip_is_an_involution():
    for n in (5, 6, 7):
        for t in triangulations(n):
            for e in t:
                u = flip_chords(n, t, e)
                new = next(iter(u - t))
                assert flip_chords(n, u, new) == t


def test_invalid_triangulations():
    pp = PolygonPair(4, 4)
    with pytest.raises(InvalidTriangulation):
        check_pair_triangulation(pp, [(1, 3), (2, 4)])
    with pytest.raises(InvalidTriangulation):
        check_pair_triangulation(pp, [(1, 3)])
    with pytest.raises(InvalidTriangulation):
        check_pair_triangulation(pp, [(1, 3), (1, 4), (4, 6)])


def test_catalan_counts():
    for n in range(3, 10):
        assert len(triangulations(n)) == catalan(n - 2)
    for n in range(4, 9):
        assert len(flip_graph(n)) == catalan(n - 2)
        assert all(len(v) == n - 3 for v in flip_graph(n).values())


def test_crossing_edges_in_order():
    pp, t = load_pair(FIXTURES / "klgons.json")
    assert crossing_edges(t, (2, 8)) == [(1, 4), (1, 5), (1, 6)]
    assert crossing_edges(t, (1, 9)) == [(8, 11), (8, 12)]


def test_exconvrep_square_and_triangle():
    pp, t = load_pair(FIXTURES / "square_triangle.json")
    flips, final = exconvrep_sequence(pp, t)
    assert flips == [(1, 3)] and final == {(2, 4)}


def test_exconvrep_octagon_and_hexagon():
    pp, t = load_pair(FIXTURES / "klgons.json")
    flips, final = exconvrep_sequence(pp, t)
    assert flips == [(1, 4), (1, 5), (1, 6), (8, 11), (8, 12)]
    assert final == KL_FINAL


def test_exconvrep_all_small_pairs():
    for k in range(3, 10):
        for l in range(3, 13 - k):
            pp = PolygonPair(k, l)
            for t in pp.triangulations():
                flips, final = exconvrep_sequence(pp, t)
                for side in ("k", "l"):
                    d = diagonal_d(pp, side)
                    assert d is None or d in final
                assert len(flips) == len(set(flips))
                # one flip per crosser of d_k, then per crosser of d_l after that
                first = set(t)
                dk, dl = diagonal_d(pp, "k"), diagonal_d(pp, "l")
                n_k = len(crossing_edges(t, dk)) if dk else 0
                for e in flips[:n_k]:
                    first = flip(pp, first, e)
                n_l = len(crossing_edges(first, dl)) if dl else 0
                assert len(flips) == n_k + n_l
                q = polygon_quiver(pp, final)
                assert all(a.tgt != "S" for a in q.arrows)


def test_polygon_quiver_square_and_triangle():
    pp, t = load_pair(FIXTURES / "square_triangle.json")
    q = polygon_quiver(pp, t)
    assert set(q.vertices) == {"S", "1-3"}
    assert [(a.src, a.tgt) for a in q.arrows] == [("1-3", "S")]
    q = polygon_quiver(pp, {(2, 4)})
    assert [(a.src, a.tgt) for a in q.arrows] == [("S", "2-4")]
    assert vertex_of(pp, (1, 4)) == "S" and vertex_of(pp, (4, 2)) == "2-4"


def test_fan_gives_linear_quiver():
    q = triangulation_qp(5, {(1, 3), (1, 4)})
    assert ext1_matrix(q) == [[0, 1], [0, 0]] and not q.potential
    q = triangulation_qp(6, {(1, 3), (1, 4), (1, 5)})
    assert len(q.arrows) == 2 and not q.potential


def test_inner_triangle_gives_three_cycle():
    q = triangulation_qp(6, {(1, 3), (3, 5), (1, 5)})
    assert len(q.arrows) == 3 and len(q.potential.terms) == 1
    assert validate_qp(q) == []


def test_identified_edges_cancel_two_cycles():
    # gluing the two boundary edges at the ends of a chord makes a 2-cycle
    # through that chord which cancels
    q = triangulation_qp(4, {(1, 3)}, [((1, 2), (3, 4))])
    assert validate_qp(q) == []
    with pytest.raises(PolygonMismatch):
        triangulation_qp(4, {(1, 3)}, [((1, 3), (3, 4))])


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_flip_commutes_with_mutation(n):
    for t in triangulations(n):
        qp = triangulation_qp(n, t)
        for e in t:
            u = flip_chords(n, t, e)
            want = canonical_form(triangulation_qp(n, u))[0]
            assert canonical_form(mutate(qp, f"{e[0]}-{e[1]}"))[0] == want


def heart_side_cases():
    for k in range(3, 8):
        for l in range(3, 10 - k):
            pp = PolygonPair(k, l)
            for t in pp.triangulations():
                if not polygon_quiver(pp, t).potential:
                    yield pp, t


def test_flips_replay_as_forward_tilts():
    cases = list(heart_side_cases())
    assert len(cases) == 49
    for pp, t in cases:
        qp = polygon_quiver(pp, t)
        h = standard_heart(qp)
        slot = {c: qp.vertices.index(vertex_of(pp, c)) for c in t}
        s_idx = qp.vertices.index("S")
        s_before = h.simples[s_idx]
        flips, final = exconvrep_sequence(pp, t)
        cur = set(t)
        for e in flips:
            h = forward_tilt(h, slot[e])
            new = flip(pp, cur, e)
            (added,) = new - cur
            slot[added] = slot.pop(e)
            cur = set(new)
        want = polygon_quiver(pp, final)
        assert canonical_form(QP(h.qp.quiver))[0] == canonical_form(want)[0]
        assert all(row[s_idx] == 0 for row in h.arrows())
        assert h.simples[s_idx] == s_before
        others = VertexSubset.of(qp, [v for v in qp.vertices if v != "S"])
        assert len(lift_tilt_search(standard_heart(qp), s_idx, others).indices) <= len(flips)


def test_json_round_trip(tmp_path):
    pp, t = load_pair(FIXTURES / "klgons.json")
    doc = pair_to_dict(pp, t)
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(doc))
    assert load_pair(path) == (pp, t)
    bad = dict(doc, shared=[2, 8])
    with pytest.raises(PolygonMismatch):
        pair_from_dict(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(3, 7), st.data())
def test_exconvrep_property(k, l, data):
    pp = PolygonPair(k, l)
    t = data.draw(st.sampled_from(pp.triangulations()))
    flips, final = exconvrep_sequence(pp, t)
    # every flipped chord crossed d_k or d_l, and nothing else changed
    ds = [d for d in (diagonal_d(pp, "k"), diagonal_d(pp, "l")) if d]
    assert all(any(crossing(e, d) for d in ds) for e in flips)
    assert set(t) - set(flips) <= final
