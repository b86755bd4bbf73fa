"""Cluster trees, covering graphs, and point location."""

import random
from fractions import Fraction

import pytest

from volint.covering import build_double_cover, build_p1_covering, cluster_roots, locate_x
from volint.curve import HyperellipticCurve
from volint.errors import OnBoundary
from volint.padic import FieldSpec
from volint.polyring import Poly
from volint.vologodsky import Integrator


@pytest.fixture(scope="module")
def Q5():
    return FieldSpec(5, prec=30)


@pytest.fixture(scope="module")
def Q43():
    return FieldSpec(43, prec=14)


def banana_f(field):
    return Poly.from_rationals(field, [-1, -1, 1]) * Poly.from_rationals(field, [-5, 5, -6, 1, 1])


def test_cluster_tree_banana(Q5):
    tree = cluster_roots(banana_f(Q5))
    kids = tree.children
    assert len(kids) == 3
    assert all(c.size() == 2 for c in kids)
    assert all(c.isolated_at == 0 and c.splits_at == Fraction(1, 2) for c in kids)
    assert [c.center.residue() for c in kids] == [0, 2, 3]
    assert not tree.contains_infinity  # degree 6


def test_cluster_tree_elliptic(Q43):
    f = Poly.from_rationals(Q43, [555015942, -1351755, 0, 1])
    tree = cluster_roots(f)
    sizes = sorted(c.size() for c in tree.children)
    assert sizes == [1, 2]
    assert tree.contains_infinity  # odd degree
    pair = [c for c in tree.children if c.size() == 2][0]
    assert pair.splits_at == Fraction(1, 2)
    single = [c for c in tree.children if c.size() == 1][0]
    assert (single.center - 507).is_zero()


def test_cluster_star_tree_good_reduction(Q5):
    f = Poly.from_rationals(Q5, [1])
    for r in (0, 1, 2, 3):
        f = f * Poly.from_rationals(Q5, [-r, 1])
    tree = cluster_roots(f)
    assert all(c.kind == "singleton" for c in tree.children)
    assert len(tree.children) == 4


def test_p1_covering_shapes(Q5, Q43):
    tree = cluster_roots(banana_f(Q5))
    C = build_p1_covering(tree)
    assert len(C.vertices) == 4 and len(C.edges) == 3
    marks = sorted(len(v.half_edges) for v in C.vertices)
    assert marks == [0, 2, 2, 2]
    for e in C.edges:
        assert e.interval == (Fraction(0), Fraction(1, 2))

    f71 = Poly.from_rationals(Q43, [555015942, -1351755, 0, 1])
    C71 = build_p1_covering(cluster_roots(f71))
    assert len(C71.vertices) == 2 and len(C71.edges) == 1
    root = C71.vertices[0]
    assert {m[0] for m in root.half_edges} == {"root", "infinity"}


def test_double_cover_betti(Q5, Q43):
    fb = banana_f(Q5)
    D = build_double_cover(build_p1_covering(cluster_roots(fb)), fb)
    assert len(D.vertices) == 5 and len(D.edges) == 6 and D.betti == 2
    labels = sorted(v.label for v in D.vertices)
    assert labels == ["+", "-", ".", ".", "."]

    f71 = Poly.from_rationals(Q43, [555015942, -1351755, 0, 1])
    D71 = build_double_cover(build_p1_covering(cluster_roots(f71)), f71)
    assert len(D71.vertices) == 2 and len(D71.edges) == 2 and D71.betti == 1

    ftree = Poly.from_rationals(Q5, [0, 1]) * Poly.from_rationals(Q5, [-5, 1]) * Poly.from_rationals(Q5, [-10, 1])
    Dt = build_double_cover(build_p1_covering(cluster_roots(ftree)), ftree)
    assert Dt.betti == 0  # odd cluster: single annulus, a tree


def test_double_cover_fibers(Q5):
    fb = banana_f(Q5)
    C = build_p1_covering(cluster_roots(fb))
    D = build_double_cover(C, fb)
    by_node = {}
    for v in D.vertices:
        by_node.setdefault(id(v.node), []).append(v)
    assert sorted(len(vs) for vs in by_node.values()) == [1, 1, 1, 2]
    # edges: fibers of size 2 over every split annulus
    by_cedge = {}
    for e in D.edges:
        by_cedge.setdefault(id(e.child_node), []).append(e)
    assert all(len(es) == 2 for es in by_cedge.values())


def test_every_root_has_one_half_edge(Q5):
    rng = random.Random(12)
    for _ in range(6):
        roots = rng.sample(range(0, 25), 4)
        f = Poly.from_rationals(Q5, [1])
        for r in roots:
            f = f * Poly.from_rationals(Q5, [-r, 1])
        try:
            HyperellipticCurve(Q5, f)
        except Exception:
            continue  # not squarefree after sampling; skip
        tree = cluster_roots(f)
        C = build_p1_covering(tree)
        total_marks = sum(len(v.half_edges) for v in C.vertices)
        # one mark per finite root (counting leaf members), one for infinity if odd
        want = f.degree() + (f.degree() % 2)
        leaf_members = sum(
            v.node.size() for v in C.vertices if v.node.kind == "leaf"
        )
        assert total_marks >= len(tree.children)
        assert C.betti == 0  # Gamma(C) is always a tree


def test_odd_annulus_never_touches_split_vertex(Q5):
    # triple cluster: the annulus does not split, both endpoints are non-split
    f = Poly.from_rationals(Q5, [0, 1]) * Poly.from_rationals(Q5, [-5, 1]) * Poly.from_rationals(Q5, [-10, 1])
    D = build_double_cover(build_p1_covering(cluster_roots(f)), f)
    for e in D.edges:
        assert e.split is False
        assert D.vertices[e.tail].label == "." and D.vertices[e.head].label == "."


def test_locate_and_boundaries(Q5):
    K = FieldSpec(5, [-5, 0, 0, 0, 1], prec=80, uniformizer_name="a")
    f = banana_f(K)
    curve = HyperellipticCurve(K, f)
    integ = Integrator(curve, target_prec=24)
    a = K.gen()
    R = curve.point_above(1, 2)
    S = curve.point_above(1, -2)
    vR = integ.skeleton.locate(R)
    vS = integ.skeleton.locate(S)
    assert {vR.label, vS.label} == {"+", "-"}
    assert vR.index != vS.index
    # the paper's sides: R on v+, S on v-
    assert vR.label == "+" and vS.label == "-"
    # a reference-point x-coordinate retracts to an edge
    with pytest.raises(OnBoundary):
        integ.skeleton.locate(curve.point_above(a, None))
    # deep inside a cluster disc: the disc vertex
    where, node = locate_x(integ.tree, K.from_rational(Fraction(1, 5)))
    assert where == "vertex" and node.kind == "root"


def test_involution_pairs_locate_consistently(Q5):
    K = FieldSpec(5, [-5, 0, 0, 0, 1], prec=80, uniformizer_name="a")
    f = banana_f(K)
    curve = HyperellipticCurve(K, f)
    integ = Integrator(curve, target_prec=24)
    # points over x in the disc around 2 lie on the same (non-split) vertex
    for x0 in (7, 12, 22):
        try:
            pt = curve.point_above(x0, None)
        except Exception:
            continue
        v1 = integ.skeleton.locate(pt)
        v2 = integ.skeleton.locate(pt.involution())
        assert v1.index == v2.index
        assert v1.label == "."


def test_reference_points_sit_mid_annulus(Q5):
    K = FieldSpec(5, [-5, 0, 0, 0, 1], prec=80, uniformizer_name="a")
    f = banana_f(K)
    curve = HyperellipticCurve(K, f)
    integ = Integrator(curve, target_prec=24)
    for e in integ.d_graph.edges:
        pt = integ.reference_point(e.index)
        v = (pt.x - e.center).valuation()
        s1, s2 = e.interval
        assert s1 < v < s2
        # and the point lies on the labelled component
        vs, edge = integ._vertices_of_point(pt)
        assert edge is not None and edge.index == e.index
