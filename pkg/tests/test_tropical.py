"""Cycle space and harmonic 1-forms, over exact rationals."""

import random
from fractions import Fraction

import pytest

from volint.errors import BrokenPath, SchemaError
from volint.tropical import (
    Graph,
    TropicalOneForm,
    cycle_basis,
    dual_tropical_basis,
    harmonic_decompose,
    is_cycle,
    tropical_integral,
)


def theta_graph():
    # 2 vertices, 3 parallel edges
    return Graph(2, [(0, 1), (0, 1), (0, 1)])


def banana_skeleton():
    # the 5-vertex, 6-edge double-cover graph: vertices 0=+,1=-,2,3,4
    return Graph(5, [(0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (1, 4)])


def _nullspace_rank_oracle(graph):
    """Rank of ker(boundary) by exact row reduction on the incidence matrix."""
    rows = []
    for i, (t, h) in enumerate(graph.edges):
        col = [Fraction(0)] * graph.n
        col[h] += 1
        col[t] -= 1
        rows.append(col)
    # rank of the boundary map = n - #components = n - 1 for connected graphs
    mat = [list(r) for r in rows]
    rank = 0
    cols = list(range(graph.n))
    for c in cols:
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        scale = mat[rank][c]
        mat[rank] = [x / scale for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][c] != 0:
                fac = mat[r][c]
                mat[r] = [x - fac * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
    return len(graph.edges) - rank


def test_tree_has_no_cycles():
    tree = Graph(4, [(0, 1), (1, 2), (1, 3)])
    assert cycle_basis(tree) == []
    assert tree.betti() == 0


def test_theta_graph_cycles_match_nullspace_oracle():
    g = theta_graph()
    cycles = cycle_basis(g)
    assert len(cycles) == 2 == _nullspace_rank_oracle(g) == g.betti()
    for c in cycles:
        assert is_cycle(g, c)


def test_banana_skeleton_dual_basis_matches_hand_values():
    g = banana_skeleton()
    # the hand-labelled cycles C1 = e1 e2 e3 e4, C2 = e3 e4 e5 e6 read, in
    # this edge table,
    C1 = [2, -1, 3, -4]
    C2 = [3, -4, 6, -5]
    etas = dual_tropical_basis(g, [C1, C2])
    assert etas[0].values == [
        Fraction(-1, 3),
        Fraction(1, 3),
        Fraction(1, 6),
        Fraction(-1, 6),
        Fraction(1, 6),
        Fraction(-1, 6),
    ]
    assert etas[1].values == [
        Fraction(1, 6),
        Fraction(-1, 6),
        Fraction(1, 6),
        Fraction(-1, 6),
        Fraction(-1, 3),
        Fraction(1, 3),
    ]
    assert tropical_integral(etas[0], C1) == 1
    assert tropical_integral(etas[0], C2) == 0
    # the path retraction e1 e2 pairs to 2/3 and -1/3
    path = [2, -1]
    assert tropical_integral(etas[0], path) == Fraction(2, 3)
    assert tropical_integral(etas[1], path) == Fraction(-1, 3)


def test_single_loop_normalization():
    g = Graph(1, [(0, 0)])
    cycles = cycle_basis(g)
    assert len(cycles) == 1
    etas = dual_tropical_basis(g, cycles)
    assert tropical_integral(etas[0], cycles[0]) == 1


def _random_connected_graph(rng, max_h=4):
    n = rng.randrange(2, 7)
    edges = [(i, rng.randrange(0, i)) for i in range(1, n)]  # spanning tree
    h = rng.randrange(0, max_h + 1)
    for _ in range(h):
        a, b = rng.randrange(n), rng.randrange(n)
        edges.append((a, b))
    return Graph(n, edges)


def test_dual_basis_randomized():
    rng = random.Random(77)
    for _ in range(100):
        g = _random_connected_graph(rng)
        cycles = cycle_basis(g)
        assert len(cycles) == g.betti() == _nullspace_rank_oracle(g)
        if not cycles:
            continue
        etas = dual_tropical_basis(g, cycles)
        for i, c in enumerate(cycles):
            for j, eta in enumerate(etas):
                assert eta.is_harmonic()
                assert tropical_integral(eta, c) == (1 if i == j else 0)


def test_tropical_integral_checks_concatenation():
    g = banana_skeleton()
    etas = dual_tropical_basis(g, cycle_basis(g))
    with pytest.raises(BrokenPath):
        tropical_integral(etas[0], [1, 1])  # head(e1) != tail(e1)


def test_harmonic_decompose_properties():
    rng = random.Random(41)
    g = banana_skeleton()
    # already harmonic: projection is the identity
    etas = dual_tropical_basis(g, cycle_basis(g))
    eta, cob = harmonic_decompose(g, etas[0].values)
    assert eta.values == etas[0].values
    assert all(c == 0 for c in cob)
    # pure coboundary: harmonic part vanishes
    psi = [Fraction(rng.randrange(-5, 6)) for _ in range(g.n)]
    dpsi = [psi[h] - psi[t] for t, h in g.edges]
    eta, cob = harmonic_decompose(g, dpsi)
    assert all(v == 0 for v in eta.values)
    assert cob == dpsi
    # random input: parts recombine, harmonic part is harmonic, and the
    # coboundary pairs to zero against every cycle
    for _ in range(20):
        phi = [Fraction(rng.randrange(-9, 10)) for _ in g.edges]
        eta, cob = harmonic_decompose(g, phi)
        assert [a + b for a, b in zip(eta.values, cob)] == phi
        assert eta.is_harmonic()
        cob_form = TropicalOneForm(g, cob)
        for c in cycle_basis(g):
            assert tropical_integral(cob_form, c) == 0


def test_harmonic_decompose_idempotent():
    rng = random.Random(8)
    g = _random_connected_graph(rng, max_h=3)
    phi = [Fraction(rng.randrange(-9, 10)) for _ in g.edges]
    eta, cob = harmonic_decompose(g, phi)
    eta2, cob2 = harmonic_decompose(g, eta.values)
    assert eta2.values == eta.values
    assert all(c == 0 for c in cob2)


def test_dim_tropical_equals_betti_randomized():
    rng = random.Random(13)
    for _ in range(30):
        g = _random_connected_graph(rng)
        cycles = cycle_basis(g)
        if not cycles:
            continue
        etas = dual_tropical_basis(g, cycles)
        assert len(etas) == g.betti()


def test_dual_basis_rejects_wrong_cycle_count():
    g = banana_skeleton()
    with pytest.raises(SchemaError):
        dual_tropical_basis(g, cycle_basis(g)[:1])
