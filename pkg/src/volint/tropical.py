"""Cycle space and harmonic (tropical) 1-forms on a finite connected graph.

Everything here runs over exact rationals: the dual-basis values are numbers
like 1/3 or 1/6 and exactness costs nothing at this scale.  Oriented edges
are encoded as +-(index + 1) into an edge list, so -e is literally -e.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import BrokenPath, DisconnectedGraph, SchemaError, SingularSystem


class Graph:
    """Finite connected graph with oriented edges e and their reverses -e."""

    def __init__(self, n_vertices, edges):
        self.n = n_vertices
        self.edges = list(edges)  # list of (tail, head) for the +orientation
        for t, h in self.edges:
            if not (0 <= t < n_vertices and 0 <= h < n_vertices):
                raise SchemaError("edge endpoint out of range")
        self.adj = {v: [] for v in range(n_vertices)}
        for i, (t, h) in enumerate(self.edges):
            self.adj[t].append((i + 1, h))
            self.adj[h].append((-(i + 1), t))

    @classmethod
    def from_covering(cls, covering_graph):
        return cls(
            len(covering_graph.vertices),
            [(e.tail, e.head) for e in covering_graph.edges],
        )

    def tail(self, signed):
        t, h = self.edges[abs(signed) - 1]
        return t if signed > 0 else h

    def head(self, signed):
        t, h = self.edges[abs(signed) - 1]
        return h if signed > 0 else t

    def betti(self):
        return len(self.edges) - self.n + 1


class TropicalOneForm:
    """Edge function with eta(-e) = -eta(e) and zero outflow at every vertex."""

    def __init__(self, graph, values):
        self.graph = graph
        if len(values) != len(graph.edges):
            raise SchemaError("one value per positive-orientation edge")
        self.values = [Fraction(v) for v in values]

    def __call__(self, signed_edge):
        v = self.values[abs(signed_edge) - 1]
        return v if signed_edge > 0 else -v

    def is_harmonic(self):
        for v in range(self.graph.n):
            total = Fraction(0)
            for signed, _ in self.graph.adj[v]:
                total += self(signed)
            if total != 0:
                return False
        return True

    def __repr__(self):
        return f"TropicalOneForm({self.values})"


def _edge_vector(graph, signed_edges):
    vec = [Fraction(0)] * len(graph.edges)
    for s in signed_edges:
        vec[abs(s) - 1] += 1 if s > 0 else -1
    return vec


def is_cycle(graph, signed_edges):
    boundary = [Fraction(0)] * graph.n
    for s in signed_edges:
        boundary[graph.head(s)] += 1
        boundary[graph.tail(s)] -= 1
    return all(b == 0 for b in boundary)


def cycle_basis(graph):
    """Fundamental cycles of a BFS spanning tree, as signed edge sequences.

    Each non-tree edge e closes the unique tree path from head(e) back to
    tail(e); the cycles come out as connected edge loops, deterministically
    ordered by the index of the closing edge.
    """
    parent = {0: None}
    order = [0]
    frontier = [0]
    tree_edges = set()
    while frontier:
        nxt = []
        for v in frontier:
            for signed, w in sorted(graph.adj[v]):
                if w not in parent:
                    parent[w] = (v, signed)
                    tree_edges.add(abs(signed))
                    nxt.append(w)
                    order.append(w)
        frontier = nxt
    if len(parent) != graph.n:
        raise DisconnectedGraph("cycle basis needs a connected graph")

    def tree_path(a, b):
        # signed edges from a to b through the tree
        up_a, up_b = [], []
        seen_a = {a: 0}
        chain = []
        x = a
        while parent[x] is not None:
            v, signed = parent[x]
            chain.append((x, signed))
            x = v
            seen_a[x] = len(chain)
        # climb from b until hitting a's chain
        path_b = []
        y = b
        while y not in seen_a:
            v, signed = parent[y]
            path_b.append(signed)
            y = v
        k = seen_a[y]
        down_a = [-signed for (_, signed) in chain[:k]]
        path_b.reverse()
        return down_a + path_b

    cycles = []
    for i, (t, h) in enumerate(graph.edges):
        if (i + 1) in tree_edges:
            continue
        loop = [i + 1] + tree_path(h, t)
        if not is_cycle(graph, loop):
            raise AssertionError("fundamental cycle failed the boundary check")
        cycles.append(loop)
    return cycles


def _solve_exact(rows, rhs):
    """Gaussian elimination over Fractions; raises SingularSystem when rank-deficient."""
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    mat = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    piv_cols = []
    r = 0
    for c in range(n_cols):
        piv = None
        for i in range(r, n_rows):
            if mat[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        scale = mat[r][c]
        mat[r] = [x / scale for x in mat[r]]
        for i in range(n_rows):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [x - factor * y for x, y in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if mat[i][n_cols] != 0:
            raise SingularSystem("inconsistent linear system")
    sol = [Fraction(0)] * n_cols
    for i, c in enumerate(piv_cols):
        sol[c] = mat[i][n_cols]
    return sol


def harmonic_basis(graph):
    """A basis of the space of tropical 1-forms (dimension = first Betti number)."""
    h = graph.betti()
    cycles = cycle_basis(graph)
    # eta_C for a cycle C is harmonic; these are independent and span
    return [TropicalOneForm(graph, _edge_vector(graph, c)) for c in cycles], cycles


def dual_tropical_basis(graph, cycles):
    """Tropical 1-forms eta_j with sum over C_i of eta_j equal to delta_ij."""
    basis, _ = harmonic_basis(graph)
    h = len(basis)
    if len(cycles) != h:
        raise SchemaError("need exactly h = |E| - |V| + 1 independent cycles")
    for c in cycles:
        if not is_cycle(graph, c):
            raise BrokenPath("cycle input fails the boundary check")
    pairing = [[tropical_integral(eta, c) for eta in basis] for c in cycles]
    out = []
    for j in range(h):
        rhs = [Fraction(1 if i == j else 0) for i in range(h)]
        try:
            coeffs = _solve_exact(pairing, rhs)
        except SingularSystem:
            raise SingularSystem("the given cycles are not a homology basis")
        values = [Fraction(0)] * len(graph.edges)
        for k, ck in enumerate(coeffs):
            for idx in range(len(graph.edges)):
                values[idx] += ck * basis[k].values[idx]
        eta = TropicalOneForm(graph, values)
        if not eta.is_harmonic():
            raise AssertionError("dual basis element fails harmonicity")
        out.append(eta)
    return out


def tropical_integral(eta, path):
    """Sum of eta over a signed edge sequence; consecutive edges must chain."""
    graph = eta.graph
    for a, b in zip(path, path[1:]):
        if graph.head(a) != graph.tail(b):
            raise BrokenPath("edges of the path do not concatenate")
    total = Fraction(0)
    for s in path:
        total += eta(s)
    return total


def harmonic_decompose(graph, values):
    """Split an antisymmetric edge function into harmonic + coboundary parts.

    The coboundary part is d* psi for a vertex function psi; over the
    rationals the splitting is unique and is found by solving the weighted
    Laplace equation picked out by the harmonicity of the difference.
    """
    values = [Fraction(v) for v in values]
    n = graph.n
    # outflow of the input at each vertex determines Laplacian(psi)
    rows = []
    rhs = []
    for v in range(n):
        row = [Fraction(0)] * n
        total = Fraction(0)
        for signed, w in graph.adj[v]:
            row[v] += 1
            row[w] -= 1
            sign = 1 if signed > 0 else -1
            total += sign * values[abs(signed) - 1]
        rows.append(row)
        rhs.append(-total)  # outflow of d*psi is minus the graph Laplacian of psi
    # gauge fix psi(0) = 0
    rows.append([Fraction(1)] + [Fraction(0)] * (n - 1))
    rhs.append(Fraction(0))
    psi = _solve_exact(rows, rhs)
    cob = []
    for i, (t, h) in enumerate(graph.edges):
        cob.append(psi[h] - psi[t])
    harm = [v - c for v, c in zip(values, cob)]
    eta = TropicalOneForm(graph, harm)
    if not eta.is_harmonic():
        raise AssertionError("harmonic projection failed")
    return eta, cob
