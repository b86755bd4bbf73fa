"""Semistable coverings of P^1 and of the hyperelliptic double cover.

The roots of f are clustered recursively (Hensel splitting along residue
classes after rescaling by uniformizer powers); the cluster tree yields the
tree-shaped dual graph of a covering of P^1 by rational wide opens, and
parity rules lift it to the dual graph of the double cover, whose first
Betti number h drives the whole comparison formula.

All valuation scales below are in p-units (Fractions), matching v_p(p) = 1.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    AmbiguousAtPrecision,
    DisconnectedGraph,
    NeedsLargerField,
    OnBoundary,
    SchemaError,
)
from .padic import INFINITY
from .polyring import Poly, hensel_split


class ClusterNode:
    """A cluster of roots of f: a K-rational center, the monic factor of f
    whose roots are the members, the scale at which the cluster separated
    from its siblings, and the scale at which it splits further (INFINITY
    for singletons, the common fractional root distance for irreducible
    leaves)."""

    __slots__ = (
        "center",
        "factor",
        "isolated_at",
        "splits_at",
        "children",
        "kind",
        "contains_infinity",
        "complement",
    )

    def __init__(self, center, factor, isolated_at, splits_at, children, kind):
        self.center = center
        self.factor = factor
        self.isolated_at = isolated_at
        self.splits_at = splits_at
        self.children = children
        self.kind = kind  # "root" | "internal" | "leaf" | "singleton"
        self.contains_infinity = False
        self.complement = None  # product of the factors of all roots outside

    def size(self):
        return self.factor.degree()

    def is_composite(self):
        return self.kind in ("internal", "leaf")

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def __repr__(self):
        return (
            f"ClusterNode({self.kind}, size {self.size()}, isolated_at {self.isolated_at},"
            f" splits_at {self.splits_at}, {len(self.children)} children)"
        )


def _residue_key(field, element):
    r = element.residue()
    return (r,) if not isinstance(r, tuple) else r


def _build_cluster(field, factor, isolated_at):
    """Recursive clustering of the roots of a monic integral factor."""
    if factor.degree() == 1:
        center = -factor[0]
        return ClusterNode(center, factor, isolated_at, INFINITY, [], "singleton")
    deg = factor.degree()
    center = -factor[deg - 1] * Fraction(1, deg)
    for _ in range(field.e * field.rep_digits):
        shifted = factor.shift_rescale(center, 1)
        slopes = [s for s, _ in shifted.newton_slopes()]
        sigma = min(slopes)
        if sigma is INFINITY:
            raise SchemaError("repeated root detected while clustering (f not squarefree)")
        if (sigma * field.e).denominator != 1:
            if len(slopes) > 1:
                raise NeedsLargerField(
                    "cluster mixes a fractional minimal root distance with deeper structure; enlarge K"
                )
            return ClusterNode(center, factor, isolated_at, sigma, [], "leaf")
        scale = field.uniformizer() ** int(sigma * field.e)
        rescaled = shifted.shift_rescale(field.zero(), scale)
        unit = scale.inverse() ** deg
        rescaled = rescaled * unit  # monic again: F(center + scale w)/scale^deg
        rbar = rescaled.residue_poly()
        root_classes, cofactor = rbar.roots()
        if cofactor.degree() > 0:
            raise NeedsLargerField(
                "residue classes of a cluster live in a residue extension; enlarge K"
            )
        if len(root_classes) == 1:
            cbar, mult = root_classes[0]
            assert mult == deg
            lift = field.from_coeffs(list(cbar)) if field.f > 1 else field.from_rational(cbar[0])
            center = center + scale * lift
            continue
        pieces = hensel_split(rescaled, [(_lift_residue(field, cbar), m) for cbar, m in root_classes])
        children = []
        for piece in pieces:
            pdeg = piece.degree()
            # convert back to the x coordinate: piece(w), w = (x - center)/scale
            coeffs = [piece[i] * scale ** (pdeg - i) for i in range(pdeg + 1)]
            in_u = Poly(field, coeffs)  # monic in u = x - center
            in_x = in_u.shift_rescale(-center, 1)
            children.append(_build_cluster(field, in_x, sigma))
        children.sort(key=lambda c: (c.isolated_at, _residue_sort_key(field, c, center, scale)))
        return ClusterNode(center, factor, isolated_at, sigma, children, "internal")
    raise AssertionError("cluster recursion failed to terminate")


def _lift_residue(field, cbar):
    if field.f > 1:
        return field.from_coeffs(list(cbar))
    return field.from_rational(cbar[0])


def _residue_sort_key(field, child, center, scale):
    w = (child.center - center) / scale
    try:
        return _residue_key(field, w)
    except ValueError:
        return (0,)


def cluster_roots(f):
    """The cluster tree of the roots of f (monic, integral, squarefree).

    The root node stands for all of P^1; its children are the residue
    classes of the finite roots.  An odd-degree f marks infinity as an extra
    root on the root node.
    """
    field = f.field
    inner = _build_cluster(field, f, Fraction(0))
    if inner.kind == "internal" and inner.splits_at == 0:
        children = inner.children  # several residue classes already at scale 0
    else:
        children = [inner]
    top = ClusterNode(field.zero(), f, None, Fraction(0), children, "root")
    top.contains_infinity = f.degree() % 2 == 1
    _assign_complements(top, Poly(field, [1]))
    return top


def _assign_complements(node, outer):
    """The exact product of the factors of every root outside each node,
    assembled multiplicatively so no polynomial division is ever needed."""
    node.complement = outer
    for child in node.children:
        prod = outer
        for other in node.children:
            if other is not child:
                prod = prod * other.factor
        _assign_complements(child, prod)


class Vertex:
    """A wide open of the covering: the region around a branch point of the
    cluster tree (or all of P^1 minus the top-level cluster discs)."""

    __slots__ = ("index", "node", "kind", "center", "scale", "holes", "half_edges", "label")

    def __init__(self, index, node, kind, center, scale, holes, half_edges):
        self.index = index
        self.node = node
        self.kind = kind  # "p1" for the root vertex, "disc" otherwise
        self.center = center
        self.scale = scale  # outer boundary scale in p-units (None for "p1")
        self.holes = holes  # list of (child_node, scale) removed closed discs
        self.half_edges = half_edges  # marks of roots living on this vertex
        self.label = None

    def __repr__(self):
        return f"Vertex#{self.index}({self.kind}, center={self.center!r}, holes={len(self.holes)}, marks={self.half_edges})"


class Edge:
    """An oriented annulus between two covering elements: the set
    s1 < v(x - center) < s2, oriented from the vertex at scale s1 (parent
    side) to the vertex at scale s2 (child side)."""

    __slots__ = ("index", "center", "interval", "tail", "head", "child_node", "split", "sheet")

    def __init__(self, index, center, interval, tail, head, child_node, split, sheet=None):
        self.index = index
        self.center = center
        self.interval = interval
        self.tail = tail
        self.head = head
        self.child_node = child_node
        self.split = split
        self.sheet = sheet  # for lifted edges: +1/-1 component marker

    def __repr__(self):
        return f"Edge#{self.index}({self.tail}->{self.head}, v in {self.interval}, sheet={self.sheet})"


class CoveringGraph:
    """Dual graph: vertices, oriented edges (stored once, with reverse implied),
    half-edge markers, and the first Betti number."""

    def __init__(self, vertices, edges, level):
        self.vertices = vertices
        self.edges = edges
        self.level = level  # "p1" or "double"
        self.betti = len(edges) - len(vertices) + 1 if vertices else 0

    def adjacency(self):
        adj = {v.index: [] for v in self.vertices}
        for e in self.edges:
            adj[e.tail].append((e.index, +1, e.head))
            adj[e.head].append((e.index, -1, e.tail))
        return adj

    def __repr__(self):
        return (
            f"CoveringGraph({self.level}: {len(self.vertices)} vertices,"
            f" {len(self.edges)} edges, h = {self.betti})"
        )


def build_p1_covering(tree):
    """The tree-shaped dual graph of a good covering of P^1."""
    vertices = []
    edges = []

    def vertex_for(node, kind):
        holes = [(child, child.splits_at) for child in node.children if child.is_composite()]
        half = []
        for child in node.children:
            if child.kind == "singleton":
                half.append(("root", child.center))
        if node.kind == "leaf":
            half = [("leaf_member", node.center, i) for i in range(node.size())]
        if node.kind == "root" and node.contains_infinity:
            half.append(("infinity",))
        v = Vertex(len(vertices), node, kind, node.center, node.isolated_at, holes, half)
        vertices.append(v)
        return v

    def rec(node, parent_vertex):
        if node.kind == "root":
            v = vertex_for(node, "p1")
        else:
            v = vertex_for(node, "disc")
        if parent_vertex is not None:
            edges.append(
                Edge(
                    len(edges),
                    node.center,
                    (node.isolated_at, node.splits_at),
                    parent_vertex.index,
                    v.index,
                    node,
                    split=None,
                )
            )
        for child in node.children:
            if child.is_composite():
                rec(child, v)

    rec(tree, None)
    return CoveringGraph(vertices, edges, "p1")


def roots_inside_vertex(vertex):
    """Number of roots of f lying on the wide open itself (marks)."""
    count = 0
    for mark in vertex.half_edges:
        if mark[0] in ("root", "infinity"):
            count += 1
        elif mark[0] == "leaf_member":
            count += 1
    return count


def build_double_cover(cgraph, f):
    """Dual graph of the induced covering of the double cover y^2 = f(x).

    A vertex splits into two sheets iff its wide open carries no roots and
    every hole (and hence the outer region) holds an even number of them; an
    annulus splits iff the disc it bounds holds an even number.  These are
    the geometric component counts over C_p; whether the sheets are defined
    over K is a separate question answered lazily by the models.
    """
    vertex_map = {}
    dvertices = []
    for v in cgraph.vertices:
        inside = roots_inside_vertex(v)
        holes_even = all(child.size() % 2 == 0 for child, _ in v.holes)
        splits = inside == 0 and holes_even
        if splits:
            plus = Vertex(len(dvertices), v.node, v.kind, v.center, v.scale, v.holes, list(v.half_edges))
            plus.label = "+"
            dvertices.append(plus)
            minus = Vertex(len(dvertices), v.node, v.kind, v.center, v.scale, v.holes, list(v.half_edges))
            minus.label = "-"
            dvertices.append(minus)
            vertex_map[v.index] = (plus.index, minus.index)
        else:
            one = Vertex(len(dvertices), v.node, v.kind, v.center, v.scale, v.holes, list(v.half_edges))
            one.label = "."
            dvertices.append(one)
            vertex_map[v.index] = (one.index,)
    dedges = []
    for e in cgraph.edges:
        n_inside = e.child_node.size()
        tails = vertex_map[e.tail]
        heads = vertex_map[e.head]
        if n_inside % 2 == 0:
            for sheet, pick in ((+1, 0), (-1, 1)):
                tail = tails[pick] if len(tails) == 2 else tails[0]
                head = heads[pick] if len(heads) == 2 else heads[0]
                dedges.append(
                    Edge(len(dedges), e.center, e.interval, tail, head, e.child_node, split=True, sheet=sheet)
                )
        else:
            if len(tails) == 2 or len(heads) == 2:
                raise AssertionError("odd annulus attached to a split vertex")
            dedges.append(
                Edge(len(dedges), e.center, e.interval, tails[0], heads[0], e.child_node, split=False)
            )
    graph = CoveringGraph(dvertices, dedges, "double")
    graph.p1_graph = cgraph
    return graph


# -- point location and paths ----------------------------------------------


def locate_x(tree, x):
    """Descend the cluster tree: the node owning x and the annulus data.

    Returns ("vertex", node) when x lies on the wide open of `node`, or
    ("edge", node) when x lies on the annulus between node and its parent.
    """
    node = tree
    while True:
        nxt = None
        for child in node.children:
            v = (x - child.center).valuation()
            if v is INFINITY or v > child.isolated_at:
                nxt = (child, v)
                break
        if nxt is None:
            return ("vertex", node)
        child, v = nxt
        if child.kind == "singleton":
            return ("vertex", node)
        if v is not INFINITY and v < child.splits_at:
            return ("edge", child)
        node = child


class Skeleton:
    """The double-cover graph together with point location and path search."""

    def __init__(self, tree, p1_graph, dgraph, sheet_sign):
        self.tree = tree
        self.p1 = p1_graph
        self.graph = dgraph
        self._sheet_sign = sheet_sign  # callable (cvertex_node, point) -> +1/-1
        self._node_to_cvertex = {id(v.node): v for v in p1_graph.vertices}
        self._lifts = {}
        for dv in dgraph.vertices:
            self._lifts.setdefault(id(dv.node), []).append(dv)

    def locate(self, pt):
        """The double-cover vertex whose wide open contains the point."""
        if pt.is_infinite():
            node = self.tree
        else:
            where, node = locate_x(self.tree, pt.x)
            if where == "edge":
                raise OnBoundary(
                    "point retracts to an annulus of the skeleton; use it as a reference point",
                    edge=node,
                )
        lifts = self._lifts[id(node)]
        if len(lifts) == 1:
            return lifts[0]
        try:
            sign = self._sheet_sign(node, pt)
        except Exception as exc:
            raise AmbiguousAtPrecision(
                f"cannot resolve the sheet of the point at working precision: {exc}"
            ) from exc
        want = "+" if sign > 0 else "-"
        for dv in lifts:
            if dv.label == want:
                return dv
        raise AmbiguousAtPrecision("cannot resolve the sheet of the point at working precision")

    def path_between(self, start_index, end_index):
        return self.shortest_path(start_index, end_index)

    def shortest_path(self, start_index, end_index):
        """Deterministic BFS edge path between two vertices of the double cover."""
        if start_index == end_index:
            return []
        adj = self.graph.adjacency()
        prev = {start_index: None}
        frontier = [start_index]
        while frontier:
            nxt = []
            for v in frontier:
                for eidx, direction, w in sorted(adj[v]):
                    if w not in prev:
                        prev[w] = (v, eidx, direction)
                        nxt.append(w)
            if end_index in prev:
                break
            frontier = nxt
        if end_index not in prev:
            raise DisconnectedGraph("no path between the vertices")
        path = []
        at = end_index
        while prev[at] is not None:
            v, eidx, direction = prev[at]
            path.append((eidx, direction))
            at = v
        path.reverse()
        return path


def skeleton_path(skeleton, start_vertex, end_vertex):
    """Deterministic edge path (index, direction) between two skeleton vertices."""
    return skeleton.shortest_path(start_vertex, end_vertex)
