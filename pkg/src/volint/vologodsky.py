"""Vologodsky integrals on bad-reduction hyperelliptic curves.

The orchestrator ties the pieces together: locate the endpoints on the double
cover skeleton, integrate leg by leg through reference points to get a
Berkovich-Coleman path integral, compute the Berkovich-Coleman periods over a
homology basis of the skeleton, evaluate the dual tropical 1-forms along the
retracted path, and assemble

    V-int = BC-int(path) - sum_i  BC-period(loop_i) * tropical-int(path, eta_i).

Exact parts dF and logarithmic parts c dF/F contribute endpoint terms only
and never touch the legs.
"""

from __future__ import annotations

from fractions import Fraction

from . import tropical
from .covering import Skeleton, build_double_cover, build_p1_covering, cluster_roots
from .curve import CurvePoint, MeromorphicForm, height_integrand
from .errors import (
    BackendUnavailable,
    BrokenPath,
    DegenerateInputPoints,
    NeedsLargerField,
    OnBoundary,
)
from .wideopen import build_model, expand_form, integrate_parametrized, integrate_split, coleman_backend


def cycle_realizations(integrator, cycles):
    """Reference-point itineraries realizing each cycle of the skeleton."""
    return [integrator.cycle_realization(c) for c in cycles]


class IntegrationJob:
    """One integration request: a form, two endpoints, and optional overrides."""

    def __init__(self, form, start, end, path_points=None, order_scale=1):
        self.form = form
        self.start = start
        self.end = end
        self.path_points = path_points
        self.order_scale = order_scale


class Integrator:
    """Shared skeleton, models, reference points and period cache for one curve."""

    def __init__(self, curve, backend=None, target_prec=None):
        self.curve = curve
        self.field = curve.field
        # truncation budgets aim at this absolute precision (pi-units); the
        # field's working precision should exceed it by roughly another
        # target's worth, since a window coefficient at inverse power k is
        # only known to (working - k) units at the endpoints
        self.target_pi = target_prec if target_prec is not None else curve.field.prec
        self.backend = backend
        self.tree = cluster_roots(curve.f)
        self.c_graph = build_p1_covering(self.tree)
        self.d_graph = build_double_cover(self.c_graph, curve.f)
        self._models = {}
        self._node_to_cvertex = {id(v.node): v for v in self.c_graph.vertices}
        self.skeleton = Skeleton(self.tree, self.c_graph, self.d_graph, self._sheet_sign)
        self._refs = {}
        self._tropical = None
        self._period_cache = {}

    # -- models --------------------------------------------------------------

    def model_for_cvertex(self, cvertex):
        got = self._models.get(cvertex.index)
        if got is None:
            got = build_model(cvertex, self.curve)
            self._models[cvertex.index] = got
        return got

    def model_for_dvertex(self, dvertex):
        cv = self._node_to_cvertex[id(dvertex.node)]
        return self.model_for_cvertex(cv)

    def _sheet_sign(self, node, pt):
        cv = self._node_to_cvertex[id(node)]
        return self.model_for_cvertex(cv).sheet_sign(pt)

    # -- reference points ------------------------------------------------------

    def set_reference_point(self, edge_index, pt):
        self._refs[edge_index] = pt

    def reference_point(self, edge_index):
        """The chosen point on the annulus of a double-cover edge.

        The automatic choice targets the middle of the valuation interval; it
        needs a K-rational radius there, otherwise the caller must supply
        reference points (the usual 'enlarge K' situation).
        """
        got = self._refs.get(edge_index)
        if got is not None:
            return got
        edge = self.d_graph.edges[edge_index]
        field = self.field
        s1, s2 = edge.interval
        e = field.e
        lo, hi = e * s1, e * s2
        k = int((lo + hi) / 2)
        if not (lo < k < hi):
            k = int(lo) + 1
        if not (lo < k < hi):
            raise NeedsLargerField(
                "no K-rational radius inside the annulus; supply reference points or enlarge K"
            )
        pi = field.uniformizer()
        x_ref = None
        for unit in range(1, field.p):
            cand = edge.center + pi**k * field.from_rational(unit)
            v = (cand - edge.center).vpi()
            if v == k:
                x_ref = cand
                break
        if x_ref is None:
            raise NeedsLargerField("could not realize a mid-annulus radius in K")
        pt = self._point_on_sheet(edge, x_ref)
        self._refs[edge_index] = pt
        return pt

    def _point_on_sheet(self, edge, x_ref):
        """A curve point over x_ref lying on the annulus component of `edge`."""
        field = self.field
        fval = self.curve.f(x_ref)
        y = fval.sqrt()
        pt = CurvePoint(self.curve, x=x_ref, y=y)
        if not edge.split:
            return pt
        tail_v = self.d_graph.vertices[edge.tail]
        head_v = self.d_graph.vertices[edge.head]
        for v in (tail_v, head_v):
            if v.label in ("+", "-"):
                model = self.model_for_dvertex(v)
                want = +1 if v.label == "+" else -1
                have = model.sheet_sign(pt)
                return pt if have == want else pt.involution()
        # neither endpoint splits (a doubled annulus between two non-split
        # vertices): label the sheets by the canonical square root
        return pt if edge.sheet > 0 else pt.involution()

    # -- legs -----------------------------------------------------------------

    def _leg(self, dvertex, a_poly, nus, start, end, order_scale=1):
        model = self.model_for_dvertex(dvertex)
        if model.kind == "big":
            try:
                return coleman_backend(model, a_poly, nus, start, end, self.backend)
            except BackendUnavailable as exc:
                raise BackendUnavailable(f"vertex {dvertex.index} [{dvertex.label}]: {exc}") from exc
        expanded = expand_form(
            a_poly, nus, model, [start, end], target_pi=self.target_pi, order_scale=order_scale
        )
        if model.kind == "split":
            return integrate_split(expanded, start, end)
        return integrate_parametrized(expanded, start, end)

    def _vertices_of_point(self, pt):
        """Indices of the double-cover vertices whose closure contains pt."""
        try:
            return [self.skeleton.locate(pt).index], None
        except OnBoundary as ob:
            node = ob.edge
            # the point sits on the annulus above `node`; find its D-edge
            cands = [e for e in self.d_graph.edges if e.child_node is node]
            if len(cands) == 1:
                e = cands[0]
                return [e.tail, e.head], e
            chosen = self._pick_annulus_component(cands, pt)
            return [chosen.tail, chosen.head], chosen

    def _pick_annulus_component(self, cands, pt):
        """Which of the two annulus components above a split annulus holds pt:
        decided by the sheet on a split side when one exists, else by the
        canonical square root."""
        e0 = cands[0]
        for vidx in (e0.tail, e0.head):
            dv = self.d_graph.vertices[vidx]
            if dv.label in ("+", "-"):
                model = self.model_for_dvertex(dv)
                sign = model.sheet_sign(pt)
                want = "+" if sign > 0 else "-"
                for e in cands:
                    for widx in (e.tail, e.head):
                        wv = self.d_graph.vertices[widx]
                        if wv.label == want and wv.node is dv.node:
                            return e
                raise BrokenPath("no annulus component matches the sheet of the point")
        canonical = self.curve.f(pt.x).sqrt()
        sheet = +1 if (pt.y - canonical).is_zero() else -1
        for e in cands:
            if e.sheet == sheet:
                return e
        raise BrokenPath("cannot attach the point to an annulus component")

    def _legs_from_waypoints(self, points):
        """Common-vertex legs through explicit waypoints, plus the edge path.

        Each consecutive pair must share a double-cover vertex; waypoints on
        annuli mark the traversed edges, oriented by the direction of travel.
        """
        data = [self._vertices_of_point(pt) for pt in points]
        legs = []
        for i in range(len(points) - 1):
            vs_a, _ = data[i]
            vs_b, _ = data[i + 1]
            common = [v for v in vs_a if v in vs_b]
            if not common:
                raise BrokenPath(
                    f"waypoints {i} and {i + 1} do not share a wide open; add intermediate points"
                )
            legs.append((common[0], points[i], points[i + 1]))
        tau = []
        for i in range(1, len(points) - 1):
            _, edge = data[i]
            if edge is None:
                continue  # interior waypoint: no retraction mark
            before = legs[i - 1][0]
            after = legs[i][0]
            if edge.tail == before and edge.head == after:
                tau.append(edge.index + 1)
            elif edge.head == before and edge.tail == after:
                tau.append(-(edge.index + 1))
            elif before == after:
                continue  # the path dips onto the annulus and comes back
            else:
                raise BrokenPath("waypoint edge does not join the neighbouring legs")
        return legs, tau

    def _auto_path(self, start, end):
        v0 = self.skeleton.locate(start).index
        v1 = self.skeleton.locate(end).index
        edge_path = self.skeleton.shortest_path(v0, v1)
        points = [start]
        for eidx, direction in edge_path:
            points.append(self.reference_point(eidx))
        points.append(end)
        legs, tau = self._legs_from_waypoints(points)
        return legs, tau

    # -- public operations -----------------------------------------------------

    def bc_path_integral(self, form, start, end, path_points=None, order_scale=1):
        """Berkovich-Coleman integral along the given (or a default) path."""
        flat = form.flattened()
        value = self._endpoint_parts(flat, start, end)
        a_poly = flat.poly_part()
        nus = flat.nus
        if not a_poly.coeffs and not nus:
            return value
        legs, _ = self._resolve_path(start, end, path_points)
        for vidx, p0, p1 in legs:
            value = value + self._leg(
                self.d_graph.vertices[vidx], a_poly, nus, p0, p1, order_scale
            )
        return value

    def _resolve_path(self, start, end, path_points):
        if path_points is None:
            return self._auto_path(start, end)
        if all(isinstance(p, int) for p in path_points):
            # explicit edge sequence: route through the edges' reference points
            points = [start] + [self.reference_point(i) for i in path_points] + [end]
        else:
            points = [start] + list(path_points) + [end]
        return self._legs_from_waypoints(points)

    def _endpoint_parts(self, flat, start, end):
        value = self.field.zero()
        for F in flat.exact:
            value = value + F.eval(end) - F.eval(start)
        for F, c in flat.logs:
            ratio = F.eval(end) / F.eval(start)
            value = value + c * ratio.log()
        return value

    def bc_period(self, form, cycle_points, order_scale=1):
        """Berkovich-Coleman period along a loop of reference points."""
        flat = form.flattened()
        a_poly = flat.poly_part()
        nus = flat.nus
        if not a_poly.coeffs and not nus:
            return self.field.zero()
        points = list(cycle_points) + [cycle_points[0]]
        legs, _ = self._legs_from_waypoints(points)
        value = self.field.zero()
        for vidx, p0, p1 in legs:
            value = value + self._leg(self.d_graph.vertices[vidx], a_poly, nus, p0, p1, order_scale)
        return value

    # -- tropical data ---------------------------------------------------------

    def tropical_data(self, cycles=None):
        """(graph, cycles, dual forms); cycles default to the fundamental basis."""
        if cycles is None:
            if self._tropical is None:
                graph = tropical.Graph.from_covering(self.d_graph)
                cycles = tropical.cycle_basis(graph)
                etas = tropical.dual_tropical_basis(graph, cycles) if cycles else []
                self._tropical = (graph, cycles, etas)
            return self._tropical
        graph = tropical.Graph.from_covering(self.d_graph)
        etas = tropical.dual_tropical_basis(graph, cycles)
        return graph, cycles, etas

    def cycle_realization(self, cycle):
        """Reference-point itinerary realizing a cycle of signed edges."""
        pts = []
        for s in cycle:
            pts.append(self.reference_point(abs(s) - 1))
        return pts

    def _period_cached(self, form, form_token, cycle_idx, cycle, order_scale):
        key = (form_token, cycle_idx, order_scale)
        if form_token is not None and key in self._period_cache:
            return self._period_cache[key]
        value = self.bc_period(form, self.cycle_realization(cycle), order_scale=order_scale)
        if form_token is not None:
            self._period_cache[key] = value
        return value

    # -- the comparison formula --------------------------------------------------

    def integrate(self, form, start, end, path_points=None, order_scale=1, form_token=None):
        """The Vologodsky integral of the form from start to end."""
        flat = form.flattened()
        value = self._endpoint_parts(flat, start, end)
        a_poly = flat.poly_part()
        nus = flat.nus
        if not a_poly.coeffs and not nus:
            return value
        legs, tau = self._resolve_path(start, end, path_points)
        for vidx, p0, p1 in legs:
            value = value + self._leg(self.d_graph.vertices[vidx], a_poly, nus, p0, p1, order_scale)
        if self.d_graph.betti == 0:
            return value
        graph, cycles, etas = self.tropical_data()
        for i, (cycle, eta) in enumerate(zip(cycles, etas)):
            weight = tropical.tropical_integral(eta, tau) if tau else Fraction(0)
            if weight == 0:
                continue  # no need to compute the matching period
            period = self._period_cached(form, form_token, i, cycle, order_scale)
            value = value - period.scale_rational(weight)
        return value

    def integrate_job(self, job):
        return self.integrate(
            job.form, job.start, job.end, path_points=job.path_points, order_scale=job.order_scale
        )

    # -- heights -------------------------------------------------------------------

    def coleman_gross_hp(self, P, R, order_scale=1):
        """The p-part of the extended Coleman-Gross height pairing h_p(P, R)
        on an elliptic curve, with complementary subspace spanned by omega_1."""
        for a, b in ((P, R), (P, P.involution()), (R, R.involution()), (P, R.involution())):
            if a.same_point(b):
                raise DegenerateInputPoints("P, -P, R, -R must be pairwise distinct")
        curve = self.curve
        pole_part = height_integrand(P, curve)
        omega0 = MeromorphicForm(curve, basis=[1])
        omega1 = MeromorphicForm(curve, basis=[0, 1])
        negR = R.involution()
        negP = P.involution()
        v_pole = self.integrate(pole_part, negR, R, order_scale=order_scale)
        v_omega0 = self.integrate(omega0, negR, R, order_scale=order_scale, form_token="omega0")
        v_omega1 = self.integrate(omega1, negP, P, order_scale=order_scale, form_token="omega1")
        return v_pole + v_omega0 * v_omega1
