"""Coleman integration on a single hyperelliptic basic wide open.

Each covering element is identified with a wide open inside a good-reduction
curve y~^2 = g(x) via (x, y) -> (x, y / ell(x)), where ell = h k^(1/2) is the
analytic square root of f/g assembled from per-hole inverse-square-root tails
and an outer Taylor factor.  A leg integral of A(x) dx/2y is then computed in
an explicit coordinate:

* split components (deg g = 0): y~ = +-1 and the form is a rational wide-open
  differential in x, integrated by exact partial fractions plus branch logs;
* deg g = 1: x = t^2 + r, y~ = t turns the leg into a rational function of t
  (partial fractions again);
* deg g = 2: with g = (x - m)^2 - D, the coordinate z = y~ + (x - m) maps the
  wide open onto an annulus, dx/2y~ = dz/2z, and the leg becomes a Laurent
  series in z integrated termwise, Log z collecting the annulus residue.

deg g >= 3 needs Frobenius-based Coleman integration and is only exposed as a
pluggable backend slot.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    BackendUnavailable,
    BrokenPath,
    NeedsLargerField,
    PoleAtEndpoint,
    UnparameterizableDegree,
)
from .padic import INFINITY, len_base
from .polyring import LaurentSeries, Poly, inv_sqrt_series


class HoleData:
    """Removed disc of a wide open: center, root count, exponent L of the
    polynomial part, and the reversed cluster factor k(w) = F(c + 1/w) w^n,
    a polynomial in w = 1/(x - c) with constant term 1 whose w^r coefficient
    has valuation at least r * depth."""

    __slots__ = ("center", "count", "L", "kpoly", "depth", "_series_cache")

    def __init__(self, center, count, L, kpoly, depth):
        self.center = center
        self.count = count
        self.L = L
        self.kpoly = kpoly
        self.depth = depth  # p-units
        self._series_cache = {}

    def inv_sqrt(self, order):
        got = self._series_cache.get(order)
        if got is None:
            field = self.kpoly.field
            u = LaurentSeries(field, list(self.kpoly.coeffs), 0, order=order, tag="w")
            got = inv_sqrt_series(u)
            self._series_cache[order] = got
        return got

    def k_value(self, x0):
        w0 = (x0 - self.center).inverse()
        return self.kpoly(w0)


class OuterData:
    """Taylor data of the outside factor on a disc vertex."""

    __slots__ = ("center", "factor", "const", "unit_poly", "scale", "_sqrt_const", "_series_cache")

    def __init__(self, center, factor, scale):
        self.center = center
        self.factor = factor
        self.const = factor(center)
        shifted = factor.shift_rescale(center, 1)
        self.unit_poly = shifted * self.const.inverse()
        self.scale = scale  # p-units: outer roots sit at valuation <= scale
        self._sqrt_const = None
        self._series_cache = {}

    def sqrt_const(self):
        if self._sqrt_const is None:
            self._sqrt_const = self.const.sqrt()
        return self._sqrt_const

    def inv_sqrt(self, order):
        got = self._series_cache.get(order)
        if got is None:
            field = self.unit_poly.field
            u = LaurentSeries(field, list(self.unit_poly.coeffs)[:order], 0, order=order, tag="u")
            got = inv_sqrt_series(u)
            self._series_cache[order] = got
        return got

    def unit_value(self, x0):
        return self.unit_poly(x0 - self.center)


class WideOpenModel:
    """Good-reduction model of the wide open above one covering element."""

    def __init__(self, field, curve, cvertex, g, holes, outer):
        self.field = field
        self.curve = curve
        self.cvertex = cvertex
        self.g = g
        self.holes = holes
        self.outer = outer
        self._fraction_cache = {}
        d = g.degree()
        if d <= 0:
            self.kind = "split"
        elif d == 1:
            self.kind = "deg1"
            self.r = -g[0]
        elif d == 2:
            self.kind = "deg2"
            self.m = -g[1] * Fraction(1, 2)
            self.D = self.m * self.m - g[0]
        else:
            self.kind = "big"

    # -- the analytic square root ell = h k^(1/2) ---------------------------

    def ell_value(self, x0):
        """ell(x0) through the same canonical square roots that normalize the
        series expansions, so points and series share one branch."""
        field = self.field
        acc = field.one()
        for hole in self.holes:
            diff = x0 - hole.center
            if diff.is_zero():
                raise PoleAtEndpoint("evaluation point sits at a hole center")
            if hole.L:
                acc = acc * diff**hole.L
            acc = acc * hole.k_value(x0).sqrt()
        if self.outer is not None:
            acc = acc * self.outer.sqrt_const()
            acc = acc * self.outer.unit_value(x0).sqrt()
        return acc

    def ytilde(self, pt):
        if pt.is_infinite():
            raise BrokenPath("points at infinity cannot be leg endpoints")
        return pt.y / self.ell_value(pt.x)

    def sheet_sign(self, pt):
        if pt.is_infinite():
            # y/x^(d/2) tends to +-1 and ell is monic of degree d/2 here
            return +1 if pt.at_infinity == "inf+" else -1
        t = self.ytilde(pt)
        if (t - 1).is_zero():
            return +1
        if (t + 1).is_zero():
            return -1
        raise BrokenPath("point does not lie on a split component of this wide open")

    def local_coordinate(self, pt):
        if self.kind == "split":
            return pt.x
        if self.kind == "deg1":
            return self.ytilde(pt)
        if self.kind == "deg2":
            return self.ytilde(pt) + (pt.x - self.m)
        raise UnparameterizableDegree("deg g >= 3 has no rational parameterization")

    # -- cached rational form of 1/ell --------------------------------------

    def inv_ell_fraction(self, orders):
        """1/ell as const * N(x) / prod (x - c_H)^(M_H), truncated per orders.

        Returns (const, numerator Poly, [(center, mult)]).
        """
        key = tuple(sorted((k, v) for k, v in orders.items() if k != "guard"))
        got = self._fraction_cache.get(key)
        if got is not None:
            return got
        field = self.field
        const = field.one()
        num = Poly(field, [1])
        poles = []
        for i, hole in enumerate(self.holes):
            series = hole.inv_sqrt(orders[("hole", i)])
            n = len(series.coeffs)
            coeffs_u = [series.coeffs[n - 1 - j] for j in range(n)]
            num_u = Poly(field, coeffs_u)
            num = num * num_u.shift_rescale(-hole.center, 1)
            poles.append((hole.center, n - 1 + hole.L))
        if self.outer is not None:
            series = self.outer.inv_sqrt(orders[("outer",)])
            taylor_u = Poly(field, list(series.coeffs))
            num = num * taylor_u.shift_rescale(-self.outer.center, 1)
            const = const * self.outer.sqrt_const().inverse()
        got = (const, num, poles)
        self._fraction_cache[key] = got
        return got

    def __repr__(self):
        return f"WideOpenModel({self.kind}, deg g = {self.g.degree()}, holes = {len(self.holes)})"


def build_model(cvertex, curve):
    """Assemble the (g, h, k) data of the wide open above a covering element.

    g collects the factors of roots living on the wide open (singleton marks,
    leaf members) plus one linear factor per odd hole; each hole contributes
    (x - c)^L k(w)^(1/2) to ell; disc vertices also get an outer Taylor factor
    for the roots beyond their boundary.
    """
    field = curve.field
    node = cvertex.node
    g = Poly(field, [1])
    if node.kind == "leaf":
        g = g * node.factor
    else:
        for child in node.children:
            if child.kind == "singleton":
                g = g * child.factor
    holes = []
    for child, _scale in cvertex.holes:
        n = child.size()
        if n % 2 == 1:
            g = g * Poly(field, [-child.center, 1])
        shifted = child.factor.shift_rescale(child.center, 1)
        kpoly = shifted.reverse()
        holes.append(HoleData(child.center, n, n // 2, kpoly, child.splits_at))
    outer = None
    if cvertex.kind == "disc":
        out_factor = node.complement
        if out_factor.degree() >= 1:
            center = node.center
            if g.degree() == 2:
                center = -g[1] * Fraction(1, 2)
            outer = OuterData(center, out_factor, cvertex.scale)
    return WideOpenModel(field, curve, cvertex, g, holes, outer)


# -- truncation budget --------------------------------------------------------


def _budget_orders(model, endpoints_x, target_pi):
    """Series truncation orders from endpoint decay rates.

    A hole tail index gains at least e*depth - max v_pi(x0 - c) per step at
    the endpoints; the outer Taylor index gains the endpoint distance from
    the center (minus the outer root scale).  The guard absorbs a flat margin
    plus the worst antiderivative denominator e*ceil(log_p(order)).
    """
    field = model.field
    e = field.e
    guard = 10 + 2 * e
    decays = {}
    worst = None
    for i, hole in enumerate(model.holes):
        tmax = 0
        for x0 in endpoints_x:
            t = (x0 - hole.center).vpi()
            if t is INFINITY:
                raise PoleAtEndpoint("endpoint at a hole center")
            tmax = max(tmax, t)
        decay = e * hole.depth - tmax
        if decay <= 0:
            raise PoleAtEndpoint("endpoint inside a removed disc of the wide open")
        decays[("hole", i)] = decay
        worst = decay if worst is None else min(worst, decay)
    if model.outer is not None:
        tmin = None
        for x0 in endpoints_x:
            t = (x0 - model.outer.center).vpi()
            t = target_pi if t is INFINITY else t
            tmin = t if tmin is None else min(tmin, t)
        decay = tmin - e * model.outer.scale
        if decay <= 0:
            raise PoleAtEndpoint("endpoint on the outer boundary of the wide open")
        decays[("outer",)] = decay
        worst = decay if worst is None else min(worst, decay)
    est = (target_pi + guard) // (worst or 1) + 1 if worst is not None else 1
    guard += e * len_base(int(est) + 1, field.p)
    orders = {key: int((target_pi + guard) // decay + 1) for key, decay in decays.items()}
    orders["guard"] = guard
    return orders


# -- engine A: exact partial fractions in a rational coordinate ---------------


class RationalIntegrand:
    """num(x) / prod (x - w)^m dx, integrated by exact partial fractions."""

    def __init__(self, field, numerator, poles):
        self.field = field
        self.numerator = numerator
        self.poles = poles

    def antiderivative_eval(self, x0, x1):
        """Integral from x0 to x1: rational part difference plus branch logs."""
        field = self.field
        denom = Poly(field, [1])
        for w, m in self.poles:
            if (x0 - w).is_zero() or (x1 - w).is_zero():
                raise PoleAtEndpoint("leg endpoint hits a pole of the integrand")
            denom = denom * Poly(field, [-w, 1]) ** m
        quot, rem = self.numerator.divmod(denom)
        total = field.zero()
        for k, c in enumerate(quot.coeffs):
            c = c.scale_rational(Fraction(1, k + 1))
            total = total + c * (x1 ** (k + 1) - x0 ** (k + 1))
        for idx, (w, m) in enumerate(self.poles):
            pp = self._principal_part(rem, idx)
            for k in range(2, m + 1):
                b = pp.get(k)
                if b is None or b.is_zero():
                    continue
                c = b.scale_rational(Fraction(-1, k - 1))
                total = total + c * ((x1 - w) ** (1 - k) - (x0 - w) ** (1 - k))
            b1 = pp.get(1)
            if b1 is not None and not b1.is_zero():
                total = total + b1 * ((x1 - w) / (x0 - w)).log()
        return total

    def _principal_part(self, rem, idx):
        """{k: b_k} with the fraction's part at w equal to sum b_k (x-w)^-k."""
        field = self.field
        w, m = self.poles[idx]
        num_mod = _taylor_mod(rem, w, m)
        other = Poly(field, [1])
        for j, (w2, m2) in enumerate(self.poles):
            if j == idx:
                continue
            other = other * Poly(field, [w - w2, 1]) ** m2
        other_mod = Poly(field, other.coeffs[:m])
        inv = _poly_series_inverse(other_mod, m)
        prod_low = [field.zero()] * m
        for i, c in enumerate(num_mod.coeffs):
            for j, d in enumerate(inv.coeffs):
                if i + j < m:
                    prod_low[i + j] = prod_low[i + j] + c * d
        return {m - j: prod_low[j] for j in range(m)}


def _taylor_mod(poly, w, order):
    """First `order` Taylor coefficients of poly at w, by synthetic division."""
    field = poly.field
    coeffs = list(poly.coeffs)
    out = []
    for _ in range(order):
        if not coeffs:
            out.append(field.zero())
            continue
        quot = [None] * (len(coeffs) - 1)
        r = coeffs[-1]
        for i in range(len(coeffs) - 2, -1, -1):
            quot[i] = r
            r = coeffs[i] + r * w
        out.append(r)
        coeffs = quot
    return Poly(field, out)


def _poly_series_inverse(poly, order):
    """Inverse of a polynomial as a power series mod x^order."""
    field = poly.field
    inv0 = poly[0].inverse()
    out = [inv0]
    for k in range(1, order):
        acc = field.zero()
        for j in range(1, k + 1):
            acc = acc + poly[j] * out[k - j]
        out.append(-inv0 * acc)
    return Poly(field, out)


def _compose_x_poly(poly, sub):
    """poly(sub(t)) by Horner over Poly."""
    field = poly.field
    acc = Poly(field, [])
    for c in reversed(poly.coeffs):
        acc = acc * sub + Poly(field, [c])
    return acc


# -- engine B: windowed Laurent series in the annulus coordinate --------------


class _ZSeries:
    """Two-sided coefficient window in z, clipped to [lo_cap, hi_cap]."""

    __slots__ = ("field", "lo", "coeffs", "lo_cap", "hi_cap")

    def __init__(self, field, lo, coeffs, lo_cap, hi_cap):
        self.field = field
        self.lo_cap = lo_cap
        self.hi_cap = hi_cap
        # clip
        hi = lo + len(coeffs)
        if lo < lo_cap:
            coeffs = coeffs[lo_cap - lo :]
            lo = lo_cap
        if lo + len(coeffs) > hi_cap + 1:
            coeffs = coeffs[: hi_cap + 1 - lo]
        self.lo = lo
        self.coeffs = coeffs

    @classmethod
    def zero(cls, field, lo_cap, hi_cap):
        return cls(field, 0, [], lo_cap, hi_cap)

    def __getitem__(self, k):
        if self.lo <= k < self.lo + len(self.coeffs):
            return self.coeffs[k - self.lo]
        return self.field.zero()

    def add(self, other):
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        lo = min(self.lo, other.lo)
        hi = max(self.lo + len(self.coeffs), other.lo + len(other.coeffs))
        return _ZSeries(
            self.field,
            lo,
            [self[k] + other[k] for k in range(lo, hi)],
            self.lo_cap,
            self.hi_cap,
        )

    def scale(self, c):
        return _ZSeries(self.field, self.lo, [x * c for x in self.coeffs], self.lo_cap, self.hi_cap)

    def shift(self, k):
        return _ZSeries(self.field, self.lo + k, list(self.coeffs), self.lo_cap, self.hi_cap)

    def mul_short(self, short):
        """Multiply by a short Laurent polynomial [(exp, coeff), ...]."""
        out = _ZSeries.zero(self.field, self.lo_cap, self.hi_cap)
        for exp, c in short:
            out = out.add(self.shift(exp).scale(c))
        return out

    def divide_linear(self, zw, mode):
        """Divide by (z - zw), choosing the expansion that converges on the leg.

        "outer": the pole sits below every endpoint valuation (towards the
        outer annulus boundary); upward recurrence t_k = (t_{k-1} - s_k)/zw.
        "inner"/"vanishing": the pole sits above every endpoint valuation (or
        the numerator vanishes at an interior zw); downward recurrence
        t_{k-1} = s_k + zw t_k.
        """
        field = self.field
        lo = self.lo
        hi = self.lo + len(self.coeffs) - 1
        if not self.coeffs:
            return self
        if mode == "outer":
            out = []
            zinv = zw.inverse()
            t_prev = field.zero()
            for k in range(lo, self.hi_cap + 1):
                t = (t_prev - self[k]) * zinv
                out.append(t)
                t_prev = t
            return _ZSeries(field, lo, out, self.lo_cap, self.hi_cap)
        out = []
        t = field.zero()
        for k in range(hi, self.lo_cap - 1, -1):
            t = self[k] + zw * t
            out.append(t)
        out.reverse()
        return _ZSeries(field, self.lo_cap - 1, out, self.lo_cap, self.hi_cap)

    def eval(self, z0):
        field = self.field
        hi = self.lo + len(self.coeffs)
        kmin = max(self.lo, 0)
        pos = field.zero()
        if hi > kmin:
            for k in range(hi - 1, kmin - 1, -1):
                pos = pos * z0 + self[k]
            if kmin:
                pos = pos * z0**kmin
        neg = field.zero()
        if self.lo < 0:
            zinv = z0.inverse()
            for k in range(self.lo, min(0, hi)):
                neg = neg + self[k] * zinv ** (-k)
        return pos + neg

    def antiderivative_eval(self, z0, z1):
        """Termwise integral from z0 to z1 plus the Log z residue term."""
        field = self.field
        total = field.zero()
        log_coeff = field.zero()
        for k in range(self.lo, self.lo + len(self.coeffs)):
            c = self[k]
            if k == -1:
                log_coeff = c
                continue
            if c.is_zero():
                continue
            c = c.scale_rational(Fraction(1, k + 1))
            total = total + c * (z1 ** (k + 1) - z0 ** (k + 1))
        if not log_coeff.is_zero():
            total = total + log_coeff * (z1 / z0).log()
        return total


def _z_poles_of(center, m, D):
    """The two z-coordinates above x = center: roots of z^2 - 2(c-m)z + D.

    A Weierstrass center of the model (g(center) = 0) gives a double root."""
    disc = (center - m) * (center - m) - D
    if disc.is_zero():
        w = center - m
        return w, w
    root = _model_sqrt(disc)
    zp = (center - m) + root
    zm = (center - m) - root
    if zp.vpi() > zm.vpi():
        zp, zm = zm, zp
    return zp, zm


def _model_sqrt(value):
    try:
        return value.sqrt()
    except NeedsLargerField:
        raise
    except Exception as exc:  # OddValuation / NonSquareResidue
        raise NeedsLargerField(f"parameterization needs a square root missing from K: {exc}") from exc


# -- form restriction ----------------------------------------------------------


class ExpandedForm:
    """Leg-ready restriction of (A(x) + sum c/(x-beta)) dx/2y to a wide open."""

    def __init__(self, model, kind, data, orders):
        self.model = model
        self.kind = kind
        self.data = data
        self.orders = orders


def expand_form(a_poly, nus, model, endpoints, target_pi=None, order_scale=1):
    """Expand the form on the model with truncation orders fit for endpoints.

    order_scale > 1 inflates every truncation order, which the convergence
    doubling check uses to confirm the budget was already sufficient.
    """
    field = model.field
    if target_pi is None:
        target_pi = field.prec
    xs = [pt.x for pt in endpoints if not pt.is_infinite()]
    orders = _budget_orders(model, xs, target_pi)
    if order_scale != 1:
        orders = {
            k: (int(v * order_scale) if k != "guard" else v) for k, v in orders.items()
        }
    if model.kind in ("split", "deg1"):
        return _expand_rational(a_poly, nus, model, orders)
    if model.kind == "deg2":
        return _expand_deg2(a_poly, nus, model, endpoints, orders, target_pi)
    raise UnparameterizableDegree(
        f"deg g = {model.g.degree()} wide open needs an external Coleman backend"
    )


def _expand_rational(a_poly, nus, model, orders):
    """Engine A assembly, shared by split (coordinate x) and deg-1 (t)."""
    field = model.field
    const, num_ell, poles_x = model.inv_ell_fraction(orders)
    base = a_poly * num_ell if a_poly.coeffs else Poly(field, [])
    nu_polys = []
    for b, c in nus:
        nu_polys.append((Poly(field, [-b, 1]), b, c))
    for lin, _, _ in nu_polys:
        base = base * lin
    for j, (_, b, c) in enumerate(nu_polys):
        term = num_ell * c
        for k, (lin, _, _) in enumerate(nu_polys):
            if k != j:
                term = term * lin
        base = base + term
    poles = list(poles_x) + [(b, 1) for _, b, _ in nu_polys]
    if model.kind == "split":
        base = base * (const * field.from_rational(Fraction(1, 2)))
        integrand = RationalIntegrand(field, base, _merge_poles(poles))
        return ExpandedForm(model, "rational_x", integrand, orders)
    # deg 1: substitute x = t^2 + r and split every pole into +-sqrt; a pole
    # center at the branch point itself gives x - w = t^2 exactly
    sub = Poly(field, [model.r, 0, 1])
    base_t = _compose_x_poly(base, sub)
    poles_t = []
    for w, m in _merge_poles(poles):
        diff = w - model.r
        if diff.is_zero():
            poles_t.append((field.zero(), 2 * m))
            continue
        sigma = _model_sqrt(diff)
        poles_t.append((sigma, m))
        poles_t.append((-sigma, m))
    base_t = base_t * const
    integrand = RationalIntegrand(field, base_t, _merge_poles(poles_t))
    return ExpandedForm(model, "rational_t", integrand, orders)


def _merge_poles(poles):
    merged = []
    for w, m in poles:
        for i, (w2, m2) in enumerate(merged):
            if (w - w2).is_zero():
                merged[i] = (w2, m2 + m)
                break
        else:
            merged.append((w, m))
    return merged


def _expand_deg2(a_poly, nus, model, endpoints, orders, target_pi):
    field = model.field
    m, D = model.m, model.D
    z_vals = [model.local_coordinate(pt) for pt in endpoints]
    vzs = [z.vpi() for z in z_vals]
    if any(v is INFINITY for v in vzs):
        raise PoleAtEndpoint("endpoint degenerates in the annulus coordinate")
    guard = orders["guard"]
    d_plus = min(vzs)
    if d_plus <= 0:
        raise PoleAtEndpoint("endpoint outside the annulus of the wide open")

    def classify(zw):
        v = zw.vpi()
        if v is INFINITY:
            raise PoleAtEndpoint("degenerate pole location in the annulus coordinate")
        if v < min(vzs):
            return "outer"
        if v > max(vzs):
            return "inner"
        return "interior"

    const, num_ell, poles_x = model.inv_ell_fraction(orders)
    hole_z = []
    inner_decays = []
    for w, mult in poles_x:
        zp, zm = _z_poles_of(w, m, D)
        hole_z.append((zp, zm, mult))
        inner_decays.append(zm.vpi() - max(vzs))
    nu_z = []
    for b, c in nus:
        zp, zm = _z_poles_of(b, m, D)
        nu_z.append((b, c, zp, zm))
        for zw in (zp, zm):
            v = zw.vpi()
            if v > max(vzs):
                inner_decays.append(v - max(vzs))
    d_minus = min(inner_decays) if inner_decays else d_plus
    if d_minus <= 0:
        raise PoleAtEndpoint("endpoint pinched against an inner pole circle")
    window = int((target_pi + guard) // min(d_plus, d_minus)) + 2
    lo_cap, hi_cap = -window, window + 8

    def to_z(poly_x, extra_shift):
        """poly(x(z)) * z^extra_shift via x = (z^2 + 2mz + D)/(2z), exactly.

        The Horner build runs with wide caps (it is an honest polynomial of
        degree 2 deg before the shift); only the final result is clipped to
        the evaluation window.
        """
        deg = poly_x.degree()
        if deg < 0:
            return _ZSeries.zero(field, lo_cap, hi_cap)
        two = field.from_rational(2)
        half = field.from_rational(Fraction(1, 2))
        wide_lo, wide_hi = 0, 2 * deg + 2
        q_short = [(0, D), (1, m * 2), (2, field.one())]  # z^2 + 2m z + D
        acc = _ZSeries(field, 0, [poly_x.coeffs[deg]], wide_lo, wide_hi)
        for k in range(deg - 1, -1, -1):
            acc = acc.mul_short(q_short)
            acc = acc.add(_ZSeries(field, deg - k, [poly_x.coeffs[k] * two ** (deg - k)], wide_lo, wide_hi))
        shifted_lo = acc.lo + extra_shift - deg
        return _ZSeries(field, shifted_lo, [c * half**deg for c in acc.coeffs], lo_cap, hi_cap)

    logs = []

    def divide_all(series, zpoles, allow_interior):
        """Divide by prod (z - zw) for the listed poles; interior ones give
        explicit log terms via the vanishing split."""
        interior = []
        for zw, mult in zpoles:
            kind = classify(zw)
            if kind == "interior":
                if not allow_interior or mult != 1:
                    raise PoleAtEndpoint("pole circle crosses the integration annulus")
                interior.append(zw)
                continue
            for _ in range(mult):
                series = series.divide_linear(zw, kind)
        if not interior:
            return series
        if len(interior) == 1:
            zw = interior[0]
            value = series.eval(zw)
            logs.append((zw, value))
            shifted = series.add(_ZSeries(field, 0, [-value], lo_cap, hi_cap))
            return shifted.divide_linear(zw, "vanishing")
        if len(interior) == 2:
            zw1, zw2 = interior
            diff = zw1 - zw2
            if diff.is_zero():
                raise PoleAtEndpoint("coincident interior poles")
            a1 = series.eval(zw1)
            s1 = series.add(_ZSeries(field, 0, [-a1], lo_cap, hi_cap)).divide_linear(zw1, "vanishing")
            # series/(z-zw1)(z-zw2) = s1/(z-zw2) + a1/((z-zw1)(z-zw2))
            a2 = s1.eval(zw2)
            s2 = s1.add(_ZSeries(field, 0, [-a2], lo_cap, hi_cap)).divide_linear(zw2, "vanishing")
            logs.append((zw1, a1 / diff))
            logs.append((zw2, a2 - a1 / diff))
            return s2
        raise PoleAtEndpoint("too many interior poles on one leg")

    # base part: A(x) / ell
    hole_linear = []
    shift_from_holes = 0
    for zp, zm, mult in hole_z:
        hole_linear.append((zp, mult))
        hole_linear.append((zm, mult))
        shift_from_holes += mult
    total = _ZSeries.zero(field, lo_cap, hi_cap)
    if a_poly.coeffs:
        num = a_poly * num_ell
        two_pow = field.from_rational(2) ** shift_from_holes
        series = to_z(num, shift_from_holes).scale(two_pow)
        series = divide_all(series, hole_linear, allow_interior=False)
        total = total.add(series)
    for b, c, zp, zm in nu_z:
        two_pow = field.from_rational(2) ** (shift_from_holes + 1)
        series = to_z(num_ell, shift_from_holes + 1).scale(two_pow * c)
        series = divide_all(series, hole_linear + [(zp, 1), (zm, 1)], allow_interior=True)
        total = total.add(series)
    # dz/2z and the overall ell constant
    total = total.shift(-1).scale(const * field.from_rational(Fraction(1, 2)))
    scaled_logs = [(zw, c * const * field.from_rational(Fraction(1, 2))) for zw, c in logs]
    data = {"series": total, "logs": scaled_logs, "z_values": z_vals}
    return ExpandedForm(model, "laurent_z", data, orders)


# -- integration entry points ---------------------------------------------------


def integrate_parametrized(expanded, start, end):
    """Coleman integral of an expanded leg form between two curve points."""
    model = expanded.model
    if expanded.kind == "rational_t":
        t0 = model.local_coordinate(start)
        t1 = model.local_coordinate(end)
        return expanded.data.antiderivative_eval(t0, t1)
    if expanded.kind == "laurent_z":
        z0 = model.local_coordinate(start)
        z1 = model.local_coordinate(end)
        total = expanded.data["series"].antiderivative_eval(z0, z1)
        for zw, coeff in expanded.data["logs"]:
            if (z0 - zw).is_zero() or (z1 - zw).is_zero():
                raise PoleAtEndpoint("leg endpoint hits a pole of the integrand")
            total = total + coeff * ((z1 - zw) / (z0 - zw)).log()
        return total
    raise UnparameterizableDegree("use integrate_split for split components")


def integrate_split(expanded, start, end):
    """Integral on a split component, where y~ is the constant sheet sign."""
    model = expanded.model
    if expanded.kind != "rational_x":
        raise BrokenPath("integrate_split expects a split-component expansion")
    eps0 = model.sheet_sign(start)
    eps1 = model.sheet_sign(end)
    if eps0 != eps1:
        raise BrokenPath("leg endpoints lie on different split components")
    if start.is_infinite() or end.is_infinite():
        raise BrokenPath("points at infinity cannot be leg endpoints")
    value = expanded.data.antiderivative_eval(start.x, end.x)
    return value if eps0 > 0 else -value


def leg_integral(model, a_poly, nus, start, end, order_scale=1, backend=None):
    """One leg: integral of (a_poly + sum nu) dx/2y from start to end."""
    if model.kind == "big":
        return coleman_backend(model, a_poly, nus, start, end, backend)
    expanded = expand_form(a_poly, nus, model, [start, end], order_scale=order_scale)
    if model.kind == "split":
        return integrate_split(expanded, start, end)
    return integrate_parametrized(expanded, start, end)


def coleman_backend(model, a_poly, nus, start, end, backend=None):
    """Pluggable slot for good-reduction Coleman integration with deg g >= 3."""
    if backend is not None:
        return backend(model, a_poly, nus, start, end)
    raise BackendUnavailable(
        "wide open with deg g = %d needs a Frobenius-based Coleman integrator "
        "(Kedlaya/Tuitman class); none is bundled" % model.g.degree()
    )


# -- pole reduction over the model function field ------------------------------


class ReducedForm:
    """eta = dF + sum c_i x^i dx/2y~ + sum d_w dx/((x-w) 2y~) over y~^2 = g.

    F is held as a list of (poly u(x), center w, exponent m) triples meaning
    u has no role... each entry is  coeff * x^m y~      for w None, or
    coeff * y~ / (x - w)^m  otherwise.
    """

    def __init__(self, g, f_parts, c_vector, d_parts):
        self.g = g
        self.f_parts = f_parts  # list of (coeff, w_or_None, m)
        self.c_vector = c_vector
        self.d_parts = d_parts  # list of (w, coeff)

    def f_eval(self, x0, ytilde0):
        field = self.g.field
        acc = field.zero()
        for coeff, w, m in self.f_parts:
            if w is None:
                acc = acc + coeff * x0**m * ytilde0
            else:
                acc = acc + coeff * ytilde0 * (x0 - w).inverse() ** m
        return acc

    def f_differential_fraction(self):
        """d(F) as (numerator Poly, [(center, mult)]) against dx/2y~.

        d(c x^m y~) = c (x^m g' + 2m x^(m-1) g) dx/2y~ and
        d(c y~/(x-w)^m) = c ((x-w) g' - 2m g)/(x-w)^(m+1) dx/2y~.
        """
        field = self.g.field
        gprime = self.g.derivative()
        num = Poly(field, [])
        poles = []
        for coeff, w, m in self.f_parts:
            if w is None:
                part = Poly(field, [0] * m + [1]) * gprime
                if m:
                    part = part + self.g * Poly(field, [0] * (m - 1) + [2 * m])
                term_num, term_poles = part * coeff, []
            else:
                lin = Poly(field, [-w, 1])
                part = lin * gprime - self.g * (2 * m)
                term_num, term_poles = part * coeff, [(w, m + 1)]
            num, poles = _add_fractions(num, poles, term_num, term_poles)
        return num, poles


def _add_fractions(num1, poles1, num2, poles2):
    """Sum of two fractions with factored denominators, centers kept distinct."""
    field = num1.field
    merged = list(poles1)
    for w, m in poles2:
        for i, (w1, m1) in enumerate(merged):
            if (w - w1).is_zero():
                merged[i] = (w1, max(m1, m))
                break
        else:
            merged.append((w, m))

    def lift(num, poles):
        out = num
        for w, m in merged:
            have = 0
            for w1, m1 in poles:
                if (w - w1).is_zero():
                    have = m1
                    break
            out = out * Poly(field, [-w, 1]) ** (m - have)
        return out

    return lift(num1, poles1) + lift(num2, poles2), merged


def pole_reduce(numerator, poles, g):
    """Rewrite num(x)/prod (x-w)^m dx/2y~ as dF + basis + simple-pole parts.

    Exact symbolic reduction over the function field of y~^2 = g(x): exact
    forms d(y~/(x-w)^m) clear non-simple poles at non-Weierstrass points and
    every pole at Weierstrass points, then d(x^m y~) lowers the polynomial
    degree to deg g - 2.  Always terminates; each step strictly reduces a
    pole order or the degree.
    """
    field = g.field
    gprime = g.derivative()
    f_parts = []
    d_parts = []
    poly_acc = Poly(field, [])
    for idx, (w, mult) in enumerate(poles):
        # principal part of the input at w
        frac = RationalIntegrand(field, numerator, poles)
        pp = frac._principal_part(numerator % _full_denominator(field, poles), idx)
        gw = g(w)
        weier = gw.is_zero()
        coeffs = {k: pp.get(k, field.zero()) for k in range(1, mult + 1)}
        if weier:
            u_poly = g // Poly(field, [-w, 1])
            top = mult
            while top >= 1:
                a = coeffs.get(top, field.zero())
                if a.is_zero():
                    top -= 1
                    continue
                # mu_{w,m} = d(y~/(x-w)^m) has A-part (g' - 2 m u)/(x-w)^m
                mu_num = gprime - u_poly * (2 * top)
                lead = mu_num(w)
                scale = a / lead
                f_parts.append((scale, w, top))
                mu_pp = _taylor_mod(mu_num, w, top)
                for j in range(top):
                    k = top - j
                    coeffs[k] = coeffs.get(k, field.zero()) - scale * mu_pp[j]
                poly_parts = _poly_beyond(mu_num, w, top, field)
                poly_acc = poly_acc - poly_parts * scale
                top = mult
                while top >= 1 and coeffs.get(top, field.zero()).is_zero():
                    top -= 1
            assert all(c.is_zero() for c in coeffs.values())
        else:
            for k in range(mult, 1, -1):
                a = coeffs.get(k, field.zero())
                if a.is_zero():
                    continue
                m = k - 1
                # mu_{w,m} A-part: ((x-w) g' - 2m g)/(x-w)^(m+1)
                mu_num = Poly(field, [-w, 1]) * gprime - g * (2 * m)
                lead = mu_num(w)  # = -2m g(w)
                scale = a / lead
                f_parts.append((scale, w, m))
                mu_pp = _taylor_mod(mu_num, w, k)
                for j in range(k):
                    kk = k - j
                    coeffs[kk] = coeffs.get(kk, field.zero()) - scale * mu_pp[j]
                poly_acc = poly_acc - _poly_beyond(mu_num, w, k, field) * scale
            rest = coeffs.get(1, field.zero())
            if not rest.is_zero():
                d_parts.append((w, rest))
    # polynomial part of the input
    quot = numerator // _full_denominator(field, poles)
    poly_acc = poly_acc + quot
    dtilde = g.degree()
    while poly_acc.degree() > dtilde - 2:
        mdeg = poly_acc.degree()
        m = mdeg - dtilde + 1
        # mu_{inf,m} = d(x^m y~) has A-part x^m g' + 2m x^(m-1) g, degree m+dtilde-1
        mu = Poly(field, [0] * m + [1]) * gprime + g * Poly(field, [0] * (m - 1) + [2 * m])
        lead = mu.leading()
        scale = poly_acc.leading() / lead
        f_parts.append((scale, None, m))
        poly_acc = poly_acc - mu * scale
        if poly_acc.degree() == mdeg:
            raise AssertionError("infinity reduction failed to lower the degree")
    c_vector = [poly_acc[i] for i in range(max(0, dtilde - 1))]
    return ReducedForm(g, f_parts, c_vector, d_parts)


def _full_denominator(field, poles):
    out = Poly(field, [1])
    for w, m in poles:
        out = out * Poly(field, [-w, 1]) ** m
    return out


def _poly_beyond(mu_num, w, order, field):
    """The polynomial part of mu_num/(x-w)^order (Taylor tail above the pole)."""
    shifted = mu_num.shift_rescale(w, 1)
    tail = Poly(field, shifted.coeffs[order:])
    return tail.shift_rescale(-w, 1)
