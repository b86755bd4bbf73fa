"""Hyperelliptic curve model y^2 = f(x), its points, and meromorphic 1-forms.

Forms are held structurally: a coefficient vector against the spanning set
omega_i = x^i dx/2y (i = 0..d-2), simple-pole forms nu_beta = dx/((x-beta) 2y)
with f(beta) != 0, third-kind divisor data, exact parts dF, and logarithmic
parts c * dF/F.  Third-kind entries are rewritten against this basis before
any integration happens.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import EqualPoints, NotElliptic, SchemaError, TwoTorsionPoint
from .padic import INFINITY, PadicElement
from .polyring import Poly


class HyperellipticCurve:
    """y^2 = f(x) with f monic, integral, squarefree, deg f >= 3."""

    def __init__(self, field, f):
        self.field = field
        if not isinstance(f, Poly):
            f = Poly(field, f)
        if not f.is_monic():
            raise SchemaError("f must be monic")
        if f.degree() < 3:
            raise SchemaError("deg f >= 3 required")
        for c in f.coeffs:
            v = c.valuation()
            if v is not INFINITY and v < 0:
                raise SchemaError("f must have integral coefficients")
        self.f = f
        self.d = f.degree()
        self.genus = (self.d - 1) // 2
        self.odd_degree = self.d % 2 == 1
        if _discriminant_is_zero(f):
            raise SchemaError("f must be squarefree at working precision")

    def point(self, x, y=None, at_infinity=None):
        return CurvePoint(self, x=x, y=y, at_infinity=at_infinity)

    def point_above(self, x, y_hint=None):
        """The point (x, sqrt(f(x))), the branch picked to match y_hint.

        y_hint may be a PadicElement known to a few digits only; the root
        agreeing with it to the deepest valuation wins.  Without a hint the
        canonical square root is used.
        """
        x = x if isinstance(x, PadicElement) else self.field.from_rational(x)
        y = self.f(x).sqrt()
        if y_hint is not None:
            hint = y_hint if isinstance(y_hint, PadicElement) else self.field.from_rational(y_hint)
            d_plus = (y - hint)._vpi_raw()
            d_minus = (-y - hint)._vpi_raw()
            if d_minus > d_plus:
                y = -y
        return CurvePoint(self, x=x, y=y)

    def __repr__(self):
        return f"y^2 = f(x), deg f = {self.d}, genus {self.genus} over {self.field!r}"


def _discriminant_is_zero(f):
    """Squarefreeness via the Euclidean remainder sequence of (f, f')."""
    a, b = f, f.derivative()
    while not b.is_zero():
        lead_v = b.leading().vpi()
        if lead_v is INFINITY:
            return True
        a, b = b, a % b
    return a.degree() > 0


class CurvePoint:
    """Affine point (x, y) or a point at infinity.

    For odd degree there is a single point 'inf'; for even degree the two
    points 'inf+' and 'inf-' are told apart by the sign of y / x^(d/2).
    """

    __slots__ = ("curve", "x", "y", "at_infinity")

    def __init__(self, curve, x=None, y=None, at_infinity=None):
        self.curve = curve
        if at_infinity is not None:
            if curve.odd_degree and at_infinity != "inf":
                raise SchemaError("odd-degree curves have a single point at infinity")
            if not curve.odd_degree and at_infinity not in ("inf+", "inf-"):
                raise SchemaError("even-degree curves have points inf+ and inf-")
            self.at_infinity = at_infinity
            self.x = self.y = None
            return
        self.at_infinity = None
        field = curve.field
        self.x = x if isinstance(x, PadicElement) else field.from_rational(x)
        self.y = y if isinstance(y, PadicElement) else field.from_rational(y)
        residual = self.y * self.y - curve.f(self.x)
        if not residual.is_zero():
            raise SchemaError("point does not satisfy y^2 = f(x) at working precision")

    def is_infinite(self):
        return self.at_infinity is not None

    def is_weierstrass(self):
        if self.is_infinite():
            return self.at_infinity == "inf"
        return self.y.is_zero()

    def involution(self):
        if self.is_infinite():
            if self.at_infinity == "inf":
                return self
            flipped = "inf-" if self.at_infinity == "inf+" else "inf+"
            return CurvePoint(self.curve, at_infinity=flipped)
        return CurvePoint(self.curve, x=self.x, y=-self.y)

    def same_point(self, other):
        if self.is_infinite() or other.is_infinite():
            return self.at_infinity == other.at_infinity
        return (self.x - other.x).is_zero() and (self.y - other.y).is_zero()

    def __repr__(self):
        if self.is_infinite():
            return self.at_infinity
        return f"({self.x.expansion_str()}, {self.y.expansion_str()})"


def involution(pt):
    """The hyperelliptic involution (x, y) -> (x, -y)."""
    return pt.involution()


class FunctionXY:
    """u(x) + v(x) * y, enough structure for exact and logarithmic parts."""

    __slots__ = ("u", "v")

    def __init__(self, u, v=None):
        self.u = u
        self.v = v if v is not None else Poly(u.field, [])

    def eval(self, pt):
        if pt.is_infinite():
            raise SchemaError("exact/logarithmic parts need finite evaluation points")
        return self.u(pt.x) + self.v(pt.x) * pt.y

    def differential_numerator(self, curve):
        """A(x) with d(u + v y) = A(x) dx/2y + u'(x) dx (the x-only part aside)."""
        f = curve.f
        return f * self.v.derivative() * 2 + self.v * f.derivative()


class MeromorphicForm:
    """Structured meromorphic 1-form on a hyperelliptic curve.

    basis[i] multiplies omega_i = x^i dx/2y; nus are (beta, coeff) pairs for
    nu_beta; third_kind entries (P, Q, coeff) mean coeff times a third-kind
    form with residual divisor (P) - (Q); exact entries F mean dF; logs
    entries (F, c) mean c * dF/F.
    """

    __slots__ = ("curve", "basis", "nus", "third_kind", "exact", "logs")

    def __init__(self, curve, basis=(), nus=(), third_kind=(), exact=(), logs=()):
        self.curve = curve
        field = curve.field
        self.basis = [
            c if isinstance(c, PadicElement) else field.from_rational(c) for c in basis
        ]
        if len(self.basis) > curve.d - 1:
            raise SchemaError("basis coefficients run from omega_0 to omega_(d-2)")
        checked = []
        for beta, coeff in nus:
            beta = beta if isinstance(beta, PadicElement) else field.from_rational(beta)
            coeff = coeff if isinstance(coeff, PadicElement) else field.from_rational(coeff)
            if curve.f(beta).is_zero():
                raise SchemaError("nu_beta needs a non-root beta of f")
            checked.append((beta, coeff))
        self.nus = checked
        for P, Q, _ in third_kind:
            if P.same_point(Q):
                raise EqualPoints("third-kind entries need P != Q")
        self.third_kind = list(third_kind)
        self.exact = list(exact)
        self.logs = list(logs)

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        if self.curve is not other.curve:
            raise SchemaError("forms on different curves")
        n = max(len(self.basis), len(other.basis))
        zero = self.curve.field.zero()
        basis = [
            (self.basis[i] if i < len(self.basis) else zero)
            + (other.basis[i] if i < len(other.basis) else zero)
            for i in range(n)
        ]
        return MeromorphicForm(
            self.curve,
            basis,
            self.nus + other.nus,
            self.third_kind + other.third_kind,
            self.exact + other.exact,
            self.logs + other.logs,
        )

    def scale(self, c):
        field = self.curve.field
        c = c if isinstance(c, PadicElement) else field.from_rational(c)
        return MeromorphicForm(
            self.curve,
            [b * c for b in self.basis],
            [(beta, k * c) for beta, k in self.nus],
            [(P, Q, k * c) for P, Q, k in self.third_kind],
            [FunctionXY(F.u * c, F.v * c) for F in self.exact],
            [(F, k * c) for F, k in self.logs],
        )

    def flattened(self):
        """The same form with third-kind entries decomposed against the basis."""
        out = MeromorphicForm(self.curve, self.basis, self.nus, (), self.exact, self.logs)
        for P, Q, coeff in self.third_kind:
            out = out + decompose_third_kind(P, Q, self.curve).scale(coeff)
        return out

    def poly_part(self):
        """The polynomial A(x) with the basis part equal to A(x) dx/2y."""
        return Poly(self.curve.field, list(self.basis))


def _single_pole_piece(P, curve):
    """(y + y(P))/(x - x(P)) dx/2y as (nus, logs) data; P finite."""
    nus = []
    logs = []
    field = curve.field
    lin = Poly(field, [-P.x, 1])
    # y/(x - xP) dx/2y = (1/2) dlog(x - xP)
    logs.append((FunctionXY(lin), field.from_rational(Fraction(1, 2))))
    if not P.y.is_zero():
        nus.append((P.x, P.y))
    return nus, logs


def decompose_third_kind(P, Q, curve):
    """A third-kind representative with residual divisor (P) - (Q).

    Follows the five-case description: both finite gives the difference of
    two single-pole pieces; an infinite endpoint on odd-degree curves drops
    its piece; on even-degree curves the points at infinity contribute
    +-omega_g, with 2 omega_g for (inf-) - (inf+).
    """
    if P.same_point(Q):
        raise EqualPoints("residual divisor (P) - (Q) needs P != Q")
    field = curve.field
    g = curve.genus
    basis = [field.zero()] * (curve.d - 1)
    nus = []
    logs = []

    def add_piece(point, sign):
        piece_nus, piece_logs = _single_pole_piece(point, curve)
        for beta, c in piece_nus:
            nus.append((beta, c * sign))
        for F, c in piece_logs:
            logs.append((F, c * sign))

    if not P.is_infinite() and not Q.is_infinite():
        add_piece(P, field.one())
        add_piece(Q, -field.one())
    elif curve.odd_degree:
        if not P.is_infinite():
            add_piece(P, field.one())
        elif not Q.is_infinite():
            add_piece(Q, -field.one())
        else:
            raise EqualPoints("both endpoints at infinity on an odd-degree curve")
    else:
        # even degree
        if P.is_infinite() and Q.is_infinite():
            if P.at_infinity == "inf-" and Q.at_infinity == "inf+":
                basis[g] = field.from_rational(2)
            else:
                basis[g] = field.from_rational(-2)
        elif P.is_infinite():
            # (P) - (Q) = -[(Q) - (P)]
            inner = decompose_third_kind(Q, P, curve)
            return inner.scale(-1)
        else:
            add_piece(P, field.one())
            sign = 1 if Q.at_infinity == "inf+" else -1
            basis[g] = field.from_rational(sign)
    return MeromorphicForm(curve, basis, nus, (), (), logs)


def height_integrand(P, curve):
    """The pole part y(P)/(x - x(P)) dx/y of the height form on an elliptic curve.

    The holomorphic correction proportional to omega_0 is applied by the
    orchestrator, which owns the needed Vologodsky integral.
    """
    if curve.d != 3:
        raise NotElliptic("height integrand implemented for elliptic curves (deg f = 3)")
    if P.is_infinite():
        raise TwoTorsionPoint("P must be finite and non-2-torsion")
    if P.y.is_zero():
        raise TwoTorsionPoint("P is 2-torsion: y(P) = 0")
    # y(P)/(x - xP) dx/y = 2 y(P) nu_{x(P)}
    return MeromorphicForm(curve, (), [(P.x, P.y * 2)])
