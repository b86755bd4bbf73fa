"""Curve model, points, and the meromorphic-form data model."""

import random
from fractions import Fraction

import pytest

from volint.curve import (
    CurvePoint,
    HyperellipticCurve,
    MeromorphicForm,
    decompose_third_kind,
    height_integrand,
    involution,
)
from volint.errors import EqualPoints, NotElliptic, SchemaError, TwoTorsionPoint
from volint.padic import FieldSpec
from volint.polyring import LaurentSeries, Poly


@pytest.fixture(scope="module")
def Q5():
    return FieldSpec(5, prec=30)


@pytest.fixture(scope="module")
def banana(Q5):
    f = Poly.from_rationals(Q5, [-1, -1, 1]) * Poly.from_rationals(Q5, [-5, 5, -6, 1, 1])
    return HyperellipticCurve(Q5, f)


@pytest.fixture(scope="module")
def Q43():
    return FieldSpec(43, prec=14)


@pytest.fixture(scope="module")
def elliptic(Q43):
    return HyperellipticCurve(Q43, [555015942, -1351755, 0, 1])


def test_curve_validation(Q5):
    with pytest.raises(SchemaError):
        HyperellipticCurve(Q5, [1, 2, 1])  # degree 2
    with pytest.raises(SchemaError):
        HyperellipticCurve(Q5, [0, 0, 0, 1])  # x^3, not squarefree
    with pytest.raises(SchemaError):
        HyperellipticCurve(Q5, [Fraction(1, 5), 0, 0, 1])  # not integral


def test_points_and_involution(banana):
    R = banana.point(1, 2)
    S = involution(R)
    assert (S.y + 2).is_zero()
    assert involution(S).same_point(R)
    inf_plus = CurvePoint(banana, at_infinity="inf+")
    assert involution(inf_plus).at_infinity == "inf-"


def test_involution_fixes_weierstrass(elliptic):
    W = elliptic.point(507, 0)
    assert involution(W).same_point(W)
    inf = CurvePoint(elliptic, at_infinity="inf")
    assert involution(inf).same_point(inf)


def test_point_above_snaps_to_hint(banana):
    field = banana.field
    pt = banana.point_above(1, -2)
    assert (pt.y + 2).is_zero()
    pt2 = banana.point_above(1, 2)
    assert (pt2.y - 2).is_zero()


def _residue_oracle(form, P, order=12):
    """Residue of a MeromorphicForm at a finite non-Weierstrass point, by
    honest local expansion in u = x - x(P) at truncated order."""
    curve = form.curve
    field = curve.field
    flat = form.flattened()
    x0, y0 = P.x, P.y
    fser_coeffs = []
    shifted = curve.f.shift_rescale(x0, 1)
    fser = LaurentSeries(field, list(shifted.coeffs), 0, order=order, tag="u")

    def inv(s):
        out = LaurentSeries(field, [s[0].inverse()], 0, order=s.order, tag=s.tag)
        for _ in range(6):
            out = (out * (2 - s * out)).truncate(s.order)
        return out

    # y(u) with y(0) = y0: Newton for the square root branch
    yser = LaurentSeries(field, [y0], 0, order=order, tag="u")
    half = field.from_rational(Fraction(1, 2))
    for _ in range(6):
        yser = ((yser + fser * inv(yser)) * half).truncate(order)
    # A(x) dx/2y part
    total = field.zero()
    a_poly = flat.poly_part()
    a_shift = a_poly.shift_rescale(x0, 1) if a_poly.coeffs else Poly(field, [])
    a_ser = LaurentSeries(field, list(a_shift.coeffs) if a_shift.coeffs else [], 0, order=order, tag="u")
    num = a_ser
    for beta, coeff in flat.nus:
        diff = x0 - beta
        if diff.is_zero():
            # simple pole here: contributes coeff/(2 y0) directly
            total = total + coeff / (y0 * 2)
            continue
        lin = LaurentSeries(field, [diff, 1], 0, order=order, tag="u")
        num = num + inv(lin) * coeff
    integrand = (num * inv(yser)) * half  # coefficient of u^-1 is 0 here; regular part only
    # regular part has no residue; poles were handled termwise above
    for F, coeff in flat.logs:
        # residue of c dF/F at P is c * ord_P(F)
        u_shift = F.u.shift_rescale(x0, 1) if F.u.coeffs else Poly(field, [])
        v_shift = F.v.shift_rescale(x0, 1) if F.v.coeffs else Poly(field, [])
        fser_local = LaurentSeries(field, list(u_shift.coeffs) or [], 0, order=order, tag="u") + (
            LaurentSeries(field, list(v_shift.coeffs) or [], 0, order=order, tag="u") * yser
        )
        ordv = 0
        for n in range(order):
            if fser_local[n].is_zero():
                ordv += 1
            else:
                break
        total = total + coeff * ordv
    return total


def test_third_kind_residues_both_finite(banana):
    rng = random.Random(4)
    pts = []
    for x0 in (1, 2, -1, 6):
        try:
            pts.append(banana.point_above(x0, rng.randrange(-5, 5)))
        except Exception:
            pass
    P, Q = pts[0], pts[1]
    form = decompose_third_kind(P, Q, banana)
    assert (_residue_oracle(form, P) - 1).is_zero()
    assert (_residue_oracle(form, Q) + 1).is_zero()
    # a point that is neither pole sees residue 0
    other = pts[2]
    assert _residue_oracle(form, other).is_zero()


def test_third_kind_even_degree_infinity_cases(banana):
    inf_plus = CurvePoint(banana, at_infinity="inf+")
    inf_minus = CurvePoint(banana, at_infinity="inf-")
    g = banana.genus
    form = decompose_third_kind(inf_minus, inf_plus, banana)
    assert (form.basis[g] - 2).is_zero()
    assert not form.nus and not form.logs
    P = banana.point_above(1, 2)
    form2 = decompose_third_kind(P, inf_plus, banana)
    assert (form2.basis[g] - 1).is_zero()
    form3 = decompose_third_kind(P, inf_minus, banana)
    assert (form3.basis[g] + 1).is_zero()
    assert (_residue_oracle(form2, P) - 1).is_zero()


def test_third_kind_weierstrass_drops_y_part(elliptic):
    W1 = elliptic.point(507, 0)
    inf = CurvePoint(elliptic, at_infinity="inf")
    form = decompose_third_kind(W1, inf, elliptic)
    assert not form.nus  # y(P) = 0 kills the nu piece
    assert len(form.logs) == 1  # (1/2) dlog(x - 507) carries the residue


def test_third_kind_rejects_equal_points(banana):
    P = banana.point_above(1, 2)
    with pytest.raises(EqualPoints):
        decompose_third_kind(P, P, banana)


def test_height_integrand(elliptic):
    P = elliptic.point_above(-501, 33264)
    form = height_integrand(P, elliptic)
    assert len(form.nus) == 1
    beta, coeff = form.nus[0]
    assert (beta - P.x).is_zero() and (coeff - P.y * 2).is_zero()
    assert (_residue_oracle(form, P) - 1).is_zero()
    assert (_residue_oracle(form, P.involution()) + 1).is_zero()
    with pytest.raises(TwoTorsionPoint):
        height_integrand(elliptic.point(507, 0), elliptic)


def test_height_integrand_needs_elliptic(banana):
    with pytest.raises(NotElliptic):
        height_integrand(banana.point_above(1, 2), banana)


def test_spanning_set_round_trip(banana):
    # c x^i dx/2y stays put through the data model and flattening
    field = banana.field
    coeffs = [field.from_rational(c) for c in (3, 0, 7, 1)]
    form = MeromorphicForm(banana, basis=coeffs)
    flat = form.flattened()
    assert all((a - b).is_zero() for a, b in zip(flat.basis, coeffs))
    assert not flat.nus and not flat.logs and not flat.third_kind


def test_form_linearity(banana):
    f1 = MeromorphicForm(banana, basis=[1, 2])
    f2 = MeromorphicForm(banana, basis=[0, 1], nus=[(7, 3)])
    s = f1 + f2.scale(2)
    assert (s.basis[1] - 4).is_zero()
    assert (s.nus[0][1] - 6).is_zero()


def test_nu_rejects_roots_of_f(elliptic):
    with pytest.raises(SchemaError):
        MeromorphicForm(elliptic, nus=[(507, 1)])  # f(507) = 0
