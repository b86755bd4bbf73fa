"""Polynomials, Laurent series and Hensel factorization over a p-adic field K.

Polynomials are dense coefficient lists (degree-indexed).  Laurent series
carry a lowest exponent and a pessimistic truncation order: coefficients at
or beyond the truncation order are unknown, not zero, and every operation
propagates that bound.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import BadConstantTerm, NotCoprimeModP, SchemaError
from .padic import INFINITY, PadicElement, newton_polygon_slopes
from ._residue import RPoly


class Poly:
    """Dense polynomial over a FieldSpec."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        cs = []
        for c in coeffs:
            if isinstance(c, PadicElement):
                cs.append(c)
            else:
                cs.append(field.from_rational(c))
        while cs and cs[-1]._vpi_raw() is INFINITY:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def from_rationals(cls, field, coeffs):
        return cls(field, [field.from_rational(c) for c in coeffs])

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def copy(self):
        return Poly(self.field, list(self.coeffs))

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero()

    def leading(self):
        if not self.coeffs:
            return self.field.zero()
        return self.coeffs[-1]

    def is_monic(self):
        return bool(self.coeffs) and (self.leading() - 1).is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            self.field,
            [self[i] + other[i] for i in range(n)],
        )

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly(self.field, [other])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicElement)):
            c = other if isinstance(other, PadicElement) else self.field.from_rational(other)
            return Poly(self.field, [x * c for x in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly(self.field, [])
        out = [self.field.zero() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = Poly(self.field, [1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return Poly(self.field, [c * i for i, c in enumerate(self.coeffs) if i >= 1])

    def divmod(self, other):
        """Division with remainder; the divisor needs a unit leading coefficient."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead = other.leading()
        linv = lead.inverse()
        d = other.degree()
        rem = list(self.coeffs)
        if len(rem) < d + 1:
            return Poly(self.field, []), self.copy()
        q = [self.field.zero()] * (len(rem) - d)
        for i in range(len(rem) - 1 - d, -1, -1):
            c = rem[i + d] * linv
            q[i] = c
            if not c.is_zero():
                for j, oc in enumerate(other.coeffs):
                    rem[i + j] = rem[i + j] - c * oc
        return Poly(self.field, q), Poly(self.field, rem[:d])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def shift_rescale(self, c, scale=1):
        """F(c + scale * x), computed by exact Horner composition."""
        field = self.field
        lin = Poly(field, [c, scale])
        acc = Poly(field, [])
        for coeff in reversed(self.coeffs):
            acc = acc * lin + Poly(field, [coeff])
        return acc

    def reverse(self, degree=None):
        d = self.degree() if degree is None else degree
        return Poly(self.field, [self[d - i] for i in range(d + 1)])

    def newton_slopes(self):
        """Lower-hull (slope, length) pairs of the coefficient valuations (p-units)."""
        vals = [c.valuation() for c in self.coeffs]
        return newton_polygon_slopes(vals)

    def residue_poly(self):
        """Reduction mod pi as an RPoly over the residue field (integral input)."""
        rf = self.field.residue_field
        if rf is None:
            raise SchemaError("no residue machinery for mixed-ramification K")
        cs = []
        for c in self.coeffs:
            v = c.vpi()
            if v is not INFINITY and v < 0:
                raise SchemaError("residue reduction of a non-integral polynomial")
            if v == 0:
                r = c.residue()
                cs.append(rf.element([r]) if not isinstance(r, tuple) else r)
            else:
                cs.append(rf.zero())
        return RPoly(rf, cs)

    def min_prec(self):
        return min((c.prec for c in self.coeffs), default=self.field.prec)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = [f"({c.expansion_str()})*x^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(terms) if terms else "Poly(0)"


def shift_rescale(F, c, scale):
    return F.shift_rescale(c, scale)


# -- Hensel factorization ---------------------------------------------------


def _lift_rpoly(field, rp):
    """Lift a residue polynomial to an integral Poly with small coefficients."""
    coeffs = []
    for c in rp.coeffs:
        if field.f == 1:
            coeffs.append(field.from_rational(c[0]))
        else:
            coeffs.append(field.from_coeffs(list(c)))
    return Poly(field, coeffs)


def _hensel_pair(F, gbar, hbar, steps):
    """Lift the coprime residue factorization Fbar = gbar*hbar to F = G*H mod pi^steps."""
    field = F.field
    sbar, tbar, gcd = gbar.bezout(hbar)
    if gcd.degree() != 0:
        raise NotCoprimeModP("residue factors are not coprime mod pi")
    G = _lift_rpoly(field, gbar)
    H = _lift_rpoly(field, hbar)
    pi = field.uniformizer()
    pik = field.one()
    for _ in range(steps):
        E = F - G * H
        if E.is_zero():
            break
        # divide the defect by the current modulus and solve in the residue field
        Ebar_poly = Poly(field, [c / pik for c in E.coeffs])
        ebar = Ebar_poly.residue_poly()
        if ebar.is_zero():
            pik = pik * pi
            continue
        dg = tbar.mul(ebar).mod(gbar)
        num = ebar.sub(dg.mul(hbar))
        dh, rem = num.divmod(gbar)
        assert rem.is_zero()
        G = G + _lift_rpoly(field, dg) * pik
        H = H + _lift_rpoly(field, dh) * pik
        pik = pik * pi
    return G, H


def hensel_split(F, residue_factorization):
    """Split a monic integral F along a coprime factorization of F mod pi.

    residue_factorization entries are either (center, multiplicity) pairs,
    meaning the factor (x - center)^multiplicity mod pi, or explicit residue
    polynomials given as int coefficient lists.  The entries must be pairwise
    coprime mod pi and multiply to F mod pi.  Returns monic lifts F_1,...,F_r
    with F = prod F_j to working precision and F_j congruent to its residue
    datum mod pi.
    """
    field = F.field
    if not F.is_monic():
        raise SchemaError("hensel_split needs a monic polynomial")
    rf = field.residue_field
    if rf is None:
        raise SchemaError("hensel_split needs residue machinery (no mixed-ramification K)")
    rpolys = []
    for entry in residue_factorization:
        if isinstance(entry, RPoly):
            rpolys.append(entry.monic())
            continue
        if isinstance(entry, (list,)):
            rpolys.append(RPoly.from_ints(rf, entry).monic())
            continue
        center, mult = entry
        if isinstance(center, PadicElement):
            r = center.residue()
            cbar = rf.element([r]) if not isinstance(r, tuple) else r
        else:
            cbar = rf.element([int(center)])
        lin = RPoly(rf, [rf.neg(cbar), rf.one()])
        acc = RPoly(rf, [rf.one()])
        for _ in range(mult):
            acc = acc.mul(lin)
        rpolys.append(acc)
    prod = RPoly(rf, [rf.one()])
    for rp in rpolys:
        prod = prod.mul(rp)
    Fbar = F.residue_poly()
    if not prod.sub(Fbar).is_zero():
        raise NotCoprimeModP("residue factorization does not multiply to F mod pi")
    for i in range(len(rpolys)):
        for j in range(i + 1, len(rpolys)):
            if rpolys[i].gcd(rpolys[j]).degree() != 0:
                raise NotCoprimeModP("residue factors share a common factor mod pi")
    steps = field.e * (field.rep_digits - 3)
    factors = []
    remaining = F
    for rp in rpolys[:-1]:
        cobar = remaining.residue_poly().divmod(rp)[0]
        G, H = _hensel_pair(remaining, rp, cobar, steps)
        factors.append(G)
        remaining = H
    factors.append(remaining)
    check = Poly(field, [1])
    for g in factors:
        check = check * g
    if not (check - F).is_zero():
        raise NotCoprimeModP("hensel lift failed to reproduce F at working precision")
    return factors


# -- Laurent series ---------------------------------------------------------


class LaurentSeries:
    """Truncated Laurent series sum c_i z^i for offset <= i < order.

    Exponents at or beyond `order` are unknown.  `tag` names the local
    coordinate for error messages and log bookkeeping.
    """

    __slots__ = ("field", "tag", "offset", "coeffs", "order")

    def __init__(self, field, coeffs, offset=0, order=None, tag="z"):
        self.field = field
        self.tag = tag
        cs = [c if isinstance(c, PadicElement) else field.from_rational(c) for c in coeffs]
        if order is None:
            order = offset + len(cs)
        # normalize: exact window [offset, order)
        if offset + len(cs) < order:
            cs = cs + [field.zero() for _ in range(order - offset - len(cs))]
        elif offset + len(cs) > order:
            cs = cs[: order - offset]
        while cs and cs[0]._vpi_raw() is INFINITY and offset < 0:
            cs.pop(0)
            offset += 1
        self.coeffs = cs
        self.offset = offset
        self.order = order

    @classmethod
    def one(cls, field, order, tag="z"):
        return cls(field, [1], 0, order=order, tag=tag)

    def __getitem__(self, i):
        if self.offset <= i < self.offset + len(self.coeffs):
            return self.coeffs[i - self.offset]
        return self.field.zero()

    def __add__(self, other):
        if isinstance(other, (int, Fraction, PadicElement)):
            other = LaurentSeries(self.field, [other], 0, order=self.order, tag=self.tag)
        order = min(self.order, other.order)
        offset = min(self.offset, other.offset)
        return LaurentSeries(
            self.field,
            [self[i] + other[i] for i in range(offset, order)],
            offset,
            order=order,
            tag=self.tag,
        )

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.field, [-c for c in self.coeffs], self.offset, self.order, self.tag)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, PadicElement)):
            other = LaurentSeries(self.field, [other], 0, order=self.order, tag=self.tag)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicElement)):
            c = other if isinstance(other, PadicElement) else self.field.from_rational(other)
            return LaurentSeries(self.field, [x * c for x in self.coeffs], self.offset, self.order, self.tag)
        order = min(self.order + other.offset, other.order + self.offset)
        offset = self.offset + other.offset
        n = order - offset
        if n <= 0:
            return LaurentSeries(self.field, [], offset, order=order, tag=self.tag)
        out = [self.field.zero() for _ in range(n)]
        for i, x in enumerate(self.coeffs):
            if x._vpi_raw() is INFINITY:
                continue
            for j, y in enumerate(other.coeffs):
                k = i + j
                if k < n:
                    out[k] = out[k] + x * y
        return LaurentSeries(self.field, out, offset, order=order, tag=self.tag)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = LaurentSeries(self.field, [1], 0, order=self.order - self.offset, tag=self.tag)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k):
        """Multiply by z^k."""
        return LaurentSeries(self.field, list(self.coeffs), self.offset + k, self.order + k, self.tag)

    def truncate(self, order):
        return LaurentSeries(self.field, self.coeffs[: max(0, order - self.offset)], self.offset, min(self.order, order), self.tag)

    def derivative(self):
        out = {}
        for i, c in zip(range(self.offset, self.offset + len(self.coeffs)), self.coeffs):
            if i != 0:
                out[i - 1] = c * i
        if not out:
            return LaurentSeries(self.field, [], 0, order=self.order - 1, tag=self.tag)
        lo, hi = min(out), self.order - 1
        return LaurentSeries(self.field, [out.get(i, self.field.zero()) for i in range(lo, hi)], lo, order=hi, tag=self.tag)

    def eval(self, x):
        """Horner evaluation; caller is responsible for convergence."""
        field = self.field
        acc = field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if self.offset:
            acc = acc * x**self.offset
        return acc

    def __repr__(self):
        terms = [
            f"({c.expansion_str()})*{self.tag}^{i}"
            for i, c in zip(range(self.offset, self.offset + len(self.coeffs)), self.coeffs)
            if not c.is_zero()
        ]
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O({self.tag}^{self.order})"


def inv_sqrt_series(u):
    """s with s^2 * u = 1 + O(z^order), for u with constant term 1.

    Newton iteration s <- s (3 - u s^2) / 2, so no coefficient of u is ever
    divided by anything but 2.
    """
    field = u.field
    if u.offset > 0 or not (u[0] - 1).is_zero():
        raise BadConstantTerm("inverse square root needs constant term 1")
    if u.offset < 0:
        raise BadConstantTerm("inverse square root of a series with poles")
    half = field.from_rational(Fraction(1, 2))
    s = LaurentSeries(field, [1], 0, order=1, tag=u.tag)
    prec = 1
    while prec < u.order:
        prec = min(2 * prec, u.order)
        s = LaurentSeries(field, s.coeffs, 0, order=prec, tag=u.tag)
        correction = 3 - (u.truncate(prec) * s * s)
        s = s * correction * half
        s = s.truncate(prec)
    return s


def antiderivative(term):
    """Termwise antiderivative of a Laurent series.

    z^n maps to z^(n+1)/(n+1) for n != -1; the exponent -1 coefficient is
    returned separately keyed by the series tag, to be fed to the branch log
    by the caller.  Precision of the n-th output coefficient honestly drops
    by the valuation of n+1.
    """
    field = term.field
    out = {}
    log_coeffs = {}
    for i, c in zip(range(term.offset, term.offset + len(term.coeffs)), term.coeffs):
        if i == -1:
            if not c.is_zero():
                log_coeffs[term.tag] = c
            continue
        out[i + 1] = c.scale_rational(Fraction(1, i + 1))
    order = term.order + 1
    if not out:
        return LaurentSeries(field, [], 0, order=order, tag=term.tag), log_coeffs
    lo = min(out)
    series = LaurentSeries(
        field,
        [out.get(i, field.zero()) for i in range(lo, order)],
        lo,
        order=order,
        tag=term.tag,
    )
    return series, log_coeffs
