"""Exact capped-precision arithmetic in Q_p and finite extensions K = Q_p[t]/(m(t)).

Elements are stored as integer coefficient vectors modulo (m(t), p^M) together
with a power-of-p denominator and an absolute precision measured in units of a
fixed uniformizer pi of K.  All ring operations propagate absolute precision
(min for addition, valuation-shifted for multiplication and division), so a
result printed as c_0 + c_1*pi + ... + O(pi^N) is correct digit for digit.

The supported extension shapes are K = Q_p itself, unramified extensions
(m irreducible mod p), and totally ramified extensions whose Newton polygon is
a single segment of slope a/n with gcd(a, n) = 1 (Eisenstein when a = 1).
Mixed-ramification moduli with an irreducible residual polynomial are accepted
for ring arithmetic and valuations, but residue-dependent operations (square
roots, digit expansions) reject them with an explicit error.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (
    DivisionByZero,
    NonSquareResidue,
    OddValuation,
    SchemaError,
    ZeroArgument,
)
from ._residue import ResidueField, fp_poly_is_irreducible

INFINITY = math.inf


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise SchemaError(f"expected an exact rational, got {x!r}")


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _vp_int(n, p):
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def len_base(k, p):
    """Number of base-p digits of k, an upper bound for log_p(k) + 1."""
    d = 0
    while k:
        k //= p
        d += 1
    return d


def newton_polygon_slopes(vals):
    """Lower-hull slopes of the points (i, vals[i]), vals[i] rational or inf.

    Returns a list of (slope, horizontal_length) pairs, slopes increasing.
    Infinite ordinates at the left end are treated as roots of valuation
    +infinity and reported with slope INFINITY.
    """
    pts = [(i, v) for i, v in enumerate(vals) if v is not INFINITY]
    if not pts:
        return [(INFINITY, len(vals) - 1)]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    first = hull[0][0]
    if first > 0:
        segs.append((INFINITY, first))
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y1 - y2, x2 - x1), x2 - x1))
    segs.reverse()  # increasing slope = increasing root valuation... keep sorted ascending
    segs.sort(key=lambda s: s[0] if s[0] is not INFINITY else Fraction(10**9))
    return segs


class FieldSpec:
    """A fixed p-adic coefficient field with a working precision cap.

    Parameters
    ----------
    p : odd prime.
    modulus : coefficients of a monic p-integral polynomial m(t) over Q_p,
        low degree first (rationals, ints, or "a/b" strings).  None or a
        degree-1 modulus gives K = Q_p.
    prec : working absolute precision cap, in uniformizer units.
    log_branch : the value assigned to Log(p) (rational or element), default 0.
    uniformizer_name : symbol used when printing expansions of ramified
        elements ("a" matches the usual hand notation for t with t^4 = 5).
    """

    def __init__(self, p, modulus=None, prec=60, log_branch=0, uniformizer_name="a"):
        if p == 2:
            raise SchemaError("p = 2 is rejected; the method needs an odd prime")
        if not _is_prime(p):
            raise SchemaError(f"p = {p} is not prime")
        self.p = p
        if modulus is None:
            modulus = [Fraction(0), Fraction(1)]
        self.modulus = [_as_fraction(c) for c in modulus]
        if self.modulus[-1] != 1:
            raise SchemaError("modulus must be monic")
        for c in self.modulus:
            if c.denominator % p == 0:
                raise SchemaError("modulus coefficients must be p-integral")
        self.n = len(self.modulus) - 1
        if self.n < 1:
            raise SchemaError("modulus must have degree >= 1")
        self.prec = int(prec)
        self.uniformizer_name = uniformizer_name
        self._classify()
        # internal representation headroom (p-digits) over the precision cap
        self.rep_digits = -(-self.prec // self.e) + 14
        self._mod_cache = {}
        self._log_pi = None
        if isinstance(log_branch, PadicElement):
            self.log_branch = log_branch
        else:
            self.log_branch = self.from_rational(_as_fraction(log_branch))

    def _log_uniformizer(self):
        """Log(pi), resolved from pi^e = p * unit and Log(p) = log_branch."""
        if self._log_pi is None:
            pi = self.uniformizer()
            w = pi**self.e * self.from_rational(Fraction(1, self.p))
            self._log_pi = (self.log_branch + self.one()._unit_log(w)).scale_rational(
                Fraction(1, self.e)
            )
        return self._log_pi

    # -- classification and validation -------------------------------------

    def _classify(self):
        p, n = self.p, self.n
        if n == 1:
            self.kind = "qp"
            self.e, self.f = 1, 1
            self.slope = Fraction(0)
            self.residue_field = ResidueField(p, (0, 1))
            return
        vals = []
        for i, c in enumerate(self.modulus):
            if c == 0:
                vals.append(INFINITY)
            else:
                vals.append(Fraction(_vp_int(c.numerator, p) - _vp_int(c.denominator, p)))
        if vals[0] is INFINITY:
            raise SchemaError("modulus is divisible by t, hence reducible")
        segs = newton_polygon_slopes(vals)
        slopes = [s for s, _ in segs]
        if len(slopes) != 1:
            raise SchemaError("modulus Newton polygon has several slopes, hence m is reducible over Q_p")
        slope = slopes[0]
        if slope == 0:
            mbar = [int(c.numerator * pow(c.denominator, -1, p)) % p for c in self.modulus]
            rf1 = ResidueField(p, (0, 1))
            if not fp_poly_is_irreducible(rf1, mbar):
                raise SchemaError("modulus reduces mod p into coprime factors, hence is reducible (Hensel)")
            self.kind = "unramified"
            self.e, self.f = 1, n
            self.slope = Fraction(0)
            self.residue_field = ResidueField(p, tuple(mbar))
            return
        a, d = slope.numerator, slope.denominator
        if d == n and math.gcd(a, n) == 1:
            self.kind = "ramified"
            self.e, self.f = n, 1
            self.slope = slope
            self.residue_field = ResidueField(p, (0, 1))
            # pi = t^alpha * p^beta with alpha*a + beta*n = 1
            g, alpha, beta = self._ext_gcd(a, n)
            assert g == 1
            self._pi_powers = (alpha, beta)
            return
        # mixed ramification: single slope a'/e' in lowest terms appearing
        # e = e', f = n/e' if the residual polynomial is irreducible
        aa, ee = slope.numerator, slope.denominator
        if n % ee != 0:
            raise SchemaError("inconsistent Newton polygon for an irreducible modulus")
        ff = n // ee
        res_poly = self._residual_polynomial(vals, slope)
        rf1 = ResidueField(p, (0, 1))
        if not fp_poly_is_irreducible(rf1, res_poly):
            raise SchemaError("residual polynomial of the modulus is reducible; cannot validate irreducibility")
        self.kind = "mixed"
        self.e, self.f = ee, ff
        self.slope = slope
        self.residue_field = None  # residue-dependent operations unsupported
        g, alpha, beta = self._ext_gcd(aa, ee)
        self._pi_powers = (alpha, beta)

    @staticmethod
    def _ext_gcd(a, b):
        old_r, r = a, b
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        return old_r, old_s, old_t

    def _residual_polynomial(self, vals, slope):
        a, e0 = slope.numerator, slope.denominator
        p, n = self.p, self.n
        coeffs = []
        for j in range(n // e0 + 1):
            i = j * e0
            target = Fraction(a * (n - i), e0)
            if vals[i] == target:
                c = self.modulus[i]
                num = c.numerator // (p ** _vp_int(c.numerator, p)) if c.numerator else 0
                den = c.denominator
                coeffs.append(num * pow(den, -1, p) % p)
            else:
                coeffs.append(0)
        return coeffs

    # -- element construction ----------------------------------------------

    def zero(self, prec=None):
        return PadicElement(self, (0,) * self.n, 0, self.prec if prec is None else prec)

    def one(self):
        return self.from_rational(1)

    def from_rational(self, q, prec=None):
        q = _as_fraction(q)
        p = self.p
        num, den = q.numerator, q.denominator
        shift = _vp_int(den, p) if den != 1 and den % p == 0 else 0
        den //= p ** shift
        mod = p ** (self.rep_digits + shift)
        c0 = num * pow(den, -1, mod) % mod
        coeffs = (c0,) + (0,) * (self.n - 1)
        return PadicElement(self, coeffs, shift, self.prec if prec is None else prec)

    def from_coeffs(self, coeffs, prec=None):
        """Element sum(coeffs[i] * t^i) from exact rationals."""
        acc = self.zero(prec=prec)
        t = self.gen()
        power = self.one()
        for c in coeffs:
            acc = acc + self.from_rational(c, prec=prec) * power
            power = power * t
        return acc

    def gen(self):
        """The image of t in K."""
        if self.n == 1:
            # m(t) = t - c, so t = c
            return self.from_rational(-self.modulus[0])
        coeffs = (0, 1) + (0,) * (self.n - 2)
        return PadicElement(self, coeffs, 0, self.prec)

    def uniformizer(self):
        if self.kind in ("qp", "unramified"):
            return self.from_rational(self.p)
        alpha, beta = self._pi_powers
        pi = self.gen() ** alpha
        if beta >= 0:
            return pi * self.from_rational(Fraction(self.p) ** beta)
        return pi / self.from_rational(Fraction(self.p) ** (-beta))

    # -- internals ----------------------------------------------------------

    def _modulus_ints(self, ndigits):
        """Coefficients of m(t) as ints mod p^ndigits (degree < n part)."""
        key = ndigits
        cached = self._mod_cache.get(key)
        if cached is None:
            mod = self.p ** ndigits
            cached = tuple(
                c.numerator * pow(c.denominator, -1, mod) % mod for c in self.modulus[:-1]
            )
            self._mod_cache[key] = cached
        return cached

    def _reduce_poly(self, poly, ndigits):
        """Reduce an int-coefficient polynomial mod (m(t), p^ndigits)."""
        mod = self.p ** ndigits
        n = self.n
        poly = [c % mod for c in poly]
        mints = self._modulus_ints(ndigits)
        for i in range(len(poly) - 1, n - 1, -1):
            c = poly[i]
            if c:
                poly[i] = 0
                for j in range(n):
                    poly[i - n + j] = (poly[i - n + j] - c * mints[j]) % mod
        out = poly[:n]
        out += [0] * (n - len(out))
        return out

    def element_from_ints(self, coeffs, shift=0, prec=None):
        return PadicElement(self, tuple(coeffs), shift, self.prec if prec is None else prec)

    # -- pretty printing ----------------------------------------------------

    def pi_symbol(self):
        if self.kind == "qp":
            return str(self.p)
        if self.kind == "unramified":
            return str(self.p)
        return self.uniformizer_name

    def __repr__(self):
        if self.kind == "qp":
            return f"Q_{self.p} (prec O({self.p}^{self.prec}))"
        return (
            f"Q_{self.p}[t]/(m), n={self.n}, e={self.e}, f={self.f}"
            f" (prec O({self.pi_symbol()}^{self.prec}))"
        )

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, tuple(self.modulus)))


class PadicElement:
    """An element of K known modulo pi^abs_prec, stored as c(t)/p^shift."""

    __slots__ = ("field", "coeffs", "shift", "prec", "_v")

    def __init__(self, field, coeffs, shift, prec):
        self.field = field
        prec = min(int(prec), field.e * field.rep_digits - field.e * 2)
        mod = field.p ** (field.rep_digits + shift)
        coeffs = [c % mod for c in coeffs]
        # strip common powers of p from the denominator
        p = field.p
        while shift > 0 and all(c % p == 0 for c in coeffs):
            coeffs = [c // p for c in coeffs]
            shift -= 1
        self.coeffs = tuple(coeffs)
        self.shift = shift
        self.prec = prec
        self._v = None

    # -- coercion -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicElement):
            return other
        if isinstance(other, (int, Fraction, str)):
            return self.field.from_rational(other)
        return NotImplemented

    # -- valuation --------------------------------------------------------

    def _vpi_raw(self):
        """Valuation in pi-units of the stored representative (may exceed prec)."""
        if self._v is not None:
            return self._v
        self._v = self._vpi_raw_impl()
        return self._v

    def _vpi_raw_impl(self):
        fld = self.field
        p = fld.p
        if fld.kind in ("qp", "unramified"):
            best = None
            for c in self.coeffs:
                if c:
                    v = _vp_int(c, p)
                    best = v if best is None else min(best, v)
            if best is None:
                return INFINITY
            return (best - self.shift) * fld.e  # e == 1 here
        if fld.kind == "ramified":
            a, n = fld.slope.numerator, fld.n
            best = None
            for i, c in enumerate(self.coeffs):
                if c:
                    cand = n * _vp_int(c, p) + i * a
                    best = cand if best is None else min(best, cand)
            if best is None:
                return INFINITY
            return best - n * self.shift
        return self._vpi_det()

    def _vpi_det(self):
        fld = self.field
        n, p = fld.n, fld.p
        if all(c == 0 for c in self.coeffs):
            return INFINITY
        ndigits = fld.rep_digits + self.shift
        cols = []
        for j in range(n):
            poly = [0] * j + list(self.coeffs)
            cols.append(fld._reduce_poly(poly, ndigits))
        det = _det_int([[cols[j][i] for j in range(n)] for i in range(n)])
        det %= p ** (ndigits * n)
        if det == 0:
            return INFINITY
        vp_norm = _vp_int(det, p)
        vpi = Fraction(vp_norm, n) * fld.e - fld.e * self.shift
        if vpi.denominator != 1:
            return INFINITY  # representative noise beyond meaningful range
        return int(vpi)

    def vpi(self):
        """Valuation in pi-units, or INFINITY when indistinguishable from 0."""
        v = self._vpi_raw()
        if v is INFINITY or v >= self.prec:
            return INFINITY
        return v

    def valuation(self):
        """v_p normalized so v_p(p) = 1; a Fraction, or INFINITY."""
        v = self.vpi()
        if v is INFINITY:
            return INFINITY
        return Fraction(v, self.field.e)

    def is_zero(self):
        return self.vpi() is INFINITY

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        fld = self.field
        s = max(self.shift, other.shift)
        pa = fld.p ** (s - self.shift)
        pb = fld.p ** (s - other.shift)
        coeffs = [x * pa + y * pb for x, y in zip(self.coeffs, other.coeffs)]
        return PadicElement(fld, coeffs, s, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return PadicElement(self.field, tuple(-c for c in self.coeffs), self.shift, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        fld = self.field
        shift = self.shift + other.shift
        ndigits = fld.rep_digits + shift
        prod = [0] * (2 * fld.n - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    prod[i + j] += x * y
        coeffs = fld._reduce_poly(prod, ndigits)
        va = min(self._vpi_raw(), self.prec)
        vb = min(other._vpi_raw(), other.prec)
        prec = min(self.prec + vb, other.prec + va)
        if prec is INFINITY:
            prec = fld.e * fld.rep_digits
        return PadicElement(fld, coeffs, shift, prec)

    __rmul__ = __mul__

    def inverse(self):
        """1/x with absolute precision prec(x) - 2 vpi(x)."""
        fld = self.field
        v = self.vpi()
        if v is INFINITY:
            raise DivisionByZero(prec=self.prec)
        n, p = fld.n, fld.p
        prec = self.prec - 2 * v
        if n == 1:
            # x = c/p^s, c = p^k u  =>  1/x = u^{-1} p^{s-k}
            c = self.coeffs[0]
            k = _vp_int(c, p)
            u = c // p**k
            extra = max(0, k - self.shift)
            mod = p ** (fld.rep_digits + extra)
            uinv = pow(u, -1, mod)
            num = uinv * p ** max(0, self.shift - k)
            return PadicElement(fld, (num,), extra, prec)
        # general route: A^{-1} = adj(M_A) e_0 / det(M_A) with M_A the
        # multiplication-by-A matrix; det = p^vdet * unit
        ndigits = fld.rep_digits + self.shift
        cols = []
        for j in range(n):
            poly = [0] * j + list(self.coeffs)
            cols.append(fld._reduce_poly(poly, ndigits))
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        det = _det_int(mat)
        adj_col = _adjugate_col0(mat)
        vdet = _vp_int(det, p)
        u = det // p**vdet
        extra = max(0, vdet - self.shift)
        mod = p ** (fld.rep_digits + extra)
        uinv = pow(u, -1, mod)
        scale = p ** max(0, self.shift - vdet)
        coeffs = [c * uinv * scale for c in adj_col]
        return PadicElement(fld, coeffs, extra, prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def scale_rational(self, q):
        return self * self.field.from_rational(q)

    # -- residue and digits ---------------------------------------------

    def residue(self):
        """Image in the residue field of an integral element (int for f = 1)."""
        fld = self.field
        if fld.kind == "mixed":
            raise NonSquareResidue("residue computations unsupported for mixed-ramification K; enlarge K differently")
        v = self.vpi()
        if v is INFINITY or v >= 1:
            return 0 if fld.f == 1 else fld.residue_field.zero()
        if v != 0:
            raise ValueError("residue is defined for integral elements only")
        p = fld.p
        if self.shift == 0:
            if fld.f == 1:
                return self.coeffs[0] % p
            return fld.residue_field.element([c % p for c in self.coeffs])
        # rare: a unit whose numerator strip left a denominator (high-slope
        # ramified moduli); solve x = r mod pi by direct search in F_p
        if fld.f != 1:
            raise ValueError("unit with unreduced denominator in a residue extension")
        for r in range(p):
            if (self - fld.from_rational(r)).vpi() >= 1:
                return r
        raise AssertionError("residue search failed")

    def digits(self, hi=None):
        """Base-pi digits [(i, d_i)] with d_i in [0, p), for f = 1 fields."""
        fld = self.field
        if fld.f != 1:
            raise NotImplementedError("digit expansions implemented for residue field F_p only")
        hi = self.prec if hi is None else min(hi, self.prec)
        out = []
        x = self
        pi = fld.uniformizer()
        v = x.vpi()
        while v is not INFINITY and v < hi:
            d = (x / pi**v).residue()
            if d:
                out.append((v, d))
                x = x - fld.from_rational(d) * pi**v
            v = x.vpi()
            if v is not INFINITY and out and v <= out[-1][0]:
                raise AssertionError("digit extraction failed to make progress")
        return out

    def expansion_str(self, prec=None):
        fld = self.field
        hi = self.prec if prec is None else min(prec, self.prec)
        sym = fld.pi_symbol()
        try:
            digs = self.digits(hi=hi)
        except NotImplementedError:
            return f"({' , '.join(str(c) for c in self.coeffs)})/p^{self.shift} + O({sym}^{hi})"
        terms = []
        for i, d in digs:
            if i == 0:
                terms.append(f"{d}")
            elif i == 1:
                terms.append(f"{d}*{sym}" if d != 1 else f"{sym}")
            else:
                terms.append(f"{d}*{sym}^{i}" if d != 1 else f"{sym}^{i}")
        body = " + ".join(terms) if terms else ""
        tail = f"O({sym}^{hi})"
        return f"{body} + {tail}" if body else tail

    def __repr__(self):
        return self.expansion_str()

    def at_prec(self, prec):
        """The same element with its precision capped at prec pi-units."""
        return PadicElement(self.field, self.coeffs, self.shift, min(self.prec, prec))

    # -- square root ------------------------------------------------------

    def sqrt(self):
        """The canonical square root (ties broken by smaller residue key).

        Raises OddValuation or NonSquareResidue (both "enlarge K") when no
        square root exists in K.
        """
        fld = self.field
        v = self.vpi()
        if v is INFINITY:
            raise OddValuation("sqrt of an element indistinguishable from zero; enlarge K or raise precision")
        if v % 2 != 0:
            raise OddValuation("element has odd valuation, no square root in K; enlarge K")
        if fld.kind == "mixed":
            raise NonSquareResidue("square roots unsupported for mixed-ramification K")
        pi = fld.uniformizer()
        u = self / pi**v if v else self
        r = u.residue()
        rf = fld.residue_field
        rbar = rf.sqrt(r if isinstance(r, tuple) else rf.element([r]))
        if rbar is None:
            raise NonSquareResidue("residue is not a square in the residue field; enlarge K")
        if fld.f == 1:
            s = fld.from_rational(rbar[0])
        else:
            s = fld.from_coeffs([c for c in rbar])
        two_inv = fld.from_rational(Fraction(1, 2))
        for _ in range(fld.rep_digits.bit_length() + fld.e.bit_length() + 3):
            s = (s + u / s) * two_inv
        s = self._canonical_sign(s)
        half = v // 2
        s = s * pi**half
        return s.at_prec(self.prec - v // 2)

    def _canonical_sign(self, s):
        fld = self.field
        r1 = s.residue()
        r2 = (-s).residue()
        key1 = (r1,) if not isinstance(r1, tuple) else r1
        key2 = (r2,) if not isinstance(r2, tuple) else r2
        return s if key1 <= key2 else -s

    # -- logarithm ---------------------------------------------------------

    def log(self):
        """Branch-respecting p-adic logarithm.

        Satisfies Log(xy) = Log(x) + Log(y) for all nonzero x, y, and
        Log(p) = log_branch exactly.  The element splits as pi^v * unit; the
        unit is raised to the power e(q - 1) to make it a 1-unit, accelerated
        by p-power maps until it is congruent to 1 mod pi^(e+1), and fed to
        the Mercator series; Log(pi) itself is resolved once per field from
        pi^e = p * (unit) and the branch value of Log(p).
        """
        fld = self.field
        v = self.vpi()
        if v is INFINITY:
            raise ZeroArgument("log of an element indistinguishable from zero")
        pi = fld.uniformizer()
        unit = self * pi ** (-v) if v else self
        out = self._unit_log(unit)
        if v:
            out = out + fld._log_uniformizer().scale_rational(Fraction(v))
        loss = fld.e * _vp_int(fld.e * (fld.p**fld.f - 1), fld.p)
        return out.at_prec(self.prec - max(v, 0) - loss)

    def _unit_log(self, u):
        fld = self.field
        p, e = fld.p, fld.e
        q = p**fld.f
        y = u ** (e * (q - 1))
        s = 0
        while True:
            z = y - 1
            vz = z.vpi()
            if vz is INFINITY or vz >= e + 1:
                break
            y = y**p
            s += 1
            if s > e + 3:
                raise AssertionError("log acceleration failed to converge")
        mert = self._mercator(y - 1)
        return mert * fld.from_rational(Fraction(1, e * (q - 1) * p**s))

    def _mercator(self, z):
        """Sum of z - z^2/2 + z^3/3 - ... to the working modulus."""
        fld = self.field
        vz = z.vpi()
        if vz is INFINITY:
            return fld.zero()
        target = fld.e * fld.rep_digits
        acc = fld.zero()
        zk = fld.one()
        k = 1
        while True:
            # conservative cut: base-p digit count bounds v_p(k') for all k' >= k
            dcount = len_base(k, fld.p)
            if k * vz - fld.e * dcount >= target:
                break
            zk = zk * z
            acc = acc + zk.scale_rational(Fraction((-1) ** (k + 1), k))
            k += 1
        return acc


def _det_int(mat):
    """Exact integer determinant by cofactor expansion (n is tiny)."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    det = 0
    for j in range(n):
        if mat[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
            det += (-1) ** j * mat[0][j] * _det_int(minor)
    return det


def _adjugate_col0(mat):
    """First column of adj(mat): adj[i][0] = (-1)^i det(minor(row 0, col i))."""
    n = len(mat)
    col = []
    for i in range(n):
        minor = [row[:i] + row[i + 1 :] for row in mat[1:]]
        col.append((-1) ** i * _det_int(minor))
    return col


# -- spec-shaped functional surface ----------------------------------------


def field_arith(op, a, b):
    """Dispatch of {add,sub,mul,div} on two elements of the same field."""
    if a.field != b.field:
        raise SchemaError("elements from different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise SchemaError(f"unknown op {op!r}")


def valuation(a):
    return a.valuation()


def sqrt(a):
    return a.sqrt()


def log(a):
    return a.log()
