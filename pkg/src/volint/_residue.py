"""Small finite-field helpers used by Hensel seeds, square roots and clustering.

Elements of F_q = F_p[t]/(mbar) are stored as tuples of ints mod p (length f,
low degree first).  For f = 1 the tuples have length one; callers that know
they are in the prime field can use the int shortcuts below instead.
"""

from __future__ import annotations


def _is_zero_elt(c):
    if isinstance(c, tuple):
        return all(x == 0 for x in c)
    return c == 0


def _poly_trim(c):
    n = len(c)
    while n > 0 and _is_zero_elt(c[n - 1]):
        n -= 1
    return c[:n]


class ResidueField:
    """F_q with q = p^f, as F_p[t]/(mbar) for a monic irreducible mbar."""

    def __init__(self, p, mbar=(0, 1)):
        self.p = p
        self.mbar = tuple(m % p for m in mbar)  # monic, length f+1
        self.f = len(mbar) - 1
        self.q = p ** self.f

    def zero(self):
        return (0,) * self.f

    def one(self):
        return (1,) + (0,) * (self.f - 1)

    def element(self, coeffs):
        c = [x % self.p for x in coeffs[: self.f]]
        c += [0] * (self.f - len(c))
        return tuple(c)

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        p, f = self.p, self.f
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the monic mbar
        for i in range(2 * f - 2, f - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(self.f):
                    prod[i - f + j] = (prod[i - f + j] - c * self.mbar[j]) % p
        return tuple(prod[:f])

    def pow(self, a, n):
        result = self.one()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in residue field")
        return self.pow(a, self.q - 2)

    def elements(self):
        """Iterate over all q elements (q is assumed desk-scale)."""
        p, f = self.p, self.f

        def rec(i):
            if i == f:
                yield ()
                return
            for tail in rec(i + 1):
                for d in range(p):
                    yield (d,) + tail

        yield from rec(0)

    def sqrt(self, a):
        """One square root of a, or None when a is not a square."""
        if self.is_zero(a):
            return self.zero()
        if self.pow(a, (self.q - 1) // 2) != self.one():
            return None
        return self._tonelli(a)

    def _tonelli(self, a):
        q = self.q
        if q % 4 == 3:
            return self.pow(a, (q + 1) // 4)
        # write q - 1 = s * 2^r with s odd
        s, r = q - 1, 0
        while s % 2 == 0:
            s //= 2
            r += 1
        # find a non-residue
        n = None
        for cand in self.elements():
            if self.is_zero(cand):
                continue
            if self.pow(cand, (q - 1) // 2) != self.one():
                n = cand
                break
        c = self.pow(n, s)
        x = self.pow(a, (s + 1) // 2)
        t = self.pow(a, s)
        m = r
        while t != self.one():
            i, sq = 0, t
            while sq != self.one():
                sq = self.mul(sq, sq)
                i += 1
            b = self.pow(c, 1 << (m - i - 1))
            x = self.mul(x, b)
            c = self.mul(b, b)
            t = self.mul(t, c)
            m = i
        return x


class RPoly:
    """Dense polynomials over a ResidueField, enough for gcd/Bezout/roots."""

    def __init__(self, rf, coeffs):
        self.rf = rf
        self.coeffs = list(_poly_trim([rf.element(c) if isinstance(c, (list, tuple)) else c for c in coeffs]))

    @classmethod
    def from_ints(cls, rf, ints):
        return cls(rf, [rf.element([c]) for c in ints])

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return self.coeffs == other.coeffs

    def lc(self):
        return self.coeffs[-1]

    def monic(self):
        if self.is_zero():
            return self
        inv = self.rf.inv(self.lc())
        return RPoly(self.rf, [self.rf.mul(c, inv) for c in self.coeffs])

    def add(self, other):
        rf = self.rf
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [rf.zero()] * (n - len(self.coeffs))
        b = other.coeffs + [rf.zero()] * (n - len(other.coeffs))
        return RPoly(rf, [rf.add(x, y) for x, y in zip(a, b)])

    def sub(self, other):
        rf = self.rf
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [rf.zero()] * (n - len(self.coeffs))
        b = other.coeffs + [rf.zero()] * (n - len(other.coeffs))
        return RPoly(rf, [rf.sub(x, y) for x, y in zip(a, b)])

    def mul(self, other):
        rf = self.rf
        if self.is_zero() or other.is_zero():
            return RPoly(rf, [])
        prod = [rf.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if rf.is_zero(x):
                continue
            for j, y in enumerate(other.coeffs):
                prod[i + j] = rf.add(prod[i + j], rf.mul(x, y))
        return RPoly(rf, prod)

    def divmod(self, other):
        rf = self.rf
        if other.is_zero():
            raise ZeroDivisionError
        rem = list(self.coeffs)
        q = [rf.zero()] * max(0, len(rem) - len(other.coeffs) + 1)
        dinv = rf.inv(other.lc())
        d = other.degree()
        for i in range(len(rem) - 1 - d, -1, -1):
            c = rf.mul(rem[i + d], dinv)
            if rf.is_zero(c):
                continue
            q[i] = c
            for j, oc in enumerate(other.coeffs):
                rem[i + j] = rf.sub(rem[i + j], rf.mul(c, oc))
        return RPoly(rf, q), RPoly(rf, rem)

    def mod(self, other):
        return self.divmod(other)[1]

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.mod(b)
        return a.monic() if not a.is_zero() else a

    def bezout(self, other):
        """(s, t, g) with s*self + t*other = g = gcd, g monic."""
        rf = self.rf
        r0, r1 = self, other
        s0, s1 = RPoly(rf, [rf.one()]), RPoly(rf, [])
        t0, t1 = RPoly(rf, []), RPoly(rf, [rf.one()])
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0.sub(q.mul(s1))
            t0, t1 = t1, t0.sub(q.mul(t1))
        if r0.is_zero():
            return s0, t0, r0
        inv = rf.inv(r0.lc())
        scale = RPoly(rf, [inv])
        return s0.mul(scale), t0.mul(scale), r0.monic()

    def eval(self, x):
        rf = self.rf
        acc = rf.zero()
        for c in reversed(self.coeffs):
            acc = rf.add(rf.mul(acc, x), c)
        return acc

    def roots(self):
        """All roots in the residue field, with multiplicity."""
        rf = self.rf
        out = []
        poly = self
        for x in rf.elements():
            if poly.degree() < 1:
                break
            mult = 0
            while not poly.is_zero() and rf.is_zero(poly.eval(x)):
                lin = RPoly(rf, [rf.neg(x), rf.one()])
                poly, rem = poly.divmod(lin)
                assert rem.is_zero()
                mult += 1
            if mult:
                out.append((x, mult))
        return out, poly  # poly = root-free cofactor

    def pow_mod(self, n, modulus):
        rf = self.rf
        result = RPoly(rf, [rf.one()])
        base = self.mod(modulus)
        while n:
            if n & 1:
                result = result.mul(base).mod(modulus)
            base = base.mul(base).mod(modulus)
            n >>= 1
        return result


def fp_poly_is_irreducible(rf, coeffs):
    """Irreducibility over F_p of a monic polynomial given by int coefficients."""
    poly = RPoly.from_ints(rf, coeffs).monic()
    n = poly.degree()
    if n <= 0:
        return False
    if n == 1:
        return True
    x = RPoly.from_ints(rf, [0, 1])
    # x^(q^n) == x mod poly, and for every prime l | n, gcd(x^(q^(n/l)) - x, poly) = 1
    q = rf.q
    xq = x.pow_mod(q ** n, poly)
    if not xq.sub(x).mod(poly).is_zero():
        return False
    m = n
    primes = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            primes.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        primes.append(m)
    for l in primes:
        xql = x.pow_mod(q ** (n // l), poly)
        if xql.sub(x).gcd(poly).degree() != 0:
            return False
    return True
