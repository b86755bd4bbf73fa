"""Field arithmetic: spec examples, independent oracles, and axioms."""

import random
from fractions import Fraction

import pytest

from volint.errors import NonSquareResidue, OddValuation, SchemaError
from volint.padic import INFINITY, FieldSpec, field_arith, log, sqrt, valuation


@pytest.fixture(scope="module")
def Q5():
    return FieldSpec(5, prec=20)


@pytest.fixture(scope="module")
def Q43():
    return FieldSpec(43, prec=12)


@pytest.fixture(scope="module")
def K54():
    # K = Q_5(a) with a^4 = 5
    return FieldSpec(5, [-5, 0, 0, 0, 1], prec=60, uniformizer_name="a")


def test_field_validation_rejects_bad_input():
    with pytest.raises(SchemaError):
        FieldSpec(2)
    with pytest.raises(SchemaError):
        FieldSpec(9)
    with pytest.raises(SchemaError):
        FieldSpec(5, [6, 5, 1])  # (x+2)(x+3): splits mod 5
    with pytest.raises(SchemaError):
        FieldSpec(5, [Fraction(1, 5), 0, 1])  # not p-integral


def test_unramified_and_eisenstein_classification(K54):
    assert K54.e == 4 and K54.f == 1
    unram = FieldSpec(5, [2, 1, 1], prec=20)  # x^2 + x + 2 irreducible mod 5
    assert unram.e == 1 and unram.f == 2


def test_add_example(Q5):
    a = Q5.from_rational(1)
    b = Q5.from_rational(4)
    assert (a + b).expansion_str(8) == "5 + O(5^8)"


def test_mul_in_ramified_field(K54):
    a = K54.gen()
    sq = a * a
    assert sq.valuation() == Fraction(1, 2)
    assert (sq - K54.from_rational(5).sqrt()).is_zero()


def test_div_geometric_series_oracle(Q5):
    # 1/(1-5) = 1 + 5 + 5^2 + ... ; oracle: partial geometric sums
    got = field_arith("div", Q5.one(), Q5.from_rational(1 - 5))
    oracle = Q5.zero()
    for k in range(20):
        oracle = oracle + Q5.from_rational(5**k)
    assert (got - oracle).is_zero()
    assert got.expansion_str(4) == "1 + 5 + 5^2 + 5^3 + O(5^4)"


def test_valuation_examples(Q5, K54):
    assert valuation(Q5.from_rational(5)) == 1
    a = K54.gen()
    assert valuation(a) == Fraction(1, 4)
    assert valuation(a**3 + a**7) == Fraction(3, 4)
    assert valuation(Q5.zero()) is INFINITY


def test_valuation_resultant_oracle(K54):
    # the multiplication-matrix determinant equals the field norm, so
    # v(x) = v_p(det)/n; compare the fast path against it on samples
    a = K54.gen()
    samples = [a**3 + a**7, K54.from_rational(25) + a, a * 2 + a**2 * 3]
    for x in samples:
        fast = x.vpi()
        det = x._vpi_det()
        assert fast == det


def test_sqrt_examples(Q5):
    assert sqrt(Q5.one()).expansion_str(8) == "1 + O(5^8)"
    two = sqrt(Q5.from_rational(4))
    assert (two - 2).is_zero()  # canonical pick: residue 2 beats residue 3
    s6 = sqrt(Q5.from_rational(6))
    assert (s6 * s6 - 6).is_zero()
    # Newton-iteration oracle from residue 1
    oracle = Q5.from_rational(1)
    half = Q5.from_rational(Fraction(1, 2))
    for _ in range(8):
        oracle = (oracle + Q5.from_rational(6) / oracle) * half
    assert (s6 - oracle).is_zero() or (s6 + oracle).is_zero()


def test_sqrt_errors_say_enlarge_K(Q5):
    with pytest.raises(OddValuation, match="enlarge K"):
        sqrt(Q5.from_rational(5))
    with pytest.raises(NonSquareResidue, match="enlarge K"):
        sqrt(Q5.from_rational(2))


def test_log_branch_value_at_p(Q5):
    assert log(Q5.from_rational(5)).is_zero()
    branch = FieldSpec(5, prec=20, log_branch=7)
    assert (log(branch.from_rational(5)) - 7).is_zero()
    assert (log(branch.from_rational(25)) - 14).is_zero()


def test_log_mercator_oracle(Q5):
    got = log(Q5.from_rational(6))
    oracle = Q5.zero()
    z = Q5.from_rational(5)
    zk = Q5.one()
    for k in range(1, 40):
        zk = zk * z
        oracle = oracle + zk.scale_rational(Fraction((-1) ** (k + 1), k))
    assert (got - oracle).is_zero()


def test_log_combination_golden(Q43):
    # -(2/3) Log 2 + 2 Log 5 - (2/3) Log 11 in Q_43
    val = (
        log(Q43.from_rational(2)).scale_rational(Fraction(-2, 3))
        + log(Q43.from_rational(5)).scale_rational(2)
        + log(Q43.from_rational(11)).scale_rational(Fraction(-2, 3))
    )
    assert val.expansion_str(6) == "42*43 + 21*43^2 + 14*43^3 + 17*43^4 + 39*43^5 + O(43^6)"


def test_log_homomorphism_randomized(Q43, K54):
    rng = random.Random(11)
    for field, n_trials in ((Q43, 100), (K54, 100)):
        pi = field.uniformizer()
        for _ in range(n_trials):
            a = field.from_rational(rng.randrange(1, field.p)) + pi * field.from_rational(
                rng.randrange(0, field.p)
            )
            b = field.from_rational(rng.randrange(1, field.p)) * pi ** rng.randrange(0, 3)
            lhs = log(a * b)
            rhs = log(a) + log(b)
            diff = lhs - rhs
            assert diff.is_zero(), (a, b, diff)


def test_teichmuller_identity(Q43):
    rng = random.Random(5)
    q = Q43.p
    for _ in range(10):
        u = Q43.from_rational(rng.randrange(1, 43))
        assert (log(u ** (q - 1)) - log(u).scale_rational(q - 1)).is_zero()


def test_valuation_ultrametric_randomized(K54):
    rng = random.Random(3)
    a_gen = K54.gen()
    for _ in range(50):
        x = sum(
            (K54.from_rational(rng.randrange(-10, 10)) * a_gen**i for i in range(4)),
            K54.zero(),
        )
        y = sum(
            (K54.from_rational(rng.randrange(-10, 10)) * a_gen**i for i in range(4)),
            K54.zero(),
        )
        if x.is_zero() or y.is_zero():
            continue
        assert valuation(x * y) == valuation(x) + valuation(y)
        s = x + y
        if not s.is_zero():
            assert valuation(s) >= min(valuation(x), valuation(y))


def test_qp_arithmetic_matches_integer_oracle():
    # plain integer arithmetic mod p^M, digit for digit
    p, M = 7, 10
    field = FieldSpec(p, prec=M)
    rng = random.Random(17)
    for _ in range(60):
        x, y = rng.randrange(1, 7**6), rng.randrange(1, 7**6)
        op = rng.choice(["add", "sub", "mul", "div"])
        a, b = field.from_rational(x), field.from_rational(y)
        got = field_arith(op, a, b)
        if op == "add":
            want = x + y
        elif op == "sub":
            want = x - y
        elif op == "mul":
            want = x * y
        else:
            vy = 0
            yy = y
            while yy % p == 0:
                yy //= p
                vy += 1
            want = Fraction(x, y)
        assert (got - field.from_rational(want)).is_zero()


def test_sqrt_squares_exactly(K54):
    rng = random.Random(23)
    a = K54.gen()
    for _ in range(25):
        u = K54.from_rational(rng.randrange(1, 5)) + a * rng.randrange(0, 5)
        x = u * u * K54.from_rational(5) ** rng.randrange(0, 2)
        s = sqrt(x)
        assert (s * s - x).is_zero()


def test_digits_render_like_hand_notation(K54):
    a = K54.gen()
    x = K54.from_rational(2) * a**4 + K54.from_rational(3) * a**8
    assert x.expansion_str(12) == "2*a^4 + 3*a^8 + O(a^12)"
