import pytest
from hypothesis import given
from hypothesis import strategies as st

from hicft.bilaurent import parse_bilaurent
from hicft.errors import ParseError, ZeroElement
from hicft.fields import (
    LaurentField,
    TwoLocalField,
    fq,
    fq_ops,
    irreducibles,
    is_irreducible,
    laurent_ops,
    parse_element,
    unit_decompose,
)
from hicft.gf import poly_mul
from hicft.laurent import parse_laurent

ORDERS = [2, 3, 4, 5, 7, 8, 9]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_field_is_integer_arithmetic(p):
    F = fq(p)
    for a in range(p):
        for b in range(p):
            assert F.add(a, b) == (a + b) % p
            assert F.mul(a, b) == (a * b) % p
            if b:
                assert F.mul(F.div(a, b), b) == a


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustively(q):
    F = fq(q)
    E = list(F.elements())
    for a in E:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in E:
            assert F.mul(a, b) == F.mul(b, a)
            for c in E[:4]:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


@pytest.mark.parametrize("q", ORDERS)
def test_unit_group_is_cyclic_with_dlog(q):
    F = fq(q)
    seen = {F.exp(k) for k in range(q - 1)}
    assert seen == set(F.units())
    for a in F.units():
        assert F.exp(F.dlog(a)) == a


@pytest.mark.parametrize("q", [4, 8, 9])
def test_frobenius_is_additive(q):
    F = fq(q)
    p = F.p
    for a in F.elements():
        for b in F.elements():
            assert F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p))


@pytest.mark.parametrize("q,d", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (4, 2)])
def test_irreducible_counts_match_necklace_formula(q, d):
    F = fq(q)
    irr = irreducibles(F, d)
    assert len(irr) == sum(_mobius(d // e) * q**e for e in range(1, d + 1) if d % e == 0) // d
    # oracle: a polynomial is reducible iff it is a product of two lower-degree monics
    products = set()
    for k in range(1, d // 2 + 1):
        for a in _monics(F, k):
            for b in _monics(F, d - k):
                products.add(tuple(poly_mul(F, a, b)))
    assert set(map(tuple, irr)) == set(map(tuple, _monics(F, d))) - products
    assert all(is_irreducible(F, f) for f in irr)


def _mobius(m):
    out, k = 1, 2
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            out = -out
        k += 1
    return -out if m > 1 else out


def _monics(F, d):
    from hicft.gf import monic_polys

    return [tuple(f) for f in monic_polys(F, d)]


def test_fq_ops():
    F = fq(7)
    assert fq_ops(F, 3, 5) == {"add": 1, "mul": 1, "div": 2, "pow": 5}
    assert fq_ops(F, 3, 0)["div"] is None


@given(
    st.integers(-3, 3),
    st.lists(st.integers(0, 4), min_size=1, max_size=6).filter(lambda c: c[0] != 0),
)
def test_laurent_inverse(v, coeffs):
    K = LaurentField(fq(5), "t", 10)
    x = K.series(v, coeffs)
    y = x * x.inverse()
    assert y.agrees_with(K.one())
    assert K.valuation(x.inverse()) == -v


@given(
    st.lists(st.integers(0, 2), min_size=1, max_size=5),
    st.lists(st.integers(0, 2), min_size=1, max_size=5),
)
def test_laurent_product_matches_polynomial_product(a, b):
    F = fq(3)
    K = LaurentField(F, "t", 12)
    pa, pb = K.from_poly(a), K.from_poly(b)
    prod = poly_mul(F, a, b)
    got = pa * pb
    for k in range(10):
        want = prod[k] if k < len(prod) else 0
        if got.is_zero:
            assert want == 0
        else:
            assert got.coefficient(k) == want


def test_laurent_parse_roundtrip():
    K = LaurentField(fq(9), "t", 8)
    x = K.series(-1, [1, 2, 0, 1])
    assert parse_laurent(K, x.format()).agrees_with(x)
    with pytest.raises(ParseError):
        parse_laurent(K, "t^-1 + 2")


def test_unit_decompose():
    K = LaurentField(fq(3), "t", 8)
    v, u = unit_decompose(K.series(2, [2, 1]))
    assert v == 2 and u.residue == 2
    with pytest.raises(ZeroElement):
        unit_decompose(K.zero())
    ops = laurent_ops(K.series(0, [1, 1]), K.zero())
    assert ops["div"] is None


def test_bilaurent_tower_by_hand():
    F = fq(5)
    e = parse_bilaurent(F, "s^2*t^-1*(1+s+t)/(2+t)")
    v, lead = e.tower("t", 6)
    assert v == -1
    # (1 + s + t)/(2 + t) at t = 0 is (1 + s)/2 = 3 + 3s
    assert lead.valuation == 2 and lead.coefficient(2) == 3 and lead.coefficient(3) == 3
    v, lead = e.tower("s", 6)
    assert v == 2 and lead.valuation == -1
    # next t-coefficient: 1/2 - (1 + s)/4 = 4 + s
    assert e.expand(2, 4, "t")[1][:2] == [4, 1]


def test_bilaurent_arithmetic():
    F = fq(3)
    K = TwoLocalField(F)
    a = parse_bilaurent(F, "s^1*t^2*(1+s)")
    b = parse_bilaurent(F, "s^-1*t^0*(2+t)/(1+s)")
    assert (a * b * (a * b).inverse()).is_one()
    assert K.valuation(a * b) == 2
    assert parse_element(K, a.format()).equals(a)
    with pytest.raises(ParseError):
        parse_bilaurent(F, "0")
