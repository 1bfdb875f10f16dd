from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hicft import chains as c
from hicft import ideles, rng
from hicft.abgroup import PresentedGroup, cokernel
from hicft.curve import RationalFunction, finite_place, infinity, parse_function, places_up_to
from hicft.errors import NotStabilized, UnsupportedPrime, WildCoefficients
from hicft.gf import fq


def curve_group(q, text, n, B=2):
    F = fq(q)
    M = c.CurveModel(F)
    D = c.parse_curve_divisor(F, text)
    return ideles.class_group(ideles.ClassGroupJob(M, D, n, B)), M, D


def structural_ray(q, D, n):
    """``Z/n + (prod_{v in D} k(v)^x / F_q^x) / n``, valid when a degree-one place avoids D."""
    cyc = [q**v.degree - 1 for v in D.support]
    rels = [{i: m} for i, m in enumerate(cyc)]
    if cyc:
        rels.append({i: m // (q - 1) for i, m in enumerate(cyc)})
    tame = PresentedGroup(len(cyc), rels, None)
    orders = list(tame.invariant_factors().factors)
    return PresentedGroup.diagonal([n] + orders, n).invariant_factors().factors


CASES = [
    (3, "", 2),
    (3, "[0]+[inf]", 2),
    (3, "2[0]+[inf]", 2),
    (5, "2[0]", 4),
    (5, "[0]+[inf]", 4),
    (2, "", 3),
    (2, "[t^2+t+1]", 3),
    (3, "[t^2+1]", 4),
    (5, "[1]+[inf]", 2),
]


@pytest.mark.parametrize("q,text,n", CASES)
def test_class_group_matches_both_oracles(q, text, n):
    res, M, D = curve_group(q, text, n)
    assert res.certificate.stable
    assert res.invariants == ideles.ray_class_oracle(q, D, n).invariants
    assert res.invariants.factors == structural_ray(q, D, n)


def test_empty_modulus_is_degree():
    res, M, D = curve_group(5, "", 4)
    assert res.invariants.factors == (4,)
    deg = ideles.degree_map(res)
    assert cokernel(deg).is_trivial()


def test_degree_map_kills_principal_ideles():
    res, M, D = curve_group(3, "2[0]+[inf]", 2)
    deg = ideles.degree_map(res)
    for f in ["t+1", "(t^2+1)/(t+2)", "2*t^2+t+1"]:
        v = res.layout.vector(ideles.q_map_image(f, M, D))
        assert deg.image(v)[0] % 2 == 0


@settings(max_examples=25)
@given(st.integers(0, 2**32))
def test_principal_ideles_are_relations(seed):
    F = fq(3)
    res, M, D = curve_group(3, "[0]+[inf]", 2)
    f = rng.random_function(F, 2, rng.generator(seed))
    v = res.layout.vector(ideles.q_map_image(f, M, D))
    assert res.group.contains_all([v])


def test_iota_and_relations_between_points():
    # [1] - [2] is the divisor of (t-1)/(t-2), a principal idele; with D empty they agree
    F = fq(3)
    res, M, D = curve_group(3, "", 2)
    a = ideles.iota(res, finite_place(F, (2, 1)))
    b = ideles.iota(res, finite_place(F, (1, 1)))
    diff = {k: a.get(k, 0) - b.get(k, 0) for k in set(a) | set(b)}
    assert res.group.contains_all([diff])
    with pytest.raises(UnsupportedPrime):
        # t^3 - t + 1 has degree 3, beyond the bound B = 2
        ideles.iota(res, finite_place(F, (1, 2, 0, 1)))


def test_reduced_divisor_gives_same_group():
    for q, text, n in [(3, "2[0]+[inf]", 2), (5, "3[0]+2[inf]", 4)]:
        big, _, D = curve_group(q, text, n)
        red, _, _ = curve_group(q, D.reduced().format(), n)
        assert big.invariants == red.invariants


def test_transition_map_is_surjective():
    F = fq(5)
    M = c.CurveModel(F)
    big = c.parse_curve_divisor(F, "3[0]+[inf]")
    for small in ["", "[0]", "2[0]+[inf]"]:
        f = ideles.transition_map(M, big, c.parse_curve_divisor(F, small), 4, 2)
        assert cokernel(f).is_trivial()
    with pytest.raises(ValueError):
        ideles.transition_map(M, c.parse_curve_divisor(F, "[0]"), big, 4, 2)


def test_wild_modulus_rejected():
    F = fq(3)
    with pytest.raises(WildCoefficients):
        ideles.ClassGroupJob(c.CurveModel(F), c.parse_curve_divisor(F, ""), 6)


def test_unstable_truncation_is_reported():
    F = fq(3)
    with pytest.raises(NotStabilized) as err:
        ideles.ray_class_oracle(3, c.parse_curve_divisor(F, "2[0]"), 2, degree_bound=1)
    assert err.value.details["stable"] is False
    assert err.value.code == "NOT_STABILIZED"


def test_oracle_bound():
    F = fq(3)
    assert ideles.oracle_bound(c.parse_curve_divisor(F, "")) == 1
    assert ideles.oracle_bound(c.parse_curve_divisor(F, "2[0]+3[inf]")) == 5
    assert ideles.oracle_bound(c.parse_curve_divisor(F, "[t^2+1]")) == 3


# ---------------------------------------------------------------------------
# reciprocity


def test_residues_by_hand():
    F = fq(3)
    f, g = parse_function(F, "t"), parse_function(F, "t-1")
    assert ideles.residue_at(F, f, g, finite_place(F, (0, 1))) == 2
    assert ideles.residue_at(F, f, g, finite_place(F, (2, 1))) == 1
    assert ideles.residue_at(F, f, g, infinity(F)) == 2
    assert ideles.weil_product(F, f, g) == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_weil_reciprocity_random(q):
    F = fq(q)
    for g in rng.trial_generators(q, 30):
        f1, f2 = rng.random_function(F, 3, g), rng.random_function(F, 3, g)
        assert ideles.weil_reciprocity_check(q, f1, f2)


def test_weil_reciprocity_detects_a_broken_product():
    # dropping the place at infinity breaks the product
    F = fq(5)
    f, g = parse_function(F, "t"), parse_function(F, "t-2")
    finite = 1
    for v in places_up_to(F, 1):
        if not v.is_infinite:
            finite = F.mul(finite, ideles.residue_at(F, f, g, v))
    assert finite != 1


def test_local_surface_residues_by_hand():
    assert ideles.local_surface_residues(3, "s", "t") == {"(s)": 1, "(t)": -1}
    assert ideles.local_surface_residues(5, "s^2*t^1*(1+s)", "s^1*t^3*(2+t)") == {
        "(s)": 5,
        "(t)": -5,
    }


@pytest.mark.parametrize("q", [3, 5])
def test_local_surface_reciprocity_random(q):
    F = fq(q)
    for g in rng.trial_generators(100 + q, 30):
        a, b = rng.random_bilaurent(F, g), rng.random_bilaurent(F, g)
        assert ideles.local_surface_reciprocity_check(q, a, b)


# ---------------------------------------------------------------------------
# the local surface


@pytest.mark.parametrize("q,n", [(3, 2), (5, 4), (5, 2), (7, 3)])
@pytest.mark.parametrize("text,extra", [("", 0), ("(t)", 1), ("3(s)", 1), ("(st)", 2)])
def test_local_surface_class_groups(q, n, text, extra):
    F = fq(q)
    M = c.LocalSurfaceModel(F)
    D = c.parse_surface_divisor(F, text)
    B = 1 if q == 7 else 2
    res = ideles.class_group(ideles.ClassGroupJob(M, D, n, B))
    g = gcd(n, q - 1)
    want = PresentedGroup.diagonal([n] + [g] * extra, n).invariant_factors()
    assert res.invariants == want
    assert res.certificate.stable


def test_local_surface_principal_ideles_are_relations():
    F = fq(3)
    M = c.LocalSurfaceModel(F)
    D = c.parse_surface_divisor(F, "(st)")
    res = ideles.class_group(ideles.ClassGroupJob(M, D, 2, 2))
    img = ideles.q_map_image(("s^1*t^2*(1+s)", "s^0*t^1*(2+s+t)"), M, D)
    assert not img.is_zero()
    assert res.group.contains_all([res.layout.vector(img)])


def test_local_surface_rejects_other_divisors():
    F = fq(5)
    M = c.LocalSurfaceModel(F)
    with pytest.raises(UnsupportedPrime):
        ideles.class_group(ideles.ClassGroupJob(M, c.parse_surface_divisor(F, "(s-t^2)"), 2))


def test_idele_element_bookkeeping():
    F = fq(3)
    M = c.CurveModel(F)
    D = c.parse_curve_divisor(F, "[0]")
    x = ideles.q_map_image(RationalFunction.t(F), M, D)
    assert [e["chain"] for e in x.to_json()][0].startswith("(")
    y = ideles.IdeleElement()
    for chain, comp in x.items():
        y.add(chain, comp)
        y.add(chain, -comp)
    assert y.is_zero()
