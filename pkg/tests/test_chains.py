import pytest

from hicft import chains as c
from hicft.bilaurent import TwoLocalField
from hicft.curve import finite_place, infinity
from hicft.errors import (
    AnalyticSplittingUnsupported,
    NotMaximalChain,
    ParseError,
    UnsupportedInput,
    UnsupportedPrime,
)
from hicft.gf import GF, fq
from hicft.laurent import LaurentField


def toy_surface():
    """A closed point m on two curves C1, C2 inside a surface with generic point e."""
    return c.PosetModel(
        {"m": 0, "C1": 1, "C2": 1, "e": 2},
        {"e": ["C1", "C2"], "C1": ["m"], "C2": ["m"]},
    )


def test_toy_surface_chain_kinds_by_hand():
    P = toy_surface()
    D = ["C1"]
    kinds = {tuple(p.ident for p in ch): set(c.classify_chain(P, ch, D)) for ch in c.all_chains(P)}
    # chains through m, C1 and e: the maximal Parshin chain on the pair
    assert kinds[("m", "C1", "e")] == {"Chain", "Parshin", "ParshinOnPair"}
    # C2 is outside D, so (m, C2) ends in U
    assert kinds[("m", "C2")] == {"Chain", "Parshin", "ParshinOnPair"}
    assert kinds[("m", "C2", "e")] == {"Chain", "Parshin"}
    # skipping index 1: (m, e) is a Q-chain and, with two points, a Q°-chain
    assert kinds[("m", "e")] == {"Chain", "QChain", "QoChain"}
    # single points: m lies in D, e does not
    assert kinds[("e",)] == {"Chain"}
    assert kinds[("C2",)] == {"Chain", "QChain"}
    assert "ParshinOnPair" not in kinds[("m",)]
    assert len(kinds) == 11


def test_dimension_axiom():
    P = toy_surface()
    assert c.dimension_axiom_holds(P, P.codim_one_pairs())
    bad = c.PosetModel({"a": 0, "b": 2}, {"b": ["a"]})
    assert not c.dimension_axiom_holds(bad, bad.codim_one_pairs())


def test_poset_divisor_check():
    with pytest.raises(UnsupportedPrime):
        toy_surface().check_divisor(["C3"])


def test_curve_divisor_parsing():
    F = fq(3)
    D = c.parse_curve_divisor(F, "2[0]+[inf]+[t^2+1]")
    assert D.format() == "2[0]+[inf]+[t^2 + 1]"
    assert D.reduced().format() == "[0]+[inf]+[t^2 + 1]"
    assert D.multiplicity(infinity(F)) == 1
    assert c.parse_curve_divisor(F, "").is_empty()
    assert c.parse_curve_divisor(F, "0").is_empty()
    assert D.reduced() <= D and not D <= D.reduced()
    assert c.divisor_from_json(c.CurveModel(F), D.to_json()) == D
    with pytest.raises(ParseError):
        c.parse_curve_divisor(F, "2[0")


def test_curve_divisor_rejects_reducible_support():
    F = fq(3)
    with pytest.raises(UnsupportedInput):
        c.parse_curve_divisor(F, "[t^2-1]")


def test_surface_divisor_parsing():
    F = fq(5)
    st = c.parse_surface_divisor(F, "(st)")
    assert st == c.parse_surface_divisor(F, "(s)+(t)")
    assert c.parse_surface_divisor(F, "3(s)").format() == "3(s)"
    with pytest.raises(UnsupportedPrime):
        c.LocalSurfaceModel(F).check_divisor(c.parse_surface_divisor(F, "(s^2-t^3)"))


def test_curve_chain_templates():
    F = fq(3)
    M = c.CurveModel(F)
    D = c.parse_curve_divisor(F, "2[0]+[inf]")
    recs = c.enumerate_chain_types(M, D)
    assert [r.format() for r in recs] == ["(x in U)", "(0, eta)", "(inf, eta)", "(eta)"]
    assert [r.kind for r in recs] == ["ParshinOnPair"] * 3 + ["QChain"]
    assert all(c.check_record(r, D) for r in recs)
    # the U family instantiated at a place outside D
    inst = c.instantiate(recs[0], finite_place(F, (1, 1)))
    assert c.check_record(inst, D)
    assert c.residue_ring_at(inst).order == 3
    bad = c.instantiate(recs[0], finite_place(F, (0, 1)))
    assert not c.check_record(bad, D)


def test_local_surface_chain_templates():
    F = fq(3)
    S = c.LocalSurfaceModel(F)
    recs = c.enumerate_chain_types(S, c.parse_surface_divisor(F, "(st)"))
    assert [r.format() for r in recs] == [
        "(m, (s), eta)",
        "(m, (t), eta)",
        "(m, x in U)",
        "(x in U)",
        "(m, eta)",
    ]
    assert [r.kind for r in recs][-1] == "QoChain"
    empty = c.enumerate_chain_types(S, c.parse_surface_divisor(F, ""))
    assert [r.format() for r in empty] == ["(m)", "(x in U)"]


def test_residue_rings():
    F = fq(3)
    M = c.CurveModel(F)
    D = c.parse_curve_divisor(F, "[0]+[t^2+1]")
    recs = c.enumerate_chain_types(M, D)
    K0 = c.residue_ring_at(recs[1], 8)
    assert isinstance(K0, LaurentField) and K0.coeff.order == 3
    K2 = c.residue_ring_at(recs[2], 8)
    assert K2.coeff.order == 9
    with pytest.raises(AnalyticSplittingUnsupported):
        c.residue_ring_at(recs[-1])
    S = c.LocalSurfaceModel(F)
    E = c.parse_surface_divisor(F, "(st)")
    srecs = c.enumerate_chain_types(S, E)
    K = c.residue_ring_at(srecs[0])
    assert isinstance(K, TwoLocalField) and K.outer == "s"
    with pytest.raises(AnalyticSplittingUnsupported):
        c.residue_ring_at(srecs[-1])


def test_multiplicity_of_maximal_chains():
    F = fq(5)
    M = c.CurveModel(F)
    D = c.parse_curve_divisor(F, "3[0]+2[inf]")
    recs = c.enumerate_chain_types(M, D)
    assert [c.multiplicity_D(r, D) for r in recs[1:3]] == [3, 2]
    with pytest.raises(NotMaximalChain):
        c.multiplicity_D(recs[-1], D)


def test_curated_primes():
    F = fq(5)
    primes = c.curated_primes(F, 2)
    assert len(primes) == 30
    assert primes[:2] == [c.parse_local_prime(F, "s"), c.parse_local_prime(F, "t")]
    assert len({p.key() for p in primes}) == 30
    assert primes == sorted(primes)
    kinds = {p.kind for p in primes}
    assert kinds == {"s", "t", "graph_t", "graph_s"}


def test_prime_classification():
    F = fq(5)
    lin = c.parse_local_prime(F, "s-2*t")
    assert lin.kind == "graph_t"
    assert c.parse_local_prime(F, "s-t^2").kind == "graph_s"
    odd = c.parse_local_prime(F, "s^2-t^3")
    assert odd.kind == "other" and not odd.supported
    with pytest.raises(AnalyticSplittingUnsupported):
        odd.parametrization()


@pytest.mark.parametrize("text", ["t-s-s^2", "s-t^2", "s-3*t", "s", "t"])
def test_parametrization_lies_on_the_prime(text):
    F = fq(5)
    p = c.parse_local_prime(F, text)
    S, T = p.parametrization()
    # substitute s = S(x), t = T(x) into the defining polynomial, as power series in x
    N = 8
    poly = p.polynomial()

    def series(coeffs):
        return [coeffs[i] if i < len(coeffs) else 0 for i in range(N)]

    def mul(a, b):
        out = [0] * N
        for i, x in enumerate(a):
            for j, y in enumerate(b[: N - i]):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
        return out

    Ss, Ts = series(S), series(T)
    total = [0] * N
    for (i, j), coef in poly:
        term = [coef] + [0] * (N - 1)
        for _ in range(i):
            term = mul(term, Ss)
        for _ in range(j):
            term = mul(term, Ts)
        total = [F.add(a, b) for a, b in zip(total, term)]
    assert total == [0] * N


def test_gf_is_field_type():
    assert isinstance(fq(4), GF)
