from hicft import rng
from hicft.gf import fq
from hicft.laurent import LaurentField


def test_trial_streams_are_reproducible_and_independent():
    a = [g.integers(0, 2**32) for g in rng.trial_generators(99, 4)]
    b = [g.integers(0, 2**32) for g in rng.trial_generators(99, 4)]
    assert a == b
    assert len(set(a)) == 4
    # trial i does not depend on how many trials are requested
    c = [g.integers(0, 2**32) for g in rng.trial_generators(99, 2)]
    assert c == a[:2]


def test_samplers_produce_valid_objects():
    F = fq(9)
    K = LaurentField(F, "t", 8)
    g = rng.generator(5)
    for _ in range(50):
        assert 1 <= rng.random_unit(F, g) < 9
        p = rng.random_poly(F, 3, g, monic=True)
        assert p[-1] == 1 and len(p) <= 4
        f = rng.random_function(F, 3, g)
        assert not f.is_constant() or f.format()
        x = rng.random_laurent(K, g)
        assert -3 <= K.valuation(x) <= 3
        assert K.valuation(rng.random_laurent_unit(K, g)) == 0
        e = rng.random_bilaurent(F, g, vrange=0)
        assert e.tower("t", 4)[0] == 0 and e.tower("s", 4)[0] == 0
