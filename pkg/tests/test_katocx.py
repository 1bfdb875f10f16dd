import random
from itertools import combinations

import pytest

from hicft import katocx
from hicft.errors import DegreeOutOfRange, FaceMapIncompatible, ParseError
from oracles import random_point_configuration, simplicial_betti


def random_configuration(rnd):
    k, inter, simplices = random_point_configuration(rnd)
    return katocx.SNCConfig.build(k, inter), simplices


def test_random_configurations_against_simplicial_homology():
    rnd = random.Random(7)
    for _ in range(40):
        cfg, simplices = random_configuration(rnd)
        for p in (2, 3, 5):
            cx = katocx.build_nerve_complex(cfg, p)
            betti = simplicial_betti(simplices, p)
            for a, b in enumerate(betti):
                assert katocx.homology(cx, a).invariant_factors().factors == (p,) * b


def components_and_cycles(k, edges):
    parent = list(range(k + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    comps = len({find(i) for i in range(1, k + 1)})
    return comps, len(edges) - k + comps


@pytest.mark.parametrize("n", [4, 6])
def test_graph_configurations_composite_modulus(n):
    rnd = random.Random(n)
    for _ in range(20):
        k = rnd.randint(2, 6)
        edges = [e for e in combinations(range(1, k + 1), 2) if rnd.random() < 0.5]
        cx = katocx.build_nerve_complex(katocx.graph_config(k, edges), n)
        b0, b1 = components_and_cycles(k, edges)
        assert katocx.homology(cx, 0).invariant_factors().factors == (n,) * b0
        h1 = katocx.homology(cx, 1).invariant_factors().factors if edges else ()
        assert h1 == (n,) * b1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_triangle(n):
    cx = katocx.build_nerve_complex(katocx.triangle(), n)
    assert katocx.homology(cx, 0).invariant_factors().factors == (n,)
    assert katocx.homology(cx, 1).invariant_factors().factors == (n,)
    assert katocx.euler_characteristic(cx) == 0


def test_triple_point_fills_the_triangle():
    cfg = katocx.SNCConfig.build(3, [((1, 2), 1), ((1, 3), 1), ((2, 3), 1), ((1, 2, 3), 1)])
    cx = katocx.build_nerve_complex(cfg, 5)
    assert katocx.homology(cx, 1).is_trivial()
    assert katocx.homology(cx, 2).is_trivial()
    assert katocx.euler_characteristic(cx) == 1


def test_two_curves_meeting_twice():
    cfg = katocx.SNCConfig.build(2, [((1, 2), 2)])
    cx = katocx.build_nerve_complex(cfg, 5)
    assert cx.rank(1) == 2
    assert katocx.homology(cx, 1).invariant_factors().factors == (5,)


def test_explicit_face_maps():
    # two components meeting along two curves, each pair of triple-point branches
    cfg = katocx.SNCConfig.build(
        3,
        [((1, 2), 2), ((1, 3), 1), ((2, 3), 1), ((1, 2, 3), 2)],
        [((1, 2, 3), 3, [0, 1])],
    )
    cx = katocx.build_nerve_complex(cfg, 3)
    assert [cx.rank(a) for a in range(3)] == [3, 4, 2]
    assert katocx.euler_characteristic(cx) == 1


def test_ambiguous_face_map_is_rejected():
    with pytest.raises(FaceMapIncompatible):
        katocx.SNCConfig.build(3, [((1, 2), 2), ((1, 3), 1), ((2, 3), 1), ((1, 2, 3), 1)])


def test_nonempty_cell_over_empty_face_is_rejected():
    with pytest.raises(FaceMapIncompatible):
        katocx.SNCConfig.build(3, [((1, 2), 1), ((1, 2, 3), 1)])


def test_malformed_input():
    with pytest.raises(ParseError):
        katocx.SNCConfig.build(0)
    with pytest.raises(ParseError):
        katocx.SNCConfig.build(2, [((1, 3), 1)])
    with pytest.raises(FaceMapIncompatible):
        katocx.SNCConfig.build(2, [((1, 2), 2)], [((1, 2), 1, [0, 5])])


def test_d_squared_vanishes():
    rnd = random.Random(3)
    for _ in range(20):
        cfg, _ = random_configuration(rnd)
        cx = katocx.build_nerve_complex(cfg, 6)
        for a in range(2, cx.top_degree + 1):
            prod = cx.matrix(a - 1) @ cx.matrix(a)
            assert all(x == 0 for row in prod.tolist() for x in row)


def test_degree_out_of_range():
    cx = katocx.build_nerve_complex(katocx.triangle(), 2)
    with pytest.raises(DegreeOutOfRange):
        katocx.homology(cx, 3)
    assert katocx.homology(cx, 2).is_trivial()


def test_json_roundtrip(tmp_path):
    cfg = katocx.SNCConfig.build(2, [((1, 2), 2)])
    assert katocx.SNCConfig.from_json(cfg.to_json()) == cfg
    path = tmp_path / "cfg.json"
    import json

    path.write_text(json.dumps(cfg.to_json()))
    assert katocx.SNCConfig.from_json(path) == cfg


def test_obstruction_reports():
    good = katocx.obstruction_report(katocx.single_component(), 3)
    assert (good.h1, good.h2) == ((), ())
    assert "isomorphism" in good.render()
    tri = katocx.obstruction_report(katocx.triangle(), 3)
    assert tri.h1 == (3,) and tri.h2 == ()
    assert tri.to_json()["H1"] == [3]
    assert katocx.obstruction_report(katocx.chain_of(4), 2).h1 == ()


def test_hollow_tetrahedron_has_h2():
    pairs = [(e, 1) for e in combinations(range(1, 5), 2)]
    triples = [(t, 1) for t in combinations(range(1, 5), 3)]
    rep = katocx.obstruction_report(katocx.SNCConfig.build(4, pairs + triples), 2)
    assert (rep.h1, rep.h2) == ((), (2,))
    assert "kernel" in rep.render()


def test_euler_characteristic_matches_homology_for_prime_n():
    rnd = random.Random(11)
    for _ in range(20):
        cfg, _ = random_configuration(rnd)
        for p in (2, 3, 5):
            cx = katocx.build_nerve_complex(cfg, p)
            dims = [len(katocx.homology(cx, a).invariant_factors().factors) for a in range(cx.top_degree + 1)]
            assert katocx.euler_characteristic(cx) == sum((-1) ** a * d for a, d in enumerate(dims))
