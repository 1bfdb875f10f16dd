import pytest
from hypothesis import given
from hypothesis import strategies as st

from hicft.abgroup import (
    GroupMap,
    IntMatrix,
    InvariantFactors,
    PresentedGroup,
    cokernel,
    is_isomorphic,
    kernel_basis,
    smith_normal_form,
    subgroup_generated,
)
from hicft.errors import MixedModulus
from oracles import minor_gcd


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r
        )
    )
)


@given(matrices)
def test_snf_diagonal_matches_determinantal_divisors(rows):
    M = IntMatrix(rows)
    U, S, V = smith_normal_form(M)
    assert U @ M @ V == S
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    diag = [S[i, i] for i in range(min(S.rows, S.cols))]
    assert all(d >= 0 for d in diag)
    prod = 1
    for k, d in enumerate(diag, start=1):
        prod *= d
        assert prod == minor_gcd(M, k)


def test_snf_known_example():
    M = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    _, S, _ = smith_normal_form(M)
    assert [S[i, i] for i in range(3)] == [2, 6, 12]


def test_invariant_factors_normalize_cyclic_orders():
    assert InvariantFactors.from_cyclic_orders([4, 6]).factors == (2, 12)
    assert InvariantFactors.from_cyclic_orders([1, 1]).is_trivial()
    assert InvariantFactors.from_cyclic_orders([3, 5]).factors == (15,)


def test_presented_group_with_modulus():
    # Z/12 generated by e with 8e = 0 gives Z/4
    G = PresentedGroup(1, [{0: 8}], 12)
    assert G.invariant_factors().factors == (4,)
    H = PresentedGroup.diagonal([2, 3], 6)
    assert H.invariant_factors().factors == (6,)
    assert PresentedGroup.trivial(5).is_trivial()


def test_free_part_without_modulus():
    G = PresentedGroup(3, [{0: 2, 1: 4}], None)
    inv = G.invariant_factors()
    assert inv.factors == (2,) and inv.free_rank == 2
    assert inv.order() is None


def test_mixed_modulus_comparison_raises():
    with pytest.raises(MixedModulus):
        is_isomorphic(PresentedGroup.diagonal([3], 3), PresentedGroup(1, [{0: 3}], None))


def test_direct_sum_and_relations():
    G = PresentedGroup.cyclic(4).direct_sum(PresentedGroup.cyclic(4))
    assert G.invariant_factors().factors == (4, 4)
    assert G.with_relations([{0: 1, 1: -1}]).invariant_factors().factors == (4,)
    assert G.contains_all([{0: 4}, {1: 8}])
    assert not G.contains_all([{0: 2}])


@given(matrices)
def test_kernel_basis_spans_kernel(rows):
    M = IntMatrix(rows)
    ker = kernel_basis(M)
    for v in ker:
        assert all(sum(M[i, j] * v[j] for j in range(M.cols)) == 0 for i in range(M.rows))
    # rank-nullity over Q
    _, S, _ = smith_normal_form(M)
    rank = sum(1 for i in range(min(S.rows, S.cols)) if S[i, i])
    assert len(ker) == M.cols - rank


def test_cokernel_of_multiplication():
    Z12 = PresentedGroup.cyclic(12)
    f = GroupMap(Z12, Z12, IntMatrix([[3]]))
    assert cokernel(f).invariant_factors().factors == (3,)


def test_group_map_rejects_ill_defined_maps():
    from hicft.errors import HicftError

    with pytest.raises(HicftError):
        GroupMap(PresentedGroup.cyclic(2), PresentedGroup.cyclic(3), IntMatrix([[1]]))


def test_subgroup_generated():
    H = subgroup_generated([4, 6], [[2, 0], [0, 3]])
    assert H.invariant_factors().factors == (2, 2)
    H = subgroup_generated([12], [[4], [6]])
    assert H.invariant_factors().factors == (6,)
