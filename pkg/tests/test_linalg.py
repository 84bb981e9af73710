from hypothesis import given, settings
from hypothesis import strategies as st

from postnikov.linalg import (AbelianGroup, determinant, elementary_divisors, identity, invariant_factors,
                              kernel_basis, matmul, smith_normal_form, solve)

matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_form_is_unimodular_and_divisible(M):
    S = smith_normal_form(M)
    assert matmul(matmul(S.U, M), S.V) == S.D
    assert abs(determinant(S.U)) == 1 and abs(determinant(S.V)) == 1
    assert matmul(S.U, S.U_inv) == identity(len(M))
    assert matmul(S.V, S.V_inv) == identity(len(M[0]))
    d = [x for x in S.diagonal if x]
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_sparse_divisors_match_dense_smith_form(M):
    cols = [{i: M[i][j] for i in range(len(M)) if M[i][j]} for j in range(len(M[0]))]
    sparse = elementary_divisors(cols)
    dense = [x for x in smith_normal_form(M).diagonal if x]
    assert len(sparse) == len(dense)
    assert invariant_factors(sparse) == [x for x in dense if x != 1]


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_kernel_basis_is_annihilated(M):
    n = len(M[0])
    for v in kernel_basis(M, n):
        assert all(sum(M[i][j] * v[j] for j in range(n)) == 0 for i in range(len(M)))


def test_solve_finds_integer_solutions_only():
    M = [[2, 0], [0, 3]]
    assert solve(M, [4, 9], 2) == [2, 3]
    assert solve(M, [1, 0], 2) is None


def test_abelian_group_from_presentation():
    G = AbelianGroup.from_presentation(3, [[2, 0], [0, 4], [0, 0]])
    assert str(G) == "Z + Z/2 + Z/4"
    assert G.order is None
    assert AbelianGroup.from_presentation(2, [[2, 0], [0, 3]]).torsion == (6,)
    assert str(AbelianGroup()) == "0"


def test_big_integers_stay_exact():
    big = 10 ** 30 + 7
    assert smith_normal_form([[big, 0], [0, big * 2]]).diagonal == [big, 2 * big]
