import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from syswork import exact_linear as el

small = st.integers(-4, 4)


def matrices(rows=(1, 5), cols=(1, 6), elems=small):
    return st.integers(*rows).flatmap(
        lambda r: st.integers(*cols).flatmap(
            lambda c: st.lists(st.lists(elems, min_size=c, max_size=c), min_size=r, max_size=r)))


def _row_space_contains(M, v, ncols):
    try:
        el.solve(el.transpose(M, ncols), v, len(M))
        return True
    except el.NotInSpan:
        return False


def test_rref_row_space_matches():
    rng = random.Random(3)
    M = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(7)] for _ in range(5)]
    R, piv, r = el.rref(M)
    assert r == el.rank(M)
    for row in R[:r]:
        assert _row_space_contains(M, row, 7)
    for row in M:
        assert _row_space_contains(R[:r], row, 7)


@given(matrices())
def test_rref_idempotent(M):
    R, piv, r = el.rref(M)
    assert el.rref(R) == (R, piv, r)


@given(matrices())
def test_rank_transpose(M):
    assert el.rank(M) == el.rank(el.transpose(M), len(M))


@given(matrices())
def test_nullspace(M):
    n = len(M[0])
    N = el.nullspace(M, n)
    assert len(N) == n - el.rank(M)
    for v in N:
        assert not any(el.matvec(M, v))


def test_smith_example():
    snf = el.smith_normal_form([[2, 4], [4, 8]])
    assert snf.diagonal == (2, 0)
    assert el.matmul(el.matmul(snf.U, [[2, 4], [4, 8]]), snf.V) == tuple(tuple(Fraction(x) for x in r) for r in snf.D)


def _minors_gcd(M, k):
    g = 0
    rows, cols = len(M), len(M[0])
    for I in itertools.combinations(range(rows), k):
        for J in itertools.combinations(range(cols), k):
            g = math.gcd(g, int(el.det([[M[i][j] for j in J] for i in I])))
    return g


@given(matrices(rows=(1, 4), cols=(1, 4)))
@settings(max_examples=60)
def test_smith_invariants(M):
    snf = el.smith_normal_form(M)
    UMV = el.matmul(el.matmul(snf.U, M), snf.V)
    assert [[int(x) for x in r] for r in UMV] == [list(r) for r in snf.D]
    assert abs(el.det(snf.U)) == 1 and abs(el.det(snf.V)) == 1
    diag = [x for x in snf.diagonal if x]
    assert all(x > 0 for x in diag)
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
    # determinantal divisors
    prod = 1
    for k, d in enumerate(diag, 1):
        prod *= d
        assert _minors_gcd(M, k) == prod


@given(matrices(rows=(1, 4), cols=(6, 6)), matrices(rows=(1, 4), cols=(6, 6)))
@settings(max_examples=60)
def test_subspace_dimension_formula(A, B):
    U, V = el.Subspace.span(A, 6), el.Subspace.span(B, 6)
    assert U.dim + V.dim == (U + V).dim + U.intersect(V).dim
    I = U.intersect(V)
    assert U.contains_subspace(I) and V.contains_subspace(I)


@given(matrices(rows=(1, 3), cols=(6, 6)), matrices(rows=(1, 3), cols=(6, 6)),
       st.lists(small, min_size=6, max_size=6))
@settings(max_examples=60)
def test_sum_membership_matches_solve(A, B, x):
    S = el.Subspace.span(A, 6) + el.Subspace.span(B, 6)
    assert (x in S) == _row_space_contains(list(A) + list(B), x, 6)


def test_subspace_canonical():
    a = el.Subspace.span([[1, 2, 0], [0, 1, 1]], 3)
    b = el.Subspace.span([[1, 3, 1], [2, 5, 1], [1, 2, 0]], 3)
    assert a == b


def test_solve_and_not_in_span():
    M = [[1, 0], [0, 1], [1, 1]]
    assert el.solve(M, [1, 2, 3], 2) == (1, 2)
    with pytest.raises(el.NotInSpan):
        el.solve(M, [1, 2, 4], 2)


def test_inverse_and_ldl():
    G = [[4, 2, 0], [2, 3, 1], [0, 1, 2]]
    Gi = el.inverse(G)
    assert el.matmul(G, Gi) == tuple(tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3))
    assert el.leading_minors_positive(G)
    assert not el.leading_minors_positive([[1, 2], [2, 1]])
    L, D = el.ldl(G)
    LD = [[L[i][j] * D[j] for j in range(3)] for i in range(3)]
    assert el.matmul(LD, el.transpose(L)) == el.as_matrix(G)


def test_hermite_and_lattice_basis():
    H = el.hermite_rows([[2, 4, 6], [1, 1, 1]], 3)
    assert el.Subspace.span(H, 3) == el.Subspace.span([[2, 4, 6], [1, 1, 1]], 3)
    B = el.lattice_basis([[2, 0], [0, 2], [1, 1]], 2)
    assert abs(el.det(B)) == 2


def test_integer_kernel():
    K = el.integer_kernel([[2, 4, 6]], 3)
    assert len(K) == 2
    for v in K:
        assert 2 * v[0] + 4 * v[1] + 6 * v[2] == 0
