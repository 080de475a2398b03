from fractions import Fraction
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import rank_oracle
from wlpkit.exactfield import GF, QQ
from wlpkit.exactla import (ExactMatrix, kernel_basis, kernel_matrix, left_kernel_matrix, rank, row_space_intersection,
                            rref, solve)
from wlpkit.gorenstein import catalecticant
from wlpkit.multipoly import DualForm


def ci233_mult_matrix(F, alpha, beta, a1, a2, a3, a4):
    """x^2 + a1 xy + a2 xz + a3 y^2 + a4 yz with f=y^3, g=z^3: multiplication by alpha x + beta y, degree 2 -> 3."""
    return ExactMatrix.from_rows(F, [
        [beta - alpha * a1, -alpha * a2, 0, -alpha * a4, 0, 0],
        [0, beta - alpha * a1, -alpha * a2, -alpha * a3, -alpha * a4, 0],
        [alpha, 0, 0, 0, 0, 0],
        [0, alpha, 0, beta, 0, 0],
        [0, 0, alpha, 0, beta, 0],
    ])


def test_identity_rank():
    assert rank(ExactMatrix.identity(GF(5), 3)) == 3


def test_char3_multiplication_matrix_full_rank():
    assert rank(ci233_mult_matrix(GF(3), 1, 0, 0, 1, 0, 1)) == 5


@pytest.mark.parametrize("alpha,beta", [(a, b) for a in range(3) for b in range(3)])
def test_char3_multiplication_matrix_degenerate(alpha, beta):
    assert rank(ci233_mult_matrix(GF(3), alpha, beta, 0, 0, 0, 0)) <= 4
    assert rank(ci233_mult_matrix(GF(3), alpha, beta, 2, 0, 1, 0)) <= 4


def test_kernel_examples():
    assert len(kernel_basis(ExactMatrix.zeros(GF(7), 2, 3))) == 3
    basis = kernel_basis(ExactMatrix.from_rows(GF(2), [[1, 1]]))
    assert [list(v) for v in basis] == [[1, 1]]


def test_catalecticant_kernel_of_x5():
    F = DualForm(GF(101), 3, 5, {(5, 0, 0): 1})
    C = catalecticant(F, 2)
    assert (C.rows, C.cols) == (6, 10)
    assert C.rows - rank(C) == 5


def test_row_space_intersection():
    F = GF(5)
    A = ExactMatrix.from_rows(F, [[1, 0, 0], [0, 1, 0]])
    B = ExactMatrix.from_rows(F, [[0, 1, 0], [0, 0, 1]])
    assert row_space_intersection(A, B).tolist() == [[0, 1, 0]]
    assert row_space_intersection(A, A).rows == 2
    C = ExactMatrix.from_rows(F, [[0, 0, 1]])
    assert row_space_intersection(A, C).rows == 0


def test_solve_consistent_and_inconsistent():
    F = QQ
    M = ExactMatrix.from_rows(F, [[1, 2], [2, 4]])
    assert solve(M, [Fraction(1), Fraction(3)]) is None
    x = solve(M, [Fraction(1), Fraction(2)])
    assert M.apply(x) == [1, 2]


def test_rref_shape():
    M = ExactMatrix.from_rows(GF(7), [[0, 2, 4], [1, 1, 1], [1, 3, 5]])
    R, r, piv = rref(M)
    assert r == 2 and piv == [0, 1]
    assert R.tolist()[:2] == [[1, 0, 6], [0, 1, 2]]


def small_matrices(max_dim=6, lo=-4, hi=4):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=80, deadline=None)
@given(small_matrices(), st.sampled_from(["Q", "GF(2)", "GF(3)", "GF(101)"]))
def test_rank_matches_sympy(rows, name):
    F = QQ if name == "Q" else GF(int(name[3:-1]))
    M = ExactMatrix.from_rows(F, [[F.coerce(v) for v in r] for r in rows])
    assert rank(M) == rank_oracle(rows, name)


@settings(max_examples=60, deadline=None)
@given(small_matrices(), st.sampled_from(["GF(3)", "GF(31991)"]))
def test_kernel_is_annihilated(rows, name):
    F = GF(int(name[3:-1]))
    M = ExactMatrix.from_rows(F, rows)
    K = kernel_matrix(M)
    assert K.rows == M.cols - rank(M)
    if K.rows:
        assert (M @ K.T).is_zero()
    L = left_kernel_matrix(M)
    if L.rows:
        assert (L @ M).is_zero()


def test_extension_field_kernel():
    F = GF(3, 2)
    rng = random.Random(1)
    rows = [[F.random_element(rng) for _ in range(5)] for _ in range(3)]
    M = ExactMatrix.from_rows(F, rows)
    K = kernel_matrix(M)
    assert K.rows == 5 - rank(M)
    assert (M @ K.T).is_zero()


def test_numpy_path_large_prime_no_overflow():
    p = 2_147_483_629  # below 2^31
    F = GF(p)
    A = ExactMatrix.from_numpy(F, np.array([[p - 1, p - 2], [p - 3, p - 4]], dtype=np.int64))
    # det = (p-1)(p-4) - (p-2)(p-3) = -2 mod p, nonzero
    assert rank(A) == 2
