import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tscc.gf2 import (
    BinaryMatrix,
    BinaryVector,
    column_submatrix,
    nullspace_basis,
    pack_bits,
    rank,
    solve,
    unpack_bits,
)


def naive_rank(a):
    """Plain elimination on a Python list of lists."""
    rows = [list(map(int, r)) for r in a]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [x ^ y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


matrices = st.integers(1, 64).flatmap(
    lambda r: st.integers(1, 64).flatmap(
        lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 1))
    )
)


def test_rank_identity_and_zero():
    assert rank(BinaryMatrix.identity(3)) == 3
    assert rank(BinaryMatrix.zeros(4, 7)) == 0


def test_solve_examples():
    x = solve(BinaryMatrix.identity(3), BinaryVector.from_bits([1, 0, 1]))
    assert x.to_array().tolist() == [1, 0, 1]
    assert solve(BinaryMatrix.zeros(2, 2), BinaryVector.from_bits([1, 0])) is None
    x = solve(BinaryMatrix.from_dense([[1, 1, 0]]), BinaryVector.from_bits([1]))
    assert x.to_array().tolist() == [1, 0, 0]


def test_column_submatrix_examples():
    m = BinaryMatrix.identity(3)
    empty = column_submatrix(m, [])
    assert empty.shape == (3, 0) and rank(empty) == 0
    sub = column_submatrix(m, [0, 2])
    assert sub.shape == (3, 2) and rank(sub) == 2
    with pytest.raises(IndexError):
        column_submatrix(m, [3])


def test_column_submatrix_keeps_listed_order():
    m = BinaryMatrix.from_dense([[1, 0, 0], [0, 1, 1]])
    assert column_submatrix(m, [2, 0]).to_dense().tolist() == [[0, 1], [1, 0]]


def test_nullspace_examples():
    assert nullspace_basis(BinaryMatrix.identity(3)) == []
    assert len(nullspace_basis(BinaryMatrix.zeros(1, 2))) == 2


def test_padding_bits_stay_zero():
    m = BinaryMatrix.from_dense(np.ones((3, 70), dtype=np.uint8))
    assert int(m.data[0, 1]) == (1 << 6) - 1
    v = BinaryVector.from_bits([1] * 65)
    assert int(v.data[1]) == 1


def test_rank_leaves_input_untouched():
    m = BinaryMatrix.from_dense(np.array([[1, 1], [1, 1]], dtype=np.uint8))
    before = m.data.copy()
    rank(m)
    assert np.array_equal(before, m.data)
    assert not m.data.flags.writeable


def test_stabilizer_matrix_rank(code4):
    h = code4.stabilizers.matrix
    assert rank(h) == 14
    assert column_submatrix(h, range(h.cols)) == h


def test_stabilizer_dependencies_dimension(code4):
    # Two relations among the 2|F| listed W1/W2 generators.
    assert len(nullspace_basis(code4.stabilizers.matrix.transpose())) == 2


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rank_matches_naive(a):
    assert rank(BinaryMatrix.from_dense(a)) == naive_rank(a)


@settings(max_examples=100, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_solve_reproduces_rhs(a, rnd):
    m = BinaryMatrix.from_dense(a)
    x_true = np.array([rnd.randint(0, 1) for _ in range(a.shape[1])], dtype=np.uint8)
    b = BinaryVector.from_bits((a.astype(int) @ x_true) % 2)
    x = solve(m, b)
    assert x is not None
    assert m.matvec(x) == b
    assert solve(m, b) == x  # deterministic


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_nullspace_size_and_membership(a):
    m = BinaryMatrix.from_dense(a)
    basis = nullspace_basis(m)
    assert len(basis) == a.shape[1] - rank(m)
    for v in basis:
        assert not m.matvec(v).any()
    if basis:
        assert rank(BinaryMatrix.from_rows(basis, a.shape[1])) == len(basis)


@settings(max_examples=100, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_column_split_subadditive(a, rnd):
    m = BinaryMatrix.from_dense(a)
    cols = [j for j in range(a.shape[1]) if rnd.random() < 0.5]
    rest = [j for j in range(a.shape[1]) if j not in cols]
    assert rank(column_submatrix(m, cols)) + rank(column_submatrix(m, rest)) >= rank(m)
    assert rank(m) <= min(m.rows, m.cols)


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, (5, 130), elements=st.integers(0, 1)))
def test_pack_roundtrip(a):
    assert np.array_equal(unpack_bits(pack_bits(a), 130), a)
