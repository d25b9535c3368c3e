# tests/test_gf2core.py

"""
GF(2) Linear Algebra Tests

Covers:
- BitMatrix construction and shape validation
- rank and rref on hand-checked matrices, including widths past one word
- rank unchanged by row permutations and appended zero rows
- solve: witnesses and inconsistent systems
- nullspace: basis vectors are annihilated and have the right count
- independent_rows and in_row_span
"""

from __future__ import annotations

import numpy as np
import pytest

from errors import InputError
from gf2core import BitMatrix, independent_rows, in_row_span, nullspace, rank, rref, solve


# ============================================================================
# Construction
# ============================================================================

def test_from_rows_checks_width():
    """Rows of unequal length are rejected."""
    with pytest.raises(InputError):
        BitMatrix.from_rows([[1, 0, 1], [1, 0]])


def test_bits_are_reduced_mod_two_and_frozen():
    """Entries are stored mod 2 and the array is read-only."""
    m = BitMatrix.from_array([[2, 3], [1, 0]])
    assert m.bits.tolist() == [[0, 1], [1, 0]]
    with pytest.raises(ValueError):
        m.bits[0, 0] = 1


def test_transpose_and_identity():
    m = BitMatrix.from_array([[1, 1, 0], [0, 1, 1]])
    assert m.transpose().shape == (3, 2)
    assert m.transpose().transpose() == m
    assert rank(BitMatrix.identity(5)) == 5


# ============================================================================
# Rank and RREF
# ============================================================================

def test_rank_of_dependent_rows():
    """Third row is the sum of the first two."""
    m = BitMatrix.from_array([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]])
    assert rank(m) == 2, f"Expected rank 2, got {rank(m)}"


def test_rank_of_empty_matrices():
    assert rank(BitMatrix.zeros(0, 4)) == 0
    assert rank(BitMatrix.zeros(3, 0)) == 0
    assert rank(BitMatrix.zeros(3, 3)) == 0


def test_rref_is_fully_reduced():
    """Pivot columns carry a single 1 each."""
    m = BitMatrix.from_array([[1, 1, 1], [1, 0, 1], [0, 1, 1]])
    reduced, pivots = rref(m)
    for row, col in enumerate(pivots):
        column = reduced.bits[:, col]
        assert column[row] == 1
        assert int(column.sum()) == 1, f"Pivot column {col} not reduced: {column}"


def test_rank_across_word_boundary():
    """A 3 x 130 matrix whose pivots sit in three different words."""
    bits = np.zeros((3, 130), dtype=np.uint8)
    bits[0, 5] = bits[1, 70] = bits[2, 129] = 1
    bits[2, 5] = 1
    assert rank(BitMatrix.from_array(bits)) == 3


def test_rank_matches_random_full_rank_product():
    """rank(P) for a random invertible P stays full."""
    rng = np.random.default_rng(3)
    lower = np.tril(rng.integers(0, 2, size=(12, 12)), -1) + np.eye(12, dtype=np.int64)
    upper = np.triu(rng.integers(0, 2, size=(12, 12)), 1) + np.eye(12, dtype=np.int64)
    p = (lower @ upper) % 2
    assert rank(BitMatrix.from_array(p)) == 12


@pytest.mark.parametrize("rows, cols", [(7, 12), (20, 70), (40, 130)])
def test_rank_ignores_row_order_and_zero_rows(rows, cols):
    """Shuffling rows or appending zero rows leaves the rank alone."""
    rng = np.random.default_rng(rows * cols)
    bits = rng.integers(0, 2, size=(rows, cols)).astype(np.uint8)
    bits[rows // 2] = bits[0] ^ bits[1]
    expected = rank(BitMatrix.from_array(bits))
    for _ in range(5):
        shuffled = bits[rng.permutation(rows)]
        assert rank(BitMatrix.from_array(shuffled)) == expected
    padded = np.vstack([bits, np.zeros((3, cols), dtype=np.uint8)])
    assert rank(BitMatrix.from_array(padded)) == expected
    assert rank(BitMatrix.from_array(padded[::-1])) == expected


# ============================================================================
# Solve and nullspace
# ============================================================================

def test_solve_returns_a_witness():
    a = BitMatrix.from_array([[1, 1, 0], [0, 1, 1]])
    b = np.array([1, 0], dtype=np.uint8)
    x = solve(a, b)
    assert x is not None
    assert np.array_equal(a.apply(x), b)


def test_solve_inconsistent_system():
    """x0 + x1 = 0 and x0 + x1 = 1 has no solution."""
    a = BitMatrix.from_array([[1, 1], [1, 1]])
    assert solve(a, [0, 1]) is None


def test_solve_rejects_wrong_length():
    with pytest.raises(InputError):
        solve(BitMatrix.identity(3), [1, 0])


def test_nullspace_dimension_and_annihilation():
    """Rank-nullity and a.x = 0 for every basis vector."""
    rng = np.random.default_rng(11)
    a = BitMatrix.from_array(rng.integers(0, 2, size=(6, 15)))
    basis = nullspace(a)
    assert len(basis) == a.cols - rank(a)
    for vec in basis:
        assert not a.apply(vec).any()
    assert rank(BitMatrix.from_rows(basis)) == len(basis)


def test_nullspace_of_empty_row_set_is_everything():
    assert len(nullspace(BitMatrix.zeros(0, 4))) == 4


# ============================================================================
# Row selection
# ============================================================================

def test_independent_rows_skips_dependent_ones():
    m = BitMatrix.from_array([[1, 0, 1], [0, 1, 1], [1, 1, 0], [0, 0, 1]])
    assert independent_rows(m) == [0, 1, 3]


def test_in_row_span():
    m = BitMatrix.from_array([[1, 1, 0, 0], [0, 0, 1, 1]])
    assert in_row_span(m, [1, 1, 1, 1])
    assert not in_row_span(m, [1, 0, 0, 0])
