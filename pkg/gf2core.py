# gf2core.py

"""
Exact linear algebra over GF(2).

Every stabilizer decision in tqd (group membership, coset support,
region entropies, the index quotient) bottoms out in one of three
operations here: rank, solve and nullspace.

Rows are packed into little-endian 64-bit words so that a row operation
is a handful of XORs no matter how wide the matrix is. Elimination uses
first-nonzero pivoting and always produces the fully reduced form, so
witnesses are reproducible for a given input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import InputError

logger = logging.getLogger(__name__)

_WORD_BITS = 64
_ONE = np.uint64(1)


# ============================================================================
# Bit packing
# ============================================================================

def _word_count(cols: int) -> int:
    return max(1, -(-cols // _WORD_BITS))


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, words) uint64."""
    rows, cols = bits.shape
    words = _word_count(cols)
    if rows == 0:
        return np.zeros((0, words), dtype="<u8")
    padded = np.zeros((rows, words * _WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").copy()


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols].copy()


def _column(words: np.ndarray, c: int) -> np.ndarray:
    shift = np.uint64(c % _WORD_BITS)
    return (words[:, c // _WORD_BITS] >> shift) & _ONE


def _eliminate(words: np.ndarray, limit: int) -> List[int]:
    """
    Reduce packed rows in place to reduced row echelon form.

    Only the first ``limit`` columns are eligible as pivots; anything to
    the right (an augmented right-hand side) is carried along.
    Returns the pivot columns in row order.
    """
    n_rows = words.shape[0]
    pivots: List[int] = []
    rank = 0
    for c in range(limit):
        if rank == n_rows:
            break
        col = _column(words, c)
        candidates = np.flatnonzero(col[rank:])
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            words[[rank, pivot]] = words[[pivot, rank]]
            col[[rank, pivot]] = col[[pivot, rank]]
        hits = np.flatnonzero(col)
        hits = hits[hits != rank]
        if hits.size:
            words[hits] ^= words[rank]
        pivots.append(c)
        rank += 1
    return pivots


# ============================================================================
# BitMatrix
# ============================================================================

@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Immutable rows x cols matrix over GF(2), stored row-major."""

    rows: int
    cols: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise InputError(f"negative shape ({self.rows}, {self.cols})")
        arr = np.asarray(self.bits, dtype=np.uint8)
        if arr.size != self.rows * self.cols:
            raise InputError(
                f"bit array of size {arr.size} does not match shape "
                f"({self.rows}, {self.cols})"
            )
        arr = (arr.reshape(self.rows, self.cols) & 1).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(array, dtype=np.uint8))
        if np.asarray(array).ndim == 1 and np.asarray(array).size == 0:
            arr = np.zeros((0, 0), dtype=np.uint8)
        return cls(arr.shape[0], arr.shape[1], arr)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: Optional[int] = None) -> "BitMatrix":
        rows = [np.asarray(r, dtype=np.uint8) for r in rows]
        if not rows:
            return cls.zeros(0, cols or 0)
        width = rows[0].size if cols is None else cols
        for r in rows:
            if r.size != width:
                raise InputError(f"row of length {r.size} in a matrix of width {width}")
        return cls(len(rows), width, np.vstack(rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, np.eye(n, dtype=np.uint8))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and \
            bool(np.array_equal(self.bits, other.bits))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> np.ndarray:
        return self.bits[i].copy()

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, self.bits.T)

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.cols != self.cols:
            raise InputError(f"cannot stack width {other.cols} under width {self.cols}")
        return BitMatrix(self.rows + other.rows, self.cols, np.vstack([self.bits, other.bits]))

    def select_columns(self, columns: Sequence[int]) -> "BitMatrix":
        idx = np.asarray(list(columns), dtype=np.int64)
        return BitMatrix(self.rows, idx.size, self.bits[:, idx])

    def apply(self, x) -> np.ndarray:
        """Matrix-vector product a.x over GF(2)."""
        vec = np.asarray(x, dtype=np.int64) & 1
        if vec.size != self.cols:
            raise InputError(f"vector of length {vec.size} for a matrix with {self.cols} columns")
        return ((self.bits.astype(np.int64) @ vec) & 1).astype(np.uint8)

    def combine(self, coefficients) -> np.ndarray:
        """Row combination c.a over GF(2)."""
        coef = np.asarray(coefficients, dtype=np.int64) & 1
        if coef.size != self.rows:
            raise InputError(f"{coef.size} coefficients for {self.rows} rows")
        return ((coef @ self.bits.astype(np.int64)) & 1).astype(np.uint8)


# ============================================================================
# Operations
# ============================================================================

def rref(m: BitMatrix) -> Tuple[BitMatrix, List[int]]:
    """Reduced row echelon form and its pivot columns."""
    words = _pack(np.asarray(m.bits))
    pivots = _eliminate(words, m.cols)
    return BitMatrix(m.rows, m.cols, _unpack(words, m.cols)), pivots


def rank(m: BitMatrix) -> int:
    """Dimension of the row space."""
    if m.rows == 0 or m.cols == 0:
        return 0
    words = _pack(np.asarray(m.bits))
    return len(_eliminate(words, m.cols))


def solve(a: BitMatrix, b) -> Optional[np.ndarray]:
    """
    Find x with a.x = b, or None when b is outside the column span.

    The witness sets every free variable to zero.
    """
    rhs = np.asarray(b, dtype=np.uint8).reshape(-1) & 1
    if rhs.size != a.rows:
        raise InputError(f"right-hand side of length {rhs.size} for a matrix with {a.rows} rows")
    if a.rows == 0:
        return np.zeros(a.cols, dtype=np.uint8)

    augmented = np.zeros((a.rows, a.cols + 1), dtype=np.uint8)
    augmented[:, :a.cols] = a.bits
    augmented[:, a.cols] = rhs
    words = _pack(augmented)
    pivots = _eliminate(words, a.cols)
    reduced = _unpack(words, a.cols + 1)

    r = len(pivots)
    if r < a.rows and reduced[r:, a.cols].any():
        return None

    x = np.zeros(a.cols, dtype=np.uint8)
    for row, col in enumerate(pivots):
        x[col] = reduced[row, a.cols]
    return x


def nullspace(a: BitMatrix) -> List[np.ndarray]:
    """Basis of {x : a.x = 0}, one vector per free column."""
    if a.cols == 0:
        return []
    if a.rows == 0:
        return [np.eye(a.cols, dtype=np.uint8)[i] for i in range(a.cols)]

    reduced, pivots = rref(a)
    pivot_set = set(pivots)
    basis: List[np.ndarray] = []
    for free in range(a.cols):
        if free in pivot_set:
            continue
        vec = np.zeros(a.cols, dtype=np.uint8)
        vec[free] = 1
        for row, col in enumerate(pivots):
            if reduced.bits[row, free]:
                vec[col] = 1
        basis.append(vec)
    return basis


def independent_rows(m: BitMatrix) -> List[int]:
    """
    Indices of a maximal independent subset of rows, chosen greedily in
    order. Used to drop dependent stabilizer generators.
    """
    kept: List[int] = []
    basis = np.zeros((0, _word_count(m.cols)), dtype="<u8")
    pivots: List[int] = []
    packed = _pack(np.asarray(m.bits))
    for i in range(m.rows):
        row = packed[i].copy()
        for b_row, col in zip(basis, pivots):
            if (row[col // _WORD_BITS] >> np.uint64(col % _WORD_BITS)) & _ONE:
                row ^= b_row
        if not row.any():
            continue
        bits = _unpack(row[None, :], m.cols)[0]
        lead = int(np.flatnonzero(bits)[0])
        basis = np.vstack([basis, row[None, :]])
        pivots.append(lead)
        kept.append(i)
    logger.debug("independent_rows: kept %d of %d", len(kept), m.rows)
    return kept


def in_row_span(m: BitMatrix, v) -> bool:
    """True iff v is a GF(2) combination of the rows of m."""
    return solve(m.transpose(), v) is not None
