"""Bit-packed dense linear algebra over GF(2).

Rows are stored as arrays of little-endian ``uint64`` words: column ``j`` lives
in word ``j // 64`` at bit ``j % 64``. Padding bits past the last column are
always zero. Elimination kernels are compiled with numba.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

WORD_BITS = 64


def num_words(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words."""
    bits = np.asarray(bits)
    cols = bits.shape[-1]
    nw = num_words(cols)
    if nw == 0:
        return np.zeros(bits.shape[:-1] + (0,), dtype=np.uint64)
    padded = np.zeros(bits.shape[:-1] + (nw * WORD_BITS,), dtype=np.uint8)
    padded[..., :cols] = bits & 1 if bits.dtype != np.bool_ else bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a uint8 array."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    as_bytes = words.view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return bits[..., :cols]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class BinaryVector:
    """Immutable bit-packed vector over GF(2)."""

    length: int
    data: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _frozen(self.data))
        if self.data.shape != (num_words(self.length),):
            raise ValueError("word count does not match length")

    @classmethod
    def zeros(cls, length: int) -> BinaryVector:
        return cls(length, np.zeros(num_words(length), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BinaryVector:
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        return cls(arr.shape[0], pack_bits(arr))

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BinaryVector:
        bits = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(support, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise IndexError("support index out of range")
        bits[idx] = 1
        return cls(length, pack_bits(bits))

    def to_array(self) -> np.ndarray:
        return unpack_bits(self.data, self.length)

    def support(self) -> list[int]:
        return np.flatnonzero(self.to_array()).tolist()

    def weight(self) -> int:
        return int(np.bitwise_count(self.data).sum())

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return int((self.data[j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: BinaryVector) -> BinaryVector:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BinaryVector(self.length, self.data ^ other.data)

    def dot(self, other: BinaryVector) -> int:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return int(np.bitwise_count(self.data & other.data).sum() & 1)

    def any(self) -> bool:
        return bool(self.data.any())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.length, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryVector({''.join(map(str, self.to_array()))})"


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Immutable bit-packed row-major matrix over GF(2)."""

    rows: int
    cols: int
    data: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _frozen(self.data.reshape(self.rows, num_words(self.cols))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls(rows, cols, np.zeros((rows, num_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, a: Sequence[Sequence[int]] | np.ndarray, cols: int | None = None) -> BinaryMatrix:
        arr = np.asarray(a, dtype=np.uint8)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, cols or 0)
            else:
                raise ValueError("expected a 2-D array")
        return cls(arr.shape[0], arr.shape[1], pack_bits(arr))

    @classmethod
    def from_rows(cls, rows: Sequence[BinaryVector], cols: int) -> BinaryMatrix:
        if not rows:
            return cls.zeros(0, cols)
        if any(r.length != cols for r in rows):
            raise ValueError("row length mismatch")
        return cls(len(rows), cols, np.stack([r.data for r in rows]))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.data, self.cols)

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.cols, self.data[i])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return int((self.data[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols}, rank={rank(self)})"

    def take_rows(self, rows: Sequence[int] | np.ndarray) -> BinaryMatrix:
        idx = np.asarray(rows, dtype=np.int64)
        return BinaryMatrix(idx.shape[0], self.cols, self.data[idx])

    def vstack(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return BinaryMatrix(self.rows + other.rows, self.cols, np.vstack([self.data, other.data]))

    def hstack(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return BinaryMatrix.from_dense(np.hstack([self.to_dense(), other.to_dense()]),
                                       cols=self.cols + other.cols)

    def transpose(self) -> BinaryMatrix:
        return BinaryMatrix.from_dense(self.to_dense().T.copy(), cols=self.rows)

    @property
    def T(self) -> BinaryMatrix:
        return self.transpose()

    def matvec(self, v: BinaryVector) -> BinaryVector:
        if v.length != self.cols:
            raise ValueError("length mismatch")
        parity = (np.bitwise_count(self.data & v.data).sum(axis=1) & 1).astype(np.uint8)
        return BinaryVector(self.rows, pack_bits(parity))

    def __matmul__(self, other: BinaryMatrix | BinaryVector):
        if isinstance(other, BinaryVector):
            return self.matvec(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        prod = (self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64)) & 1
        return BinaryMatrix.from_dense(prod.astype(np.uint8), cols=other.cols)


# ---------------------------------------------------------------- kernels


@numba.njit(cache=True)
def _eliminate(data, ncols, full):
    """In-place row reduction; returns pivot columns in row order.

    Pivots are taken at the lowest available column. With ``full`` the result
    is in reduced row echelon form, otherwise only rows below each pivot are
    cleared.
    """
    nrows, nw = data.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    one = np.uint64(1)
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        mask = one << np.uint64(c & 63)
        p = -1
        for i in range(r, nrows):
            if data[i, w] & mask:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                tmp = data[r, k]
                data[r, k] = data[p, k]
                data[p, k] = tmp
        start = 0 if full else r + 1
        for i in range(start, nrows):
            if i != r and (data[i, w] & mask):
                for k in range(w, nw):
                    data[i, k] ^= data[r, k]
        pivots[r] = c
        r += 1
    return pivots[:r]


@numba.njit(cache=True)
def _gather_columns(data, cols, out):
    one = np.uint64(1)
    for i in range(data.shape[0]):
        for t in range(cols.shape[0]):
            c = cols[t]
            if (data[i, c >> 6] >> np.uint64(c & 63)) & one:
                out[i, t >> 6] |= one << np.uint64(t & 63)


# ------------------------------------------------------------- operations


def rank(m: BinaryMatrix) -> int:
    """GF(2) row rank. The input is left untouched."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(_eliminate(m.data.copy(), m.cols, False).shape[0])


def rref(m: BinaryMatrix) -> tuple[BinaryMatrix, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    data = m.data.copy()
    piv = _eliminate(data, m.cols, True) if m.rows and m.cols else np.empty(0, np.int64)
    return BinaryMatrix(m.rows, m.cols, data), piv.tolist()


def solve(a: BinaryMatrix, b: BinaryVector) -> BinaryVector | None:
    """Solve ``a @ x = b``; returns ``None`` when the system is inconsistent.

    Pivoting picks the lowest column first and free variables are zero, so the
    answer is a deterministic function of ``(a, b)``.
    """
    if a.rows != b.length:
        raise ValueError("a.rows must equal b.length")
    n = a.cols
    aug = np.zeros((a.rows, num_words(n + 1)), dtype=np.uint64)
    aug[:, : a.data.shape[1]] = a.data
    rhs = b.to_array().astype(bool)
    aug[rhs, n >> 6] |= np.uint64(1) << np.uint64(n & 63)
    piv = _eliminate(aug, n, True) if a.rows else np.empty(0, np.int64)
    rhs_bits = (aug[:, n >> 6] >> np.uint64(n & 63)) & np.uint64(1)
    if rhs_bits[len(piv):].any():
        return None
    x = np.zeros(n, dtype=np.uint8)
    x[piv] = rhs_bits[: len(piv)].astype(np.uint8)
    return BinaryVector(n, pack_bits(x))


def column_submatrix(m: BinaryMatrix, cols: Sequence[int] | np.ndarray) -> BinaryMatrix:
    """Restrict ``m`` to ``cols``, keeping row order and the given column order."""
    idx = np.asarray(cols, dtype=np.int64).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= m.cols):
        raise IndexError("column index out of range")
    out = np.zeros((m.rows, num_words(idx.size)), dtype=np.uint64)
    if idx.size and m.rows:
        _gather_columns(m.data, idx, out)
    return BinaryMatrix(m.rows, int(idx.size), out)


def nullspace_basis(m: BinaryMatrix) -> list[BinaryVector]:
    """Basis of ``{x : m @ x = 0}``, one vector per free column."""
    red, piv = rref(m)
    dense = red.to_dense()
    pivset = set(piv)
    basis = []
    for f in range(m.cols):
        if f in pivset:
            continue
        x = np.zeros(m.cols, dtype=np.uint8)
        x[f] = 1
        for i, pc in enumerate(piv):
            x[pc] = dense[i, f]
        basis.append(BinaryVector(m.cols, pack_bits(x)))
    return basis


def in_row_space(m: BinaryMatrix, v: BinaryVector) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``m``."""
    if v.length != m.cols:
        raise ValueError("length mismatch")
    return rank(m.vstack(BinaryMatrix(1, m.cols, v.data[None, :]))) == rank(m)
