"""Pauli operators in the binary symplectic picture, phases dropped."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf2 import BinaryMatrix, BinaryVector, num_words, pack_bits, rank

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """``n``-qubit Pauli operator stored as packed X and Z bit vectors."""

    n: int
    x: BinaryVector
    z: BinaryVector

    def __post_init__(self) -> None:
        if self.x.length != self.n or self.z.length != self.n:
            raise ValueError("x/z parts must have length n")

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        zero = BinaryVector.zeros(n)
        return cls(n, zero, zero)

    @classmethod
    def from_arrays(cls, x: np.ndarray, z: np.ndarray) -> PauliOperator:
        x = np.asarray(x, dtype=np.uint8)
        z = np.asarray(z, dtype=np.uint8)
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z must be equal-length 1-D arrays")
        n = x.shape[0]
        return cls(n, BinaryVector(n, pack_bits(x)), BinaryVector(n, pack_bits(z)))

    @classmethod
    def from_paulis(cls, n: int, paulis: Mapping[int, str]) -> PauliOperator:
        """Build from ``{qubit: letter}`` with letters in ``IXYZ``."""
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for q, p in paulis.items():
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for n={n}")
            bx, bz = _LETTER_BITS[p]
            x[q] ^= bx
            z[q] ^= bz
        return cls.from_arrays(x, z)

    @classmethod
    def uniform(cls, n: int, letter: str, qubits: Iterable[int]) -> PauliOperator:
        return cls.from_paulis(n, {q: letter for q in qubits})

    @classmethod
    def from_string(cls, s: str) -> PauliOperator:
        return cls.from_paulis(len(s), dict(enumerate(s)))

    def x_array(self) -> np.ndarray:
        return self.x.to_array()

    def z_array(self) -> np.ndarray:
        return self.z.to_array()

    def symplectic(self) -> BinaryVector:
        """Length-``2n`` vector ``(x | z)``."""
        return BinaryVector.from_bits(np.concatenate([self.x_array(), self.z_array()]))

    def support(self) -> list[int]:
        return np.flatnonzero(self.x_array() | self.z_array()).tolist()

    @property
    def weight(self) -> int:
        return int(np.bitwise_count(self.x.data | self.z.data).sum())

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def letter(self, q: int) -> str:
        return _BITS_LETTER[(self.x[q], self.z[q])]

    def to_string(self) -> str:
        return "".join(_BITS_LETTER[(a, b)] for a, b in zip(self.x_array(), self.z_array()))

    def restricted(self, qubits: Iterable[int]) -> PauliOperator:
        """Copy keeping only the listed qubits (others set to identity)."""
        keep = np.zeros(self.n, dtype=np.uint8)
        keep[list(qubits)] = 1
        return PauliOperator.from_arrays(self.x_array() & keep, self.z_array() & keep)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return product(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self.n == other.n and self.x == other.x and self.z == other.z

    def __hash__(self) -> int:
        return hash((self.n, self.x, self.z))

    def __repr__(self) -> str:
        ops = " ".join(f"{self.letter(q)}{q}" for q in self.support())
        return f"PauliOperator(n={self.n}, {ops or 'I'})"


def _check_sizes(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    _check_sizes(a, b)
    overlap = np.bitwise_count(a.x.data & b.z.data).sum() + np.bitwise_count(a.z.data & b.x.data).sum()
    return not (overlap & 1)


def product(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check_sizes(a, b)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z)


def product_of(ops: Iterable[PauliOperator], n: int) -> PauliOperator:
    x = np.zeros(num_words(n), dtype=np.uint64)
    z = x.copy()
    for op in ops:
        if op.n != n:
            raise ValueError("qubit count mismatch")
        x ^= op.x.data
        z ^= op.z.data
    return PauliOperator(n, BinaryVector(n, x), BinaryVector(n, z))


class OperatorSet:
    """Ordered collection of Pauli operators on a common number of qubits.

    Packed X and Z parts are cached as ``(len, words)`` arrays so syndrome
    extraction is two popcount passes.
    """

    def __init__(self, ops: Sequence[PauliOperator], n: int | None = None):
        ops = tuple(ops)
        if n is None:
            if not ops:
                raise ValueError("empty OperatorSet needs an explicit n")
            n = ops[0].n
        if any(op.n != n for op in ops):
            raise ValueError("all operators must act on the same number of qubits")
        self.ops = ops
        self.n = n
        words = num_words(n)
        self.xs = np.array([op.x.data for op in ops], dtype=np.uint64).reshape(len(ops), words)
        self.zs = np.array([op.z.data for op in ops], dtype=np.uint64).reshape(len(ops), words)
        self.xs.flags.writeable = False
        self.zs.flags.writeable = False

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, i: int) -> PauliOperator:
        return self.ops[i]

    def __iter__(self):
        return iter(self.ops)

    @cached_property
    def matrix(self) -> BinaryMatrix:
        """Rows are symplectic vectors ``(x | z)``."""
        if not self.ops:
            return BinaryMatrix.zeros(0, 2 * self.n)
        dense = np.hstack([
            BinaryMatrix(len(self), self.n, self.xs).to_dense(),
            BinaryMatrix(len(self), self.n, self.zs).to_dense(),
        ])
        return BinaryMatrix.from_dense(dense)

    @cached_property
    def x_matrix(self) -> BinaryMatrix:
        return BinaryMatrix(len(self), self.n, self.xs)

    @cached_property
    def z_matrix(self) -> BinaryMatrix:
        return BinaryMatrix(len(self), self.n, self.zs)

    @cached_property
    def rank(self) -> int:
        return rank(self.matrix)

    def syndrome_array(self, error: PauliOperator) -> np.ndarray:
        """Anticommutation bits as a uint8 array."""
        if error.n != self.n:
            raise ValueError("qubit count mismatch")
        cnt = np.bitwise_count(self.xs & error.z.data).sum(axis=1) + np.bitwise_count(self.zs & error.x.data).sum(axis=1)
        return (cnt & 1).astype(np.uint8)


def syndrome(checks: OperatorSet, error: PauliOperator) -> BinaryVector:
    """Bit ``i`` is set iff ``checks[i]`` anticommutes with ``error``."""
    return BinaryVector.from_bits(checks.syndrome_array(error))


def in_group(candidate: PauliOperator, generators: OperatorSet) -> bool:
    """Membership of ``candidate`` in the span of ``generators``, up to phase."""
    if candidate.n != generators.n:
        raise ValueError("qubit count mismatch")
    if candidate.is_identity():
        return True
    stacked = generators.matrix.vstack(BinaryMatrix.from_rows([candidate.symplectic()], 2 * generators.n))
    return rank(stacked) == generators.rank
