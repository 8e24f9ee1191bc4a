"""I.i.d. erasure channel with uniformly random Paulis on the lost qubits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator


@dataclass(frozen=True, eq=False)
class ErasurePattern:
    """Erased qubit positions together with the Pauli they induced."""

    n: int
    erased: tuple[int, ...]
    induced: PauliOperator

    def __post_init__(self) -> None:
        if self.induced.n != self.n:
            raise ValueError("induced error acts on the wrong number of qubits")
        if not set(self.induced.support()) <= set(self.erased):
            raise ValueError("induced error leaves the erased set")

    @classmethod
    def from_paulis(cls, n: int, erased, paulis: dict[int, str] | None = None) -> ErasurePattern:
        erased = tuple(sorted(set(int(q) for q in erased)))
        return cls(n, erased, PauliOperator.from_paulis(n, paulis or {}))

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(self.erased)] = True
        return m

    def __len__(self) -> int:
        return len(self.erased)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by ``(seed, trial)``.

    Each trial index gets its own Philox counter block, so the draws of trial
    ``t`` do not depend on which worker runs it or in what order.
    """

    seed: int
    trial: int = 0

    def generator(self) -> np.random.Generator:
        key = self.seed & ((1 << 64) - 1)
        return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, self.trial]))

    def substream(self, trial: int) -> RngStream:
        return RngStream(self.seed, trial)


def sample_erasure(n: int, eps: float, rng: RngStream | np.random.Generator) -> ErasurePattern:
    """Erase each qubit with probability ``eps`` and apply I, X, Y or Z uniformly."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    erased = gen.random(n) < eps
    xz = gen.integers(0, 2, size=(2, n), dtype=np.uint8) & erased
    return ErasurePattern(n, tuple(np.flatnonzero(erased).tolist()), PauliOperator.from_arrays(xz[0], xz[1]))
