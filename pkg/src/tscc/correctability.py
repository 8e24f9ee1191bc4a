"""Rank tests for erasure correctability.

For a subsystem code with stabilizer matrix ``H`` and gauge matrix ``G`` an
erased set ``E`` is correctable exactly when

    2|E| == rank(H_E) + rank(G) - rank(G_Ebar)

where ``M_E`` keeps the X and Z columns of the qubits in ``E``. The right-hand
side never exceeds the left. Because the centralizer of the gauge group is
spanned by ``H`` and the bare logicals ``L``,
``rank(G) - rank(G_Ebar) = 2|E| - rank([H; L]_E)``, so the test reduces to
``rank([H; L]_E) == rank(H_E)``, which only touches the erased columns.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .code import TsccCode
from .gf2 import BinaryMatrix, column_submatrix, nullspace_basis, rank
from .lattice import COLORS
from .pauli import OperatorSet, PauliOperator, in_group

ORACLE_MAX_KERNEL_DIM = 20


@dataclass(frozen=True)
class CorrectabilityVerdict:
    correctable: bool
    lhs: int
    rhs: int


def _columns(n: int, erased: Iterable[int]) -> np.ndarray:
    e = np.asarray(sorted(set(int(q) for q in erased)), dtype=np.int64)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise IndexError("erased qubit out of range")
    return np.concatenate([e, e + n])


class _Matrices:
    def __init__(self, code: TsccCode):
        self.h = code.stabilizers.matrix
        self.g = code.gauge_gens.matrix
        self.hl = self.h.vstack(code.logical_set.matrix)
        self.rank_g = code.gauge_gens.rank
        self.stack = {}
        for c in COLORS:
            qs = code.stack_qubits(c)
            ops = code.cc_checks(c, "X").ops + code.cc_checks(c, "Z").ops
            full = OperatorSet(ops).matrix
            cols = np.concatenate([qs, np.asarray(qs) + code.n])
            sub = column_submatrix(full, cols)
            self.stack[c] = (sub, rank(sub), np.asarray(qs))


_CACHE: "weakref.WeakKeyDictionary[TsccCode, _Matrices]" = weakref.WeakKeyDictionary()


def _mats(code: TsccCode) -> _Matrices:
    m = _CACHE.get(code)
    if m is None:
        m = _CACHE[code] = _Matrices(code)
    return m


def tscc_correctable(code: TsccCode, erased: Iterable[int], literal: bool = False) -> CorrectabilityVerdict:
    """Rank criterion for the bare subsystem code.

    ``literal`` evaluates ``rank(G) - rank(G_Ebar)`` directly on the full gauge
    matrix instead of through the centralizer identity; both give the same
    numbers.
    """
    m = _mats(code)
    cols = _columns(code.n, erased)
    size = cols.size // 2
    h_e = rank(column_submatrix(m.h, cols))
    if literal:
        keep = np.setdiff1d(np.arange(2 * code.n), cols)
        g_gap = m.rank_g - rank(column_submatrix(m.g, keep))
    else:
        g_gap = 2 * size - rank(column_submatrix(m.hl, cols))
    lhs, rhs = 2 * size, h_e + g_gap
    if rhs > lhs:
        raise AssertionError(f"rank criterion out of bounds: rhs={rhs} > lhs={lhs}")
    return CorrectabilityVerdict(lhs == rhs, lhs, rhs)


def stack_verdicts(code: TsccCode, erased: Iterable[int]) -> dict[str, CorrectabilityVerdict]:
    """Stabilizer-code criterion on each stack's copy of the parent color code."""
    m = _mats(code)
    erased_set = set(int(q) for q in erased)
    out = {}
    for c in COLORS:
        sub, rank_h, qs = m.stack[c]
        nc = qs.size
        local = np.array([i for i, q in enumerate(qs) if int(q) in erased_set], dtype=np.int64)
        cols = np.concatenate([local, local + nc])
        keep = np.setdiff1d(np.arange(2 * nc), cols)
        lhs = 2 * local.size
        rhs = rank(column_submatrix(sub, cols)) + rank_h - rank(column_submatrix(sub, keep))
        if rhs > lhs:
            raise AssertionError(f"stack {c}: rhs={rhs} > lhs={lhs}")
        out[c] = CorrectabilityVerdict(lhs == rhs, lhs, rhs)
    return out


def stack_correctable(code: TsccCode, erased: Iterable[int]) -> bool:
    """True iff every stack's share of ``erased`` is correctable for its color code.

    This is sufficient for the maximal gauge-fixing decoder to succeed.
    """
    return all(v.correctable for v in stack_verdicts(code, erased).values())


def _restricted_kernel(code: TsccCode, erased: list[int]) -> list[PauliOperator]:
    """Basis of Paulis on ``erased`` that commute with every W1 and W2."""
    n = code.n
    stabs = code.stabilizers
    twisted = np.hstack([stabs.z_matrix.to_dense()[:, erased], stabs.x_matrix.to_dense()[:, erased]])
    basis = nullspace_basis(BinaryMatrix.from_dense(twisted, cols=2 * len(erased)))
    out = []
    k = len(erased)
    for b in basis:
        bits = b.to_array()
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[erased] = bits[:k]
        z[erased] = bits[k:]
        out.append(PauliOperator.from_arrays(x, z))
    return out


def brute_force_correctable(code: TsccCode, erased: Iterable[int], exhaustive: bool = False) -> bool:
    """Search the syndrome-free Paulis on ``erased`` for one outside the gauge group.

    By default only a kernel basis is tested (the gauge group is closed under
    products). ``exhaustive`` walks every element of the kernel instead.

    Raises:
        ValueError: if ``exhaustive`` and the kernel has more than ``2**20`` elements.
    """
    erased = sorted(set(int(q) for q in erased))
    basis = _restricted_kernel(code, erased)
    if not exhaustive:
        return all(in_group(p, code.gauge_gens) for p in basis)
    if len(basis) > ORACLE_MAX_KERNEL_DIM:
        raise ValueError(f"kernel dimension {len(basis)} exceeds oracle cap {ORACLE_MAX_KERNEL_DIM}")
    for coeffs in itertools.product((0, 1), repeat=len(basis)):
        op = PauliOperator.identity(code.n)
        for c, b in zip(coeffs, basis):
            if c:
                op = op * b
        if not in_group(op, code.gauge_gens):
            return False
    return True


def correctability_sweep(distances, eps_grid, trials: int, seed: int, workers: int = 1):
    """Fraction of sampled erasures that fail the rank criterion, per (d, eps)."""
    from .montecarlo import SweepConfig, run_sweep

    cfg = SweepConfig(
        mode="correctability", distances=list(distances), eps_grid=list(eps_grid),
        max_trials=trials, target_failures=trials + 1, seed=seed, workers=workers,
    )
    return run_sweep(cfg)
