"""Erasure decoders for the subsystem color code.

Pipeline: syndrome extraction, peeling of isolated erasures, clustering,
then per cluster an X stage on the three stacks and a Z stage that either
works on the parent color code (``partial``) or on the stacks again using
the gauge-fixed X-type checks (``maximal``).

Stack ``c`` checks on face ``f`` share a single incidence row ``A_c[f]``; the
Z-type ones detect X errors (``cc_x``) and the X-type ones detect Z errors
(``cc_z``).
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .code import MODES, TsccCode
from .erasure import ErasurePattern
from .gf2 import BinaryMatrix, BinaryVector, column_submatrix, solve
from .lattice import COLORS, PRED, SUCC
from .pauli import OperatorSet, PauliOperator

# Letter -> (x, z) bits, and the inverse used when peeling.
_CANDIDATES = ((0, 0), (1, 0), (1, 1), (0, 1))


class DecodingError(RuntimeError):
    """Raised when a syndrome is inconsistent with the erased support."""


@dataclass(frozen=True, eq=False)
class SyndromeSet:
    """Syndrome bits indexed by face; stack arrays have shape ``(3, |F|)``."""

    tscc_w1: np.ndarray
    tscc_w2: np.ndarray
    cc_x: np.ndarray
    cc_z: np.ndarray | None = None

    def copy(self) -> SyndromeSet:
        return SyndromeSet(
            self.tscc_w1.copy(), self.tscc_w2.copy(), self.cc_x.copy(),
            None if self.cc_z is None else self.cc_z.copy(),
        )

    def is_zero(self) -> bool:
        arrays = [self.tscc_w1, self.tscc_w2, self.cc_x] + ([] if self.cc_z is None else [self.cc_z])
        return not any(a.any() for a in arrays)


@dataclass(frozen=True)
class Cluster:
    qubits: tuple[int, ...]
    checks: tuple[int, ...]


@dataclass(frozen=True)
class PeelResult:
    estimate: PauliOperator
    remaining: tuple[int, ...]
    syndrome: SyndromeSet


@dataclass(frozen=True)
class DecodeOutcome:
    estimate: PauliOperator
    failed: bool
    failure_kind: str = "none"


class _Tables:
    """Dense incidence data derived once per code."""

    def __init__(self, code: TsccCode):
        h = code.hypergraph
        n, nf = code.n, code.num_faces
        self.n, self.nf = n, nf
        self.w1z = code.w1_set.z_matrix.to_dense()
        self.w2x = code.w2_set.x_matrix.to_dense()
        self.w2z = code.w2_set.z_matrix.to_dense()
        self.stack_inc = np.stack([code.cc_checks(c, "Z").z_matrix.to_dense() for c in COLORS])
        self.stack_packed = [code.cc_checks(c, "Z").z_matrix for c in COLORS]
        nv = h.colex.num_vertices
        parent = np.zeros((nf, nv), dtype=np.uint8)
        for f in h.colex.faces:
            parent[f.index, list(f.cycle)] = 1
        self.parent = parent
        self.parent_packed = BinaryMatrix.from_dense(parent)
        self.stack = np.asarray(h.stack)
        # Faces at each colex vertex; a qubit's W2 checks are those of its vertex.
        self.vertex_faces = np.array(h.colex.vertex_faces, dtype=np.int64)
        self.face_qubits = [np.flatnonzero(self.w2x[f] | self.w2z[f]) for f in range(nf)]
        self.logical_x = code.logical_set.x_matrix.to_dense()
        self.logical_z = code.logical_set.z_matrix.to_dense()
        # Per qubit: (family, face, x-bit, z-bit) of every W check acting on it.
        self.qubit_checks: list[list[tuple[int, int, int, int]]] = []
        for q in range(n):
            f_own = int(h.qubit_face[q])
            entries = [(0, f_own, 0, 1)]
            for f in self.vertex_faces[q // 3]:
                entries.append((1, int(f), int(self.w2x[f, q]), int(self.w2z[f, q])))
            self.qubit_checks.append(entries)

    def apply(self, syn: SyndromeSet, ex: np.ndarray, ez: np.ndarray) -> None:
        """Fold the syndrome of the correction ``(ex, ez)`` into ``syn`` in place."""
        syn.tscc_w1[:] ^= (self.w1z @ ex) & 1
        syn.tscc_w2[:] ^= ((self.w2z @ ex) ^ (self.w2x @ ez)) & 1
        syn.cc_x[:] ^= (self.stack_inc @ ex) & 1
        if syn.cc_z is not None:
            syn.cc_z[:] ^= (self.stack_inc @ ez) & 1

    def apply_single(self, syn: SyndromeSet, q: int, px: int, pz: int) -> None:
        if px:
            syn.tscc_w1[:] ^= self.w1z[:, q]
            syn.tscc_w2[:] ^= self.w2z[:, q]
            syn.cc_x[self.stack[q]] ^= self.stack_inc[self.stack[q], :, q]
        if pz:
            syn.tscc_w2[:] ^= self.w2x[:, q]
            if syn.cc_z is not None:
                syn.cc_z[self.stack[q]] ^= self.stack_inc[self.stack[q], :, q]


_TABLES: "weakref.WeakKeyDictionary[TsccCode, _Tables]" = weakref.WeakKeyDictionary()


def _tables(code: TsccCode) -> _Tables:
    t = _TABLES.get(code)
    if t is None:
        t = _TABLES[code] = _Tables(code)
    return t


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _erased_of(pattern: ErasurePattern | Cluster | Iterable[int]) -> tuple[int, ...]:
    if isinstance(pattern, (ErasurePattern, Cluster)):
        return tuple(pattern.erased if isinstance(pattern, ErasurePattern) else pattern.qubits)
    return tuple(sorted(set(int(q) for q in pattern)))


def _pauli(ex: np.ndarray, ez: np.ndarray) -> PauliOperator:
    return PauliOperator.from_arrays(ex, ez)


# ---------------------------------------------------------------- syndromes


def extract_syndrome(code: TsccCode, mode: str, error: PauliOperator) -> SyndromeSet:
    """Syndromes of the checks available in ``mode``.

    In maximal mode the W2 bits are not measured on their own but are the XOR
    of three stack checks; they are derived that way here.
    """
    _check_mode(mode)
    if error.n != code.n:
        raise ValueError("error acts on the wrong number of qubits")
    w1 = code.w1_set.syndrome_array(error)
    cc_x = np.stack([code.cc_checks(c, "Z").syndrome_array(error) for c in COLORS])
    if mode == "partial":
        w2 = code.w2_set.syndrome_array(error)
        return SyndromeSet(w1, w2, cc_x)
    cc_z = np.stack([code.cc_checks(c, "X").syndrome_array(error) for c in COLORS])
    return SyndromeSet(w1, w2_from_stacks(code, cc_x, cc_z), cc_x, cc_z)


def w2_from_stacks(code: TsccCode, cc_x: np.ndarray, cc_z: np.ndarray) -> np.ndarray:
    """W2 bits as (B^X)_succ + (B^Y)_c + (B^Y)_pred per face of color c."""
    idx = {c: i for i, c in enumerate(COLORS)}
    out = np.zeros(code.num_faces, dtype=np.uint8)
    for f in range(code.num_faces):
        c = code.face_color(f)
        s, p, o = idx[SUCC[c]], idx[PRED[c]], idx[c]
        out[f] = cc_z[s, f] ^ cc_z[o, f] ^ cc_x[o, f] ^ cc_z[p, f] ^ cc_x[p, f]
    return out


# ------------------------------------------------------------------ peeling


def _peel(t: _Tables, erased: tuple[int, ...], syn: SyndromeSet, ex: np.ndarray, ez: np.ndarray) -> list[int]:
    remaining = set(erased)
    if not remaining:
        return []
    mask = np.zeros(t.n, dtype=np.uint8)
    mask[list(remaining)] = 1
    counts = [(t.w1z @ mask).astype(np.int64), ((t.w2x | t.w2z) @ mask).astype(np.int64)]
    bits = (syn.tscc_w1, syn.tscc_w2)
    pending = sorted(remaining)
    while pending:
        touched: set[int] = set()
        for q in pending:
            if q not in remaining:
                continue
            iso = [(fam, f, cx, cz) for fam, f, cx, cz in t.qubit_checks[q] if counts[fam][f] == 1]
            if len({(cx, cz) for _, _, cx, cz in iso}) < 2:
                continue
            fits = [
                (px, pz) for px, pz in _CANDIDATES
                if all(((px & cz) ^ (pz & cx)) == bits[fam][f] for fam, f, cx, cz in iso)
            ]
            if len(fits) != 1:
                raise DecodingError(f"isolated erasure at qubit {q} has no consistent Pauli")
            px, pz = fits[0]
            if px or pz:
                ex[q] ^= px
                ez[q] ^= pz
                t.apply_single(syn, q, px, pz)
            remaining.discard(q)
            for fam, f, _, _ in t.qubit_checks[q]:
                counts[fam][f] -= 1
            for f in t.vertex_faces[q // 3]:
                touched.update(int(x) for x in t.face_qubits[f] if x in remaining)
        pending = sorted(touched & remaining)
    return sorted(remaining)


def peel(code: TsccCode, pattern: ErasurePattern | Iterable[int], syn: SyndromeSet) -> PeelResult:
    """Fix erased qubits whose error is pinned down by checks they alone touch.

    A qubit qualifies once at least two checks of different Pauli type on it
    have no other erased qubit in their support. Repeats until nothing changes.
    """
    t = _tables(code)
    syn = syn.copy()
    ex = np.zeros(code.n, dtype=np.uint8)
    ez = np.zeros(code.n, dtype=np.uint8)
    remaining = _peel(t, _erased_of(pattern), syn, ex, ez)
    return PeelResult(_pauli(ex, ez), tuple(remaining), syn)


# --------------------------------------------------------------- clustering


def _cluster(t: _Tables, erased: tuple[int, ...]) -> list[Cluster]:
    if not erased:
        return []
    parent = {q: q for q in erased}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    in_set = np.zeros(t.n, dtype=bool)
    in_set[list(erased)] = True
    faces = sorted({int(f) for q in erased for f in t.vertex_faces[q // 3]})
    for f in faces:
        members = t.face_qubits[f][in_set[t.face_qubits[f]]]
        root = find(int(members[0]))
        for q in members[1:]:
            other = find(int(q))
            if other != root:
                parent[max(root, other)] = min(root, other)
                root = min(root, other)
    groups: dict[int, list[int]] = {}
    for q in erased:
        groups.setdefault(find(q), []).append(q)
    out = []
    for qs in sorted(groups.values(), key=min):
        checks = sorted({int(f) for q in qs for f in t.vertex_faces[q // 3]})
        out.append(Cluster(tuple(sorted(qs)), tuple(checks)))
    return out


def cluster(code: TsccCode, pattern: ErasurePattern | Iterable[int]) -> list[Cluster]:
    """Group erased qubits that share the support of some W1 or W2 check."""
    return _cluster(_tables(code), _erased_of(pattern))


def _as_cluster(t: _Tables, c: Cluster | Iterable[int]) -> Cluster:
    if isinstance(c, Cluster):
        return c
    qs = _erased_of(c)
    return Cluster(qs, tuple(sorted({int(f) for q in qs for f in t.vertex_faces[q // 3]})))


# ------------------------------------------------------- linear-algebra core


def _solve_on(matrix: BinaryMatrix, rows: np.ndarray | None, cols: list[int], bits: np.ndarray) -> np.ndarray:
    """Solve ``matrix[rows][:, cols] @ x = bits``; returns ``x`` as uint8."""
    sub = matrix if rows is None else matrix.take_rows(rows)
    sub = column_submatrix(sub, cols)
    x = solve(sub, BinaryVector.from_bits(bits))
    if x is None:
        raise DecodingError("syndrome is not explained by any error on the erased qubits")
    return x.to_array()


def cc_erasure_decode(stab_checks: OperatorSet, erased: Iterable[int], syn_bits: BinaryVector) -> PauliOperator:
    """Single-type correction supported on ``erased`` that reproduces ``syn_bits``.

    Z-type checks yield an X correction and X-type checks a Z correction. The
    lowest-index-pivot solver makes the answer deterministic.
    """
    has_x = stab_checks.xs.any()
    has_z = stab_checks.zs.any()
    if has_x and has_z:
        raise ValueError("checks must be all X-type or all Z-type")
    n = stab_checks.n
    cols = list(_erased_of(erased))
    if syn_bits.length != len(stab_checks):
        raise ValueError("one syndrome bit per check is required")
    out = np.zeros(n, dtype=np.uint8)
    if cols:
        matrix = stab_checks.x_matrix if has_x else stab_checks.z_matrix
        out[cols] = _solve_on(matrix, None, cols, syn_bits.to_array())
    elif syn_bits.any():
        raise DecodingError("nonzero syndrome with nothing erased")
    zero = np.zeros(n, dtype=np.uint8)
    return _pauli(zero, out) if has_x else _pauli(out, zero)


# ------------------------------------------------------------------- stages


def _x_stage(t: _Tables, cl: Cluster, syn: SyndromeSet, ex: np.ndarray) -> None:
    rows = np.asarray(cl.checks, dtype=np.int64)
    qs = np.asarray(cl.qubits, dtype=np.int64)
    est = np.zeros(t.n, dtype=np.uint8)
    for c in range(3):
        cols = qs[t.stack[qs] == c].tolist()
        bits = syn.cc_x[c, rows]
        if not cols:
            if bits.any():
                raise DecodingError("stack syndrome without erased qubits")
            continue
        est[cols] = _solve_on(t.stack_packed[c], rows, cols, bits)
    ex ^= est
    t.apply(syn, est, np.zeros_like(est))


def _z_plain_stage(t: _Tables, cl: Cluster, syn: SyndromeSet, ez: np.ndarray) -> None:
    rows = np.asarray(cl.checks, dtype=np.int64)
    lowest: dict[int, int] = {}
    for q in cl.qubits:
        lowest.setdefault(q // 3, q)
    verts = sorted(lowest)
    x = _solve_on(t.parent_packed, rows, verts, syn.tscc_w2[rows])
    est = np.zeros(t.n, dtype=np.uint8)
    for v, bit in zip(verts, x):
        if bit:
            est[lowest[v]] = 1
    ez ^= est
    t.apply(syn, np.zeros_like(est), est)


def _z_gauge_stage(t: _Tables, cl: Cluster, syn: SyndromeSet, ez: np.ndarray) -> None:
    if syn.cc_z is None:
        raise ValueError("gauge-fixed Z stage needs maximal-mode syndromes")
    rows = np.asarray(cl.checks, dtype=np.int64)
    qs = np.asarray(cl.qubits, dtype=np.int64)
    est = np.zeros(t.n, dtype=np.uint8)
    for c in range(3):
        cols = qs[t.stack[qs] == c].tolist()
        bits = syn.cc_z[c, rows]
        if not cols:
            if bits.any():
                raise DecodingError("stack syndrome without erased qubits")
            continue
        est[cols] = _solve_on(t.stack_packed[c], rows, cols, bits)
    ez ^= est
    t.apply(syn, np.zeros_like(est), est)


def _stage(fn, code: TsccCode, pattern, syn: SyndromeSet) -> tuple[PauliOperator, SyndromeSet]:
    t = _tables(code)
    syn = syn.copy()
    acc = np.zeros(code.n, dtype=np.uint8)
    fn(t, _as_cluster(t, pattern), syn, acc)
    zero = np.zeros_like(acc)
    op = _pauli(acc, zero) if fn is _x_stage else _pauli(zero, acc)
    return op, syn


def correct_x(code: TsccCode, pattern: Cluster | Iterable[int], syn: SyndromeSet) -> tuple[PauliOperator, SyndromeSet]:
    """X correction from the Z-type stack checks; returns it with updated syndromes."""
    return _stage(_x_stage, code, pattern, syn)


def correct_z_plain(code: TsccCode, pattern: Cluster | Iterable[int], syn: SyndromeSet) -> tuple[PauliOperator, SyndromeSet]:
    """Z correction through the parent color code, lifted to the lowest erased corner."""
    return _stage(_z_plain_stage, code, pattern, syn)


def correct_z_gauge(code: TsccCode, pattern: Cluster | Iterable[int], syn: SyndromeSet) -> tuple[PauliOperator, SyndromeSet]:
    """Z correction from the gauge-fixed X-type stack checks."""
    return _stage(_z_gauge_stage, code, pattern, syn)


# ---------------------------------------------------------------- top level


def logical_flips(code: TsccCode, residual: PauliOperator) -> np.ndarray:
    """Anticommutation bits of ``residual`` with the four bare logicals."""
    return code.logical_set.syndrome_array(residual)


def is_logical_failure(code: TsccCode, residual: PauliOperator) -> bool:
    return bool(logical_flips(code, residual).any())


def decode_arrays(code: TsccCode, mode: str, erased: tuple[int, ...], syn: SyndromeSet,
                  z_first: bool = False, cluster_order: list[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Run the pipeline on a syndrome and return the estimate as ``(x, z)`` arrays.

    ``syn`` is consumed (updated in place). ``z_first`` and ``cluster_order``
    only exist to exercise order independence.
    """
    _check_mode(mode)
    t = _tables(code)
    ex = np.zeros(code.n, dtype=np.uint8)
    ez = np.zeros(code.n, dtype=np.uint8)
    remaining = _peel(t, erased, syn, ex, ez)
    clusters = _cluster(t, tuple(remaining))
    if cluster_order is not None:
        clusters = [clusters[i] for i in cluster_order]
    z_stage = _z_plain_stage if mode == "partial" else _z_gauge_stage
    for cl in clusters:
        if z_first:
            z_stage(t, cl, syn, ez)
            _x_stage(t, cl, syn, ex)
        else:
            _x_stage(t, cl, syn, ex)
            z_stage(t, cl, syn, ez)
    return ex, ez


def decode(code: TsccCode, mode: str, pattern: ErasurePattern) -> DecodeOutcome:
    """Decode one erasure pattern and report whether a logical error remains."""
    syn = extract_syndrome(code, mode, pattern.induced)
    ex, ez = decode_arrays(code, mode, pattern.erased, syn)
    estimate = _pauli(ex, ez)
    failed = is_logical_failure(code, pattern.induced * estimate)
    return DecodeOutcome(estimate, failed, "logical" if failed else "none")


def decode_fails(code: TsccCode, mode: str, pattern: ErasurePattern) -> bool:
    """Failure verdict only; skips building the estimate operator."""
    syn = extract_syndrome(code, mode, pattern.induced)
    ex, ez = decode_arrays(code, mode, pattern.erased, syn)
    t = _tables(code)
    rx = pattern.induced.x_array() ^ ex
    rz = pattern.induced.z_array() ^ ez
    flips = ((t.logical_x @ rz) ^ (t.logical_z @ rx)) & 1
    return bool(flips.any())
