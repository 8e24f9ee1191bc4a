"""Gauge group, stabilizers, logicals and measurement schedules of a TSCC.

Check identifiers are plain tuples:

* ``("W1", f)`` and ``("W2", f)`` for the two subsystem-code stabilizers of face ``f``;
* ``("B", c, f, P)`` for the color-code check of Pauli type ``P`` on face ``f``
  restricted to stack ``c``.

Gauge operator labels are ``("XX", e)`` / ``("YY", e)`` for rank-2 edge ``e``,
``("ZZ", v, 0)`` = Z on the r,g corners and ``("ZZ", v, 1)`` = Z on the g,b
corners of triangle ``v``, and ``("U", k)`` for the 4-body Z operator on
rectangle ``k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .gf2 import BinaryMatrix, nullspace_basis, rank
from .lattice import COLOR_INDEX, COLORS, PRED, SUCC, Hypergraph, build_colex, inflate, qubit_of
from .pauli import OperatorSet, PauliOperator, commutes, in_group, product_of

MODES = ("partial", "maximal")
PAULIS = ("X", "Y", "Z")
LOGICAL_NAMES = ("X1", "Z1", "X2", "Z2")


class CodeInvariantError(RuntimeError):
    """A structural relation of the code failed to hold."""


class ScheduleError(RuntimeError):
    """A measurement recipe is inconsistent with its target or its ordering."""


@dataclass(frozen=True)
class Recipe:
    """Ordered gauge measurements whose product is the target check."""

    target: tuple
    steps: tuple[tuple, ...]


@dataclass(frozen=True)
class IndirectRule:
    """Target check obtained by XOR-ing the outcomes of ``sources``."""

    target: tuple
    sources: tuple[tuple, ...]


@dataclass(frozen=True)
class MeasurementSchedule:
    mode: str
    rounds: tuple[tuple[tuple, ...], ...]
    recipes: dict = field(hash=False)
    indirect: dict = field(hash=False)

    @cached_property
    def _round_of(self) -> dict:
        return {label: i + 1 for i, batch in enumerate(self.rounds) for label in batch}

    def round_of(self, label: tuple) -> int:
        return self._round_of[label]

    def available_round(self, check: tuple) -> int:
        """Round after which the outcome of ``check`` is known."""
        if check in self.recipes:
            return max(self.round_of(s) for s in self.recipes[check].steps)
        if check in self.indirect:
            return max(self.available_round(s) for s in self.indirect[check].sources)
        raise KeyError(check)

    def checks(self) -> list[tuple]:
        return list(self.recipes) + list(self.indirect)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for batch in self.rounds:
            for label in batch:
                out[label[0]] = out.get(label[0], 0) + 1
        return out


@dataclass(frozen=True, eq=False)
class TsccCode:
    hypergraph: Hypergraph
    gauge_ops: dict = field(repr=False)
    gauge_labels: tuple = field(repr=False)
    gauge_gens: OperatorSet = field(repr=False)
    w1: tuple[PauliOperator, ...] = field(repr=False)
    w2: tuple[PauliOperator, ...] = field(repr=False)
    cc_stabs: dict = field(repr=False)
    u_square: tuple[PauliOperator, ...] = field(repr=False)
    bare_logicals: tuple[PauliOperator, ...] = field(repr=False)
    n: int = 0
    k: int = 0
    r: int = 0
    s: int = 0

    @property
    def d(self) -> int:
        return self.hypergraph.colex.d

    @property
    def num_faces(self) -> int:
        return len(self.hypergraph.faces)

    @property
    def stack_of(self) -> np.ndarray:
        return self.hypergraph.stack

    def face_color(self, f: int) -> str:
        return self.hypergraph.faces[f].color

    def stack_qubits(self, stack: str) -> list[int]:
        c = COLOR_INDEX[stack]
        return list(range(c, self.n, 3))

    def operator(self, check: tuple) -> PauliOperator:
        kind = check[0]
        if kind == "W1":
            return self.w1[check[1]]
        if kind == "W2":
            return self.w2[check[1]]
        if kind == "B":
            return self.cc_stabs[check[1:]]
        return self.gauge_ops[check]

    @cached_property
    def stabilizers(self) -> OperatorSet:
        return OperatorSet(self.w1 + self.w2)

    @cached_property
    def w1_set(self) -> OperatorSet:
        return OperatorSet(self.w1)

    @cached_property
    def w2_set(self) -> OperatorSet:
        return OperatorSet(self.w2)

    @cached_property
    def logical_set(self) -> OperatorSet:
        return OperatorSet(self.bare_logicals)

    def cc_checks(self, stack: str, pauli: str) -> OperatorSet:
        """Color-code checks of one type on one stack, indexed by face."""
        return self._cc_sets[(stack, pauli)]

    @cached_property
    def _cc_sets(self) -> dict:
        return {
            (c, p): OperatorSet([self.cc_stabs[(c, f, p)] for f in range(self.num_faces)])
            for c in COLORS for p in PAULIS
        }

    @cached_property
    def schedules(self) -> dict[str, MeasurementSchedule]:
        return {mode: build_schedule(self, mode) for mode in MODES}


# ------------------------------------------------------------ construction


def _gauge_operators(h: Hypergraph) -> tuple[dict, tuple]:
    n = h.num_qubits
    ops: dict = {}
    labels = []
    for e in h.rank2_edges:
        label = ("XX", e.index) if e.kind == "dashed" else ("YY", e.index)
        ops[label] = PauliOperator.uniform(n, e.pauli, e.qubits)
        labels.append(label)
    for v, (a, b, c) in enumerate(h.rank3_edges):
        for p, pair in enumerate(((a, b), (b, c))):
            label = ("ZZ", v, p)
            ops[label] = PauliOperator.uniform(n, "Z", pair)
            labels.append(label)
    for rect in h.rect_faces:
        ops[("U", rect.index)] = PauliOperator.uniform(n, "Z", rect.qubits)
    return ops, tuple(labels)


def _w2(h: Hypergraph, f: int) -> PauliOperator:
    face = h.faces[f]
    paulis = {}
    for v in face.rank3:
        for c in COLORS:
            paulis[qubit_of(v, c)] = "X" if c == SUCC[face.color] else "Y"
    return PauliOperator.from_paulis(h.num_qubits, paulis)


def _symplectic_twist(ops: OperatorSet) -> BinaryMatrix:
    """Rows ``(z | x)``: kernel vectors commute with every row operator."""
    n = ops.n
    return BinaryMatrix.from_dense(np.hstack([ops.z_matrix.to_dense(), ops.x_matrix.to_dense()]), cols=2 * n)


def _vec_to_pauli(vec: np.ndarray, n: int) -> PauliOperator:
    return PauliOperator.from_arrays(vec[:n], vec[n:])


def _centralizer_on(h: Hypergraph, gauge: OperatorSet, qubits: Sequence[int]) -> list[np.ndarray]:
    """Basis of Paulis supported on ``qubits`` commuting with the gauge group."""
    n = h.num_qubits
    cols = list(qubits) + [n + q for q in qubits]
    twisted = _symplectic_twist(gauge).to_dense()[:, cols]
    basis = nullspace_basis(BinaryMatrix.from_dense(twisted, cols=len(cols)))
    out = []
    for b in basis:
        full = np.zeros(2 * n, dtype=np.uint8)
        full[cols] = b.to_array()
        out.append(full)
    return out


def _sym_inner(a: np.ndarray, b: np.ndarray, n: int) -> int:
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) & 1)


def _strip_logicals(h: Hypergraph, gauge: OperatorSet, stabs: OperatorSet, horizontal: bool) -> list[np.ndarray]:
    """Low-weight logical representatives supported on a strip of unit cells."""
    colex = h.colex
    L = colex.L
    n = h.num_qubits
    stab_dense = stabs.matrix.to_dense()
    for width in range(1, L + 1):
        qubits = [
            q for q in range(n)
            if (colex.vertex_position(q // 3)[0 if horizontal else 1]) < width
        ]
        basis = _centralizer_on(h, gauge, qubits)
        if not basis:
            continue
        basis_mat = np.array(basis, dtype=np.uint8)
        if len(basis) <= 16:
            coeffs = np.array(list(itertools.product((0, 1), repeat=len(basis)))[1:], dtype=np.int64)
            elements = (coeffs @ basis_mat) & 1
        else:
            elements = basis_mat
        weights = (elements[:, :n] | elements[:, n:]).sum(axis=1)
        chosen: list[np.ndarray] = []
        base_rank = rank(BinaryMatrix.from_dense(stab_dense))
        for i in np.argsort(weights, kind="stable"):
            trial = np.vstack([stab_dense] + chosen + [elements[i]])
            if rank(BinaryMatrix.from_dense(trial)) == base_rank + len(chosen) + 1:
                chosen.append(elements[i].astype(np.uint8))
            if len(chosen) == 2:
                return chosen
    raise CodeInvariantError("could not find logical operators on a strip")


def _bare_logicals(h: Hypergraph, gauge: OperatorSet, stabs: OperatorSet) -> tuple[PauliOperator, ...]:
    n = h.num_qubits
    cands = _strip_logicals(h, gauge, stabs, True) + _strip_logicals(h, gauge, stabs, False)
    # Symplectic Gram-Schmidt over the candidate classes.
    pairs = []
    pool = list(cands)
    while pool and len(pairs) < 2:
        a = pool.pop(0)
        j = next((i for i, b in enumerate(pool) if _sym_inner(a, b, n)), None)
        if j is None:
            continue
        b = pool.pop(j)
        pool = [
            (c + _sym_inner(c, b, n) * a + _sym_inner(c, a, n) * b) % 2
            for c in pool
        ]
        pairs.append((a, b))
    if len(pairs) != 2:
        raise CodeInvariantError("bare logicals do not form two symplectic pairs")
    (x1, z1), (x2, z2) = pairs
    return tuple(_vec_to_pauli(v.astype(np.uint8), n) for v in (x1, z1, x2, z2))


def build_code(h: Hypergraph | int, check: bool = True) -> TsccCode:
    """Assemble the subsystem code on hypergraph ``h`` (or distance ``h``).

    With ``check`` every structural invariant and both measurement schedules
    are verified, and :class:`CodeInvariantError` names the first failure.
    """
    if isinstance(h, (int, np.integer)):
        h = inflate(build_colex(int(h)))
    n = h.num_qubits
    gauge_ops, labels = _gauge_operators(h)
    gauge = OperatorSet([gauge_ops[lab] for lab in labels])
    w1 = tuple(PauliOperator.uniform(n, "Z", face.corners) for face in h.faces)
    w2 = tuple(_w2(h, f.index) for f in h.faces)
    cc = {}
    for face in h.faces:
        for c in COLORS:
            support = [qubit_of(v, c) for v in face.rank3]
            for p in PAULIS:
                cc[(c, face.index, p)] = PauliOperator.uniform(n, p, support)
    u = tuple(gauge_ops[("U", rect.index)] for rect in h.rect_faces)
    stabs = OperatorSet(w1 + w2)
    logicals = _bare_logicals(h, gauge, stabs)

    rank_g = gauge.rank
    rank_s = stabs.rank
    s = rank_s
    k = (2 * n - rank_g - rank_s) // 2
    r = (rank_g - rank_s) // 2
    code = TsccCode(h, gauge_ops, labels, gauge, w1, w2, cc, u, logicals, n=n, k=k, r=r, s=s)
    if check:
        failed = [res for res in run_invariant_checks(code) if not res.passed]
        if failed:
            raise CodeInvariantError(f"{failed[0].name}: {failed[0].detail}")
    return code


# ---------------------------------------------------------------- recipes


def _push_labels(v: int, a: str, b: str) -> list[tuple]:
    """ZZ generators whose product is Z on corners ``a`` and ``b`` of triangle ``v``."""
    pair = {a, b}
    if pair == {"r", "g"}:
        return [("ZZ", v, 0)]
    if pair == {"g", "b"}:
        return [("ZZ", v, 1)]
    if pair == {"r", "b"}:
        return [("ZZ", v, 0), ("ZZ", v, 1)]
    raise ValueError(f"invalid corner pair {a}{b}")


def _inner(code: TsccCode, f: int, kind: str) -> list[tuple]:
    face = code.hypergraph.faces[f]
    edges = code.hypergraph.rank2_edges
    tag = "XX" if kind == "dashed" else "YY"
    return [(tag, e) for e in face.sigma1 if edges[e].kind == kind]


def _w1_steps(code: TsccCode, f: int) -> list[tuple]:
    return _inner(code, f, "dashed") + _inner(code, f, "solid")


def _edges_toward(code: TsccCode, f: int, color: str) -> list[int]:
    """Colex edges of face ``f`` whose other side is a face of ``color``."""
    colex = code.hypergraph.colex
    out = []
    for e in colex.face_edges(f):
        other = [g for g in colex.edge_faces[e] if g != f][0]
        if colex.faces[other].color == color:
            out.append(e)
    return out


def z_stab_decomposition(code: TsccCode, stack: str, face: int) -> Recipe:
    """Recipe for the Z-type stack check on ``face`` using XX, YY and ZZ gauges."""
    steps = _w1_steps(code, face)
    fcolor = code.face_color(face)
    if stack != fcolor:
        for v in code.hypergraph.faces[face].rank3:
            steps += _push_labels(v, fcolor, stack)
    return Recipe(("B", stack, face, "Z"), tuple(steps))


def w2_decomposition(code: TsccCode, face: int) -> Recipe:
    """W2 of ``face`` from outer XX, outer and inner YY, then ZZ on the other corners."""
    h = code.hypergraph
    hf = h.faces[face]
    outer = [h.rank2_edges[e] for e in hf.outer]
    steps = [("XX", e.index) for e in outer if e.kind == "dashed"]
    steps += [("YY", e.index) for e in outer if e.kind == "solid"]
    steps += _inner(code, face, "solid")
    others = [c for c in COLORS if c != hf.color]
    for v in hf.rank3:
        steps += _push_labels(v, *others)
    return Recipe(("W2", face), tuple(steps))


def maximal_decomposition(code: TsccCode, stack: str, face: int, pauli: str) -> Recipe | IndirectRule:
    """Direct recipe or XOR rule for a stack check under maximal gauge fixing."""
    h = code.hypergraph
    fcolor = code.face_color(face)
    target = ("B", stack, face, pauli)
    lookup = {}
    for e in h.rank2_edges:
        lookup[(e.colex_edge, e.face)] = e

    def side_steps(tag: str, color: str) -> tuple:
        steps = []
        for ce in _edges_toward(code, face, color):
            other = [g for g in h.colex.edge_faces[ce] if g != face][0]
            steps.append((tag, lookup[(ce, other)].index))
        return tuple(steps)

    if pauli == "X":
        if fcolor == stack:
            return Recipe(target, tuple(_inner(code, face, "dashed")))
        if fcolor == SUCC[stack]:
            return Recipe(target, side_steps("XX", stack))
        return IndirectRule(target, (("B", stack, face, "Z"), ("B", stack, face, "Y")))
    if pauli == "Y":
        if fcolor == stack:
            return Recipe(target, tuple(_inner(code, face, "solid")))
        if fcolor == PRED[stack]:
            return Recipe(target, side_steps("YY", stack))
        return IndirectRule(target, (("B", stack, face, "X"), ("B", stack, face, "Z")))
    if pauli == "Z":
        if fcolor == stack:
            return IndirectRule(target, (("B", stack, face, "X"), ("B", stack, face, "Y")))
        rects = {r.colex_edge: r.index for r in h.rect_faces}
        steps = _w1_steps(code, face) + [("U", rects[ce]) for ce in _edges_toward(code, face, stack)]
        return Recipe(target, tuple(steps))
    raise ValueError(pauli)


def x_stab_decomposition(code: TsccCode, stack: str, face: int, pauli: str = "X") -> Recipe | IndirectRule:
    """X- or Y-type stack check under maximal gauge fixing."""
    if pauli not in ("X", "Y"):
        raise ValueError("x_stab_decomposition covers X and Y checks")
    return maximal_decomposition(code, stack, face, pauli)


def hypercycle_sources(code: TsccCode, face: int) -> tuple[tuple, ...]:
    """Three stack checks whose product is W2 of ``face``."""
    c = code.face_color(face)
    return (("B", SUCC[c], face, "X"), ("B", c, face, "Y"), ("B", PRED[c], face, "Y"))


def build_schedule(code: TsccCode, mode: str) -> MeasurementSchedule:
    h = code.hypergraph
    xx = tuple(lab for lab in code.gauge_labels if lab[0] == "XX")
    yy = tuple(lab for lab in code.gauge_labels if lab[0] == "YY")
    recipes: dict = {}
    indirect: dict = {}
    faces = range(code.num_faces)
    if mode == "partial":
        zz = tuple(lab for lab in code.gauge_labels if lab[0] == "ZZ")
        rounds = (xx, yy, zz)
        for f in faces:
            recipes[("W1", f)] = Recipe(("W1", f), tuple(_w1_steps(code, f)))
            recipes[("W2", f)] = w2_decomposition(code, f)
            for c in COLORS:
                rec = z_stab_decomposition(code, c, f)
                recipes[rec.target] = rec
    elif mode == "maximal":
        rounds = (xx, yy, tuple(("U", r.index) for r in h.rect_faces))
        for f in faces:
            for c in COLORS:
                for p in PAULIS:
                    rule = maximal_decomposition(code, c, f, p)
                    (recipes if isinstance(rule, Recipe) else indirect)[rule.target] = rule
            fc = code.face_color(f)
            indirect[("W1", f)] = IndirectRule(("W1", f), (("B", fc, f, "Z"),))
            indirect[("W2", f)] = IndirectRule(("W2", f), hypercycle_sources(code, f))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return MeasurementSchedule(mode, rounds, recipes, indirect)


def validate_sequencing(ops: Sequence[PauliOperator]) -> bool:
    """True iff each operator commutes with the product of all earlier ones."""
    if not ops:
        return True
    running = ops[0]
    for op in ops[1:]:
        if not commutes(op, running):
            return False
        running = running * op
    return True


def validate_schedule(code: TsccCode, schedule: MeasurementSchedule) -> None:
    """Raise :class:`ScheduleError` on the first inconsistent recipe."""
    n = code.n
    for i, batch in enumerate(schedule.rounds):
        ops = [code.gauge_ops[lab] for lab in batch]
        for a in range(len(ops)):
            for b in range(a + 1, len(ops)):
                if not commutes(ops[a], ops[b]):
                    raise ScheduleError(f"{schedule.mode} round {i + 1}: {batch[a]} and {batch[b]} anticommute")
    for target, rec in schedule.recipes.items():
        last = 0
        for pos, step in enumerate(rec.steps):
            rnd = schedule.round_of(step)
            if rnd < last:
                raise ScheduleError(f"{schedule.mode} recipe {target}: step {pos} {step} goes back to round {rnd}")
            last = rnd
        ops = [code.gauge_ops[s] for s in rec.steps]
        if product_of(ops, n) != code.operator(target):
            raise ScheduleError(f"{schedule.mode} recipe {target}: product differs from the target check")
        running = ops[0]
        for pos, op in enumerate(ops[1:], start=1):
            if not commutes(op, running):
                raise ScheduleError(f"{schedule.mode} recipe {target}: step {pos} {rec.steps[pos]} breaks sequencing")
            running = running * op
    for target, rule in schedule.indirect.items():
        for src in rule.sources:
            if src not in schedule.recipes and src not in schedule.indirect:
                raise ScheduleError(f"{schedule.mode} rule {target}: source {src} is never measured")
        if product_of([code.operator(s) for s in rule.sources], n) != code.operator(target):
            raise ScheduleError(f"{schedule.mode} rule {target}: sources do not multiply to the target")
        try:
            schedule.available_round(target)
        except RecursionError as exc:
            raise ScheduleError(f"{schedule.mode} rule {target}: circular dependency") from exc


# --------------------------------------------------------------- checks


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _all_commute(a: Iterable[PauliOperator], b: OperatorSet) -> bool:
    return all(not b.syndrome_array(op).any() for op in a)


def _face_product(ops: Sequence[PauliOperator], faces: Iterable[int], n: int) -> PauliOperator:
    return product_of((ops[f] for f in faces), n)


def min_dressed_logical_weight(code: TsccCode, max_weight: int = 4) -> int | None:
    """Weight of the lightest Pauli in C(S) outside the gauge group, if <= ``max_weight``.

    Such an operator has trivial stabilizer syndrome but anticommutes with a
    bare logical. Single-qubit syndromes are combined meet-in-the-middle, so
    ``max_weight`` is capped at 4.
    """
    if not 1 <= max_weight <= 4:
        raise ValueError("max_weight must be between 1 and 4")
    n = code.n
    checks = OperatorSet(code.stabilizers.ops + code.bare_logicals)
    nl = len(code.bare_logicals)
    weights = 1 << np.arange(len(checks), dtype=object)[::-1]
    singles = []
    for q in range(n):
        for p in PAULIS:
            bits = checks.syndrome_array(PauliOperator.from_paulis(n, {q: p}))
            singles.append((frozenset((q,)), int(bits.astype(object) @ weights)))
    lmask = (1 << nl) - 1
    if any(sig >> nl == 0 and sig & lmask for _, sig in singles):
        return 1
    by_key: dict[int, dict[int, list]] = {1: {}, 2: {}}
    for qs, sig in singles:
        by_key[1].setdefault(sig >> nl, []).append((qs, sig))
    if max_weight >= 3:
        for (qa, sa), (qb, sb) in itertools.combinations(singles, 2):
            if qa != qb:
                by_key[2].setdefault((sa ^ sb) >> nl, []).append((qa | qb, sa ^ sb))
    for w, (ka, kb) in ((2, (1, 1)), (3, (1, 2)), (4, (2, 2))):
        if w > max_weight:
            break
        right = by_key[kb]
        for key, left in by_key[ka].items():
            for qa, sa in left:
                for qb, sb in right.get(key, ()):
                    if not (qa & qb) and (sa ^ sb) & lmask:
                        return w
    return None


def fixed_check_rank(code: TsccCode, mode: str) -> int:
    """Rank of every stack check the schedule fixes, plus the subsystem stabilizers."""
    sched = code.schedules[mode]
    ops = [code.operator(t) for t in sched.checks()]
    return OperatorSet(ops).rank


def _checks(code: TsccCode) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    h = code.hypergraph
    n = code.n
    nf = code.num_faces
    d = code.d
    by_color = {c: h.colex.faces_of_color(c) for c in COLORS}

    def expect(name, got, want):
        return name, lambda: (got() == want, f"got {got()}, expected {want}")

    def dependency(lhs_w, lhs_faces, rhs_w, rhs_faces):
        def run():
            left = product_of([code.w2[f] for f in lhs_faces], n)
            right = product_of([code.w1[f] for f in rhs_faces], n)
            return left == right, ""
        return run

    def cc_dependencies():
        for c in COLORS:
            for p in ("X", "Z"):
                prods = [product_of([code.cc_stabs[(c, f, p)] for f in by_color[col]], n) for col in COLORS]
                if not (prods[0] == prods[1] == prods[2]):
                    return False, f"stack {c}, type {p}"
        return True, ""

    def logical_pairing():
        L = code.bare_logicals
        want = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        got = np.array([[0 if commutes(a, b) else 1 for b in L] for a in L])
        return bool((got == want).all()), f"commutation matrix {got.tolist()}"

    def logicals_outside_gauge():
        return all(not in_group(L, code.gauge_gens) for L in code.bare_logicals), ""

    def dressed_distance():
        w = min_dressed_logical_weight(code, max_weight=4)
        return w == d // 2, f"lightest dressed logical has weight {w}"

    def hypercycle():
        for f in range(nf):
            srcs = hypercycle_sources(code, f)
            if product_of([code.operator(s) for s in srcs], n) != code.w2[f]:
                return False, f"face {f}"
        return True, ""

    def w1_is_own_stack_z():
        return all(code.w1[f] == code.cc_stabs[(code.face_color(f), f, "Z")] for f in range(nf)), ""

    def cc_abelian():
        ops = list(code.cc_stabs.values())
        return _all_commute(ops, OperatorSet(ops)), ""

    def cc_in_gauge():
        bad = [key for key, op in code.cc_stabs.items() if not in_group(op, code.gauge_gens)]
        return not bad, f"{len(bad)} stack checks outside the gauge group"

    def cc_commute_with_stabs():
        return _all_commute(code.cc_stabs.values(), code.stabilizers), ""

    def u_commute_z_checks():
        zs = OperatorSet([op for (c, f, p), op in code.cc_stabs.items() if p == "Z"])
        return _all_commute(code.u_square, zs) and _all_commute(code.u_square, code.stabilizers), ""

    def u_in_gauge():
        return all(in_group(u, code.gauge_gens) for u in code.u_square), ""

    def rect_tags():
        counts = {t: len(h.rects_with_tag(t)) for t in ("rg", "rb", "gb")}
        return sum(counts.values()) == 3 * nf, str(counts)

    def schedule_ok(mode):
        def run():
            try:
                validate_schedule(code, code.schedules[mode])
            except ScheduleError as exc:
                return False, str(exc)
            return True, f"{len(code.schedules[mode].recipes)} recipes"
        return run

    def counts(mode, want):
        def run():
            got = code.schedules[mode].counts()
            return got == want, str(got)
        return run

    return [
        expect("qubit_count", lambda: n, 3 * d * d),
        expect("face_count", lambda: nf, d * d // 2),
        expect("gauge_generator_count", lambda: len(code.gauge_gens), 10 * nf),
        expect("gauge_rank", lambda: code.gauge_gens.rank, 10 * nf - 2),
        expect("stabilizer_rank", lambda: code.s, 2 * nf - 2),
        expect("gauge_qubits", lambda: code.r, 4 * nf),
        expect("logical_qubits", lambda: code.k, 2),
        expect("parameter_sum", lambda: code.k + code.r + code.s, n),
        ("rect_face_count", rect_tags),
        ("stabilizers_commute_with_gauge", lambda: (_all_commute(code.w1 + code.w2, code.gauge_gens), "")),
        ("stabilizers_in_gauge_group", lambda: (all(in_group(w, code.gauge_gens) for w in code.w1 + code.w2), "")),
        ("dependency_red_green",
         dependency("W2", by_color["r"] + by_color["g"], "W1", by_color["b"] + by_color["r"])),
        ("dependency_green_blue",
         dependency("W2", by_color["g"] + by_color["b"], "W1", by_color["r"] + by_color["g"])),
        ("stack_check_dependencies", cc_dependencies),
        ("stack_checks_abelian", cc_abelian),
        ("stack_checks_in_gauge_group", cc_in_gauge),
        ("stack_checks_commute_with_stabilizers", cc_commute_with_stabs),
        ("w1_equals_own_stack_z_check", w1_is_own_stack_z),
        ("hypercycle_decomposition", hypercycle),
        ("rect_operators_in_gauge_group", u_in_gauge),
        ("rect_operators_commute_with_z_checks", u_commute_z_checks),
        ("logical_pairing", logical_pairing),
        ("logicals_commute_with_gauge", lambda: (_all_commute(code.bare_logicals, code.gauge_gens), "")),
        ("logicals_outside_gauge_group", logicals_outside_gauge),
        *([("dressed_distance_half_d", dressed_distance)] if d <= 8 else []),
        ("schedule_partial", schedule_ok("partial")),
        ("schedule_maximal", schedule_ok("maximal")),
        ("measurement_counts_partial", counts("partial", {"XX": 3 * nf, "YY": 3 * nf, "ZZ": 4 * nf})),
        ("measurement_counts_maximal", counts("maximal", {"XX": 3 * nf, "YY": 3 * nf, "U": 3 * nf})),
        expect("maximal_fixed_check_rank", lambda: fixed_check_rank(code, "maximal"), 6 * nf - 12),
    ]


def run_invariant_checks(code: TsccCode) -> list[CheckResult]:
    """Evaluate every named structural invariant of ``code``."""
    results = []
    for name, fn in _checks(code):
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not abort the sweep of checks
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
