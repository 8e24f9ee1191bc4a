import itertools

import numpy as np
import pytest

from tscc.correctability import tscc_correctable
from tscc.decoders import (
    Cluster,
    DecodingError,
    cc_erasure_decode,
    cluster,
    correct_x,
    correct_z_gauge,
    correct_z_plain,
    decode,
    decode_arrays,
    decode_fails,
    extract_syndrome,
    is_logical_failure,
    peel,
)
from tscc.erasure import ErasurePattern, RngStream, sample_erasure
from tscc.gf2 import BinaryVector
from tscc.lattice import COLORS
from tscc.pauli import OperatorSet, PauliOperator, in_group, syndrome

MODES = ["partial", "maximal"]


def random_patterns(code, eps, count, seed):
    return [sample_erasure(code.n, eps, RngStream(seed, t)) for t in range(count)]


def residual_syndrome_zero(code, mode, error):
    checks = list(code.w1) + list(code.w2)
    for c in COLORS:
        checks += list(code.cc_checks(c, "Z").ops)
        if mode == "maximal":
            checks += list(code.cc_checks(c, "X").ops)
    return not syndrome(OperatorSet(checks), error).any()


# ---------------------------------------------------------------- syndromes


@pytest.mark.parametrize("mode", MODES)
def test_identity_error_has_zero_syndrome(code4, mode):
    assert extract_syndrome(code4, mode, PauliOperator.identity(code4.n)).is_zero()


def test_single_x_flips_stack_checks_around_its_vertex(code4):
    h = code4.hypergraph
    for q in range(code4.n):
        err = PauliOperator.from_paulis(code4.n, {q: "X"})
        syn = extract_syndrome(code4, "partial", err)
        c = q % 3
        around = set(h.colex.vertex_faces[q // 3])
        assert set(np.flatnonzero(syn.cc_x[c])) == around
        assert not syn.cc_x[[i for i in range(3) if i != c]].any()
        own = {f for f in around if code4.face_color(f) == COLORS[c]}
        assert set(np.flatnonzero(syn.tscc_w1)) == own


def test_w2_from_stack_checks_matches_direct(code4):
    rng = np.random.default_rng(0)
    for _ in range(1000):
        err = PauliOperator.from_arrays(rng.integers(0, 2, code4.n), rng.integers(0, 2, code4.n))
        derived = extract_syndrome(code4, "maximal", err).tscc_w2
        assert np.array_equal(derived, code4.w2_set.syndrome_array(err))


def test_syndrome_rejects_wrong_size(code4):
    with pytest.raises(ValueError):
        extract_syndrome(code4, "partial", PauliOperator.identity(3))
    with pytest.raises(ValueError):
        extract_syndrome(code4, "other", PauliOperator.identity(code4.n))


# ------------------------------------------------------------------ peeling


def test_single_erasure_always_peeled(code4):
    for q, letter in itertools.product(range(code4.n), "IXYZ"):
        pattern = ErasurePattern.from_paulis(code4.n, [q], {} if letter == "I" else {q: letter})
        res = peel(code4, pattern, extract_syndrome(code4, "partial", pattern.induced))
        assert res.remaining == ()
        assert res.estimate == pattern.induced
        assert res.syndrome.is_zero()


def test_peel_empty_pattern_is_noop(code4):
    syn = extract_syndrome(code4, "partial", PauliOperator.identity(code4.n))
    res = peel(code4, [], syn)
    assert res.remaining == () and res.estimate.is_identity()


def test_triangle_pair_sharing_all_w2_checks_is_not_peeled(code4):
    # Corners 0 and 1 sit on the same triangle: every W2 check touching one
    # touches the other, so each has only its own W1 check to itself.
    pattern = ErasurePattern.from_paulis(code4.n, [0, 1], {0: "X", 1: "Z"})
    res = peel(code4, pattern, extract_syndrome(code4, "partial", pattern.induced))
    assert res.remaining == (0, 1)
    assert res.estimate.is_identity()


def test_peel_cascades_to_fixed_point(code8):
    # A pair that blocks each other at first can be unlocked once a neighbour is fixed.
    for pattern in random_patterns(code8, 0.05, 50, 21):
        syn = extract_syndrome(code8, "partial", pattern.induced)
        res = peel(code8, pattern, syn)
        again = peel(code8, res.remaining, res.syndrome)
        assert again.estimate.is_identity() and again.remaining == res.remaining


# --------------------------------------------------------------- clustering


def test_cluster_examples(code8):
    assert cluster(code8, []) == []
    L = code8.hypergraph.colex.L
    far = [0, 3 * 4 * ((L // 2) * L + L // 2)]  # cells (0, 0) and (L/2, L/2)
    cls = cluster(code8, far)
    assert len(cls) == 2
    everything = cluster(code8, range(code8.n))
    assert len(everything) == 1 and everything[0].qubits == tuple(range(code8.n))


def test_clusters_partition_erasure_and_do_not_share_checks(code8):
    for pattern in random_patterns(code8, 0.08, 30, 4):
        cls = cluster(code8, pattern)
        joined = sorted(q for c in cls for q in c.qubits)
        assert joined == list(pattern.erased)
        for a, b in itertools.combinations(cls, 2):
            assert not set(a.checks) & set(b.checks)


# ------------------------------------------------------ color-code solver


def test_cc_erasure_decode_examples(code4):
    checks = code4.cc_checks("r", "Z")
    zero = BinaryVector.zeros(len(checks))
    assert cc_erasure_decode(checks, [], zero).is_identity()
    with pytest.raises(DecodingError):
        cc_erasure_decode(checks, [], BinaryVector.from_support(len(checks), [0]))
    for q in code4.stack_qubits("r"):
        bits = checks.syndrome_array(PauliOperator.from_paulis(code4.n, {q: "X"}))
        est = cc_erasure_decode(checks, [q], BinaryVector.from_bits(bits))
        assert est == PauliOperator.from_paulis(code4.n, {q: "X"})


def test_cc_erasure_decode_reproduces_syndrome(code4):
    rng = np.random.default_rng(2)
    qs = np.asarray(code4.stack_qubits("r"))
    for pauli, checks in (("X", code4.cc_checks("r", "Z")), ("Z", code4.cc_checks("r", "X"))):
        for _ in range(1000):
            erased = qs[rng.random(qs.size) < 0.3]
            flips = erased[rng.random(erased.size) < 0.5]
            err = PauliOperator.uniform(code4.n, pauli, flips.tolist())
            bits = checks.syndrome_array(err)
            est = cc_erasure_decode(checks, erased.tolist(), BinaryVector.from_bits(bits))
            assert set(est.support()) <= set(erased.tolist())
            assert np.array_equal(checks.syndrome_array(est), bits)
            assert {est.letter(q) for q in est.support()} <= {pauli}


def test_cc_erasure_decode_rejects_mixed_checks(code4):
    mixed = OperatorSet([code4.cc_stabs[("r", 0, "X")], code4.cc_stabs[("r", 0, "Z")]])
    with pytest.raises(ValueError):
        cc_erasure_decode(mixed, [0], BinaryVector.zeros(2))


# ------------------------------------------------------------------- stages


def test_correct_x_ignores_pure_z_errors(code4):
    pattern = ErasurePattern.from_paulis(code4.n, [0, 4, 8], {0: "Z", 4: "Z"})
    syn = extract_syndrome(code4, "partial", pattern.induced)
    est, _ = correct_x(code4, pattern.erased, syn)
    assert est.is_identity()


def test_correct_z_gauge_ignores_pure_x_errors(code4):
    pattern = ErasurePattern.from_paulis(code4.n, [0, 4, 8], {0: "X", 8: "X"})
    syn = extract_syndrome(code4, "maximal", pattern.induced)
    est, _ = correct_z_gauge(code4, pattern.erased, syn)
    assert est.is_identity()


def test_correct_z_plain_zero_syndrome_gives_identity(code4):
    syn = extract_syndrome(code4, "partial", PauliOperator.identity(code4.n))
    est, _ = correct_z_plain(code4, [0, 1, 2], syn)
    assert est.is_identity()


def test_correct_z_plain_fixes_single_z(code4):
    for q in range(code4.n):
        err = PauliOperator.from_paulis(code4.n, {q: "Z"})
        syn = extract_syndrome(code4, "partial", err)
        est, after = correct_z_plain(code4, [q], syn)
        assert est == err
        assert not after.tscc_w2.any()


def test_x_stage_residual_is_gauge_or_logical(code8):
    for pattern in random_patterns(code8, 0.15, 60, 8):
        syn = extract_syndrome(code8, "partial", pattern.induced)
        est, after = correct_x(code8, pattern.erased, syn)
        x_part = PauliOperator.from_arrays(pattern.induced.x_array(), np.zeros(code8.n, dtype=np.uint8))
        residual = x_part * est
        assert not after.cc_x.any()
        assert not code8.w1_set.syndrome_array(residual).any()
        assert set(est.support()) <= set(pattern.erased)
        assert in_group(residual, code8.gauge_gens) or is_logical_failure(code8, residual) or \
            not code8.w2_set.syndrome_array(residual).any()


def test_clearing_stack_syndromes_clears_w2(code8):
    for pattern in random_patterns(code8, 0.2, 40, 12):
        syn = extract_syndrome(code8, "maximal", pattern.induced)
        _, syn = correct_x(code8, pattern.erased, syn)
        _, syn = correct_z_gauge(code8, pattern.erased, syn)
        assert not syn.cc_x.any() and not syn.cc_z.any()
        assert not syn.tscc_w2.any()


def test_stack_order_irrelevant_for_x_stage(code8):
    # Stacks are disjoint, so each stack's share of the estimate can be solved on its own.
    for pattern in random_patterns(code8, 0.15, 20, 13):
        syn = extract_syndrome(code8, "partial", pattern.induced)
        full, _ = correct_x(code8, pattern.erased, syn)
        parts = PauliOperator.identity(code8.n)
        for c in reversed(range(3)):
            qs = [q for q in pattern.erased if q % 3 == c]
            bits = BinaryVector.from_bits(syn.cc_x[c])
            parts = parts * cc_erasure_decode(code8.cc_checks(COLORS[c], "Z"), qs, bits)
        assert parts == full


# ---------------------------------------------------------------- pipeline


@pytest.mark.parametrize("mode", MODES)
def test_empty_pattern_succeeds(code4, mode):
    out = decode(code4, mode, ErasurePattern.from_paulis(code4.n, []))
    assert not out.failed and out.estimate.is_identity()


@pytest.mark.parametrize("mode", MODES)
def test_every_single_erasure_decodes(code4, mode):
    for q, letter in itertools.product(range(code4.n), "IXYZ"):
        pattern = ErasurePattern.from_paulis(code4.n, [q], {} if letter == "I" else {q: letter})
        out = decode(code4, mode, pattern)
        assert not out.failed, (q, letter)
        assert out.estimate == pattern.induced


@pytest.mark.parametrize("mode", MODES)
def test_successful_decodes_clear_every_syndrome(code8, mode):
    for pattern in random_patterns(code8, 0.15, 80, 30):
        out = decode(code8, mode, pattern)
        residual = pattern.induced * out.estimate
        assert residual_syndrome_zero(code8, mode, residual)
        assert set(out.estimate.support()) <= set(pattern.erased)


@pytest.mark.parametrize("mode", MODES)
def test_fast_verdict_matches_full_decode(code8, mode):
    for pattern in random_patterns(code8, 0.25, 100, 31):
        assert decode_fails(code8, mode, pattern) == decode(code8, mode, pattern).failed


@pytest.mark.parametrize("mode", MODES)
def test_gauge_residual_never_reported_as_failure(code4, mode):
    seen = 0
    for pattern in random_patterns(code4, 0.3, 150, 40):
        out = decode(code4, mode, pattern)
        if in_group(pattern.induced * out.estimate, code4.gauge_gens):
            seen += 1
            assert not out.failed
    assert seen > 0


def test_gauge_residual_counts_as_success(code4):
    for g in code4.gauge_gens.ops[:40]:
        assert not is_logical_failure(code4, g)
    assert is_logical_failure(code4, code4.bare_logicals[0])


@pytest.mark.parametrize("mode", MODES)
def test_cluster_order_does_not_matter(code8, mode):
    for pattern in random_patterns(code8, 0.12, 40, 50):
        syn = extract_syndrome(code8, mode, pattern.induced)
        base = decode_arrays(code8, mode, pattern.erased, syn.copy())
        res = peel(code8, pattern, syn)
        k = len(cluster(code8, res.remaining))
        order = list(range(k))[::-1]
        flipped = decode_arrays(code8, mode, pattern.erased, syn.copy(), cluster_order=order)
        assert all(np.array_equal(a, b) for a, b in zip(base, flipped))


def test_maximal_stage_order_does_not_matter(code8):
    for pattern in random_patterns(code8, 0.3, 60, 60):
        syn = extract_syndrome(code8, "maximal", pattern.induced)
        a = decode_arrays(code8, "maximal", pattern.erased, syn.copy())
        b = decode_arrays(code8, "maximal", pattern.erased, syn.copy(), z_first=True)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))


@pytest.mark.parametrize("mode", MODES)
def test_weight_two_correctable_patterns_decode(code4, mode):
    letters = "IXYZ"
    for a, b in itertools.combinations(range(code4.n), 2):
        if not tscc_correctable(code4, [a, b]).correctable:
            continue
        for la, lb in itertools.product(letters, letters):
            paulis = {q: p for q, p in ((a, la), (b, lb)) if p != "I"}
            assert not decode_fails(code4, mode, ErasurePattern.from_paulis(code4.n, [a, b], paulis))


def test_maximal_beats_partial_at_moderate_eps(code8):
    patterns = random_patterns(code8, 0.2, 300, 70)
    partial = sum(decode_fails(code8, "partial", p) for p in patterns)
    maximal = sum(decode_fails(code8, "maximal", p) for p in patterns)
    assert maximal < partial
