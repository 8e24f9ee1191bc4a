import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tscc.pauli import OperatorSet, PauliOperator, commutes, in_group, product, product_of, syndrome


def P(s):
    return PauliOperator.from_string(s)


def random_pauli(rng, n):
    return PauliOperator.from_arrays(rng.integers(0, 2, n), rng.integers(0, 2, n))


def test_commutation_examples():
    assert not commutes(P("X"), P("Z"))
    assert commutes(P("X"), P("X"))
    assert commutes(P("ZZ"), P("XX"))
    with pytest.raises(ValueError):
        commutes(P("X"), P("XX"))


def test_product_examples():
    a = P("XYZI")
    assert product(a, a).is_identity()
    assert product(P("X"), P("Z")) == P("Y")
    with pytest.raises(ValueError):
        product(P("X"), P("XX"))


def test_support_weight_letters():
    p = P("IXYZ")
    assert p.support() == [1, 2, 3]
    assert p.weight == 3
    assert p.to_string() == "IXYZ"


def test_octagon_w1_from_edge_products(code4):
    h = code4.hypergraph
    octagon = next(f for f in h.faces if len(f.corners) == 8)
    prod = product_of((code4.gauge_ops[("XX" if h.rank2_edges[e].kind == "dashed" else "YY", e)]
                       for e in octagon.sigma1), code4.n)
    assert prod == PauliOperator.uniform(code4.n, "Z", octagon.corners)
    assert prod.weight == 8


def test_syndrome_examples(code4):
    f = 0
    checks = OperatorSet([code4.w1[f]])
    q = code4.hypergraph.faces[f].corners[0]
    assert syndrome(checks, PauliOperator.from_paulis(code4.n, {q: "Z"})).to_array().tolist() == [0]
    assert not syndrome(code4.stabilizers, PauliOperator.identity(code4.n)).any()


def test_w2_syndrome_of_single_x_matches_support(code4):
    # W2 of face f acts as X on the corner of color succ(f), Y on the others.
    for q in range(code4.n):
        err = PauliOperator.from_paulis(code4.n, {q: "X"})
        got = code4.w2_set.syndrome_array(err)
        want = [1 if code4.w2[f].letter(q) in ("Y", "Z") else 0 for f in range(code4.num_faces)]
        assert got.tolist() == want
        assert got.sum() == 2  # Y on the own face and on the successor-colored face


def test_in_group_examples(code4):
    assert in_group(PauliOperator.identity(code4.n), code4.gauge_gens)
    assert in_group(code4.w1[0], code4.gauge_gens)
    assert not in_group(code4.bare_logicals[0], code4.gauge_gens)


def test_syndrome_linearity(code4):
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = random_pauli(rng, code4.n), random_pauli(rng, code4.n)
        sa = syndrome(code4.stabilizers, a)
        sb = syndrome(code4.stabilizers, b)
        assert syndrome(code4.stabilizers, a * b) == sa ^ sb


def test_random_gauge_products_are_members(code4):
    rng = np.random.default_rng(4)
    gens = code4.gauge_gens
    for _ in range(20):
        pick = rng.integers(0, 2, len(gens)).astype(bool)
        op = product_of((g for g, k in zip(gens, pick) if k), code4.n)
        assert in_group(op, gens)


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet="IXYZ", min_size=1, max_size=70).flatmap(
    lambda s: st.tuples(st.just(s), st.text(alphabet="IXYZ", min_size=len(s), max_size=len(s)))))
def test_commutes_symmetric_and_matches_letters(pair):
    a, b = P(pair[0]), P(pair[1])
    assert commutes(a, b) == commutes(b, a)
    clashes = sum(x != "I" and y != "I" and x != y for x, y in zip(*pair))
    assert commutes(a, b) == (clashes % 2 == 0)
