import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from oracles import rank_mod_p
from fractalcodes.algebra import Open, Periodic, parse_poly
from fractalcodes.codes import build_model, instantiate, logical_count
from fractalcodes.errors import PreconditionError, UnsupportedOperatorError
from fractalcodes.fractalizer import LcaRuleSet, fractalize_code
from fractalcodes.linalg import inverse_fp
from fractalcodes.threestep import (
    CxCircuit, Gate, apply_circuit, build_M, conjugate, cx_synthesize, groups_equal, layered_code,
    three_step, verify_three_step,
)


def Y(text, p=2):
    return parse_poly(text, p, ["y"])


def random_unit_diagonal(rng, n, p=2):
    while True:
        A = rng.integers(0, p, (n, n))
        np.fill_diagonal(A, 1)
        if inverse_fp(A, p) is not None:
            return A


# layering

def test_layered_ising_is_decoupled_chains():
    lay = layered_code(build_model("ising1d"), 4)
    inst = instantiate(lay, (5, 4))
    assert inst.Hz.shape[0] == 20 and logical_count(inst) == 4
    assert all(row.reshape(5, 4).any(axis=0).sum() == 1 for row in inst.Hz)


def test_layering_multiplies_degeneracy():
    lay = layered_code(build_model("toric2d"), 3)
    assert logical_count(instantiate(lay, (3, 3, 3))) == 3 * 2


# conjugation matrix

def test_identity_rule_gives_identity_matrix():
    LM = build_M(LcaRuleSet.identity(2, 1), (3, 4))
    assert np.array_equal(LM.M, np.eye(12, dtype=np.int64))


def test_circulant_blocks():
    LM = build_M(LcaRuleSet.first_order([Y("1+y+y^2")]), (2, 4), (Open(), Periodic(4)))
    F = np.array([[1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 1, 1]])
    assert np.array_equal(LM.M[:4, :4], np.eye(4, dtype=np.int64))
    assert np.array_equal(LM.M[4:, 4:], F)
    assert not LM.M[:4, 4:].any()


def test_non_invertible_rule_rejected():
    with pytest.raises(PreconditionError):
        build_M(LcaRuleSet.first_order([Y("1+y")]), (3, 2), (Open(), Periodic(2)))


def test_incommensurate_periodic_axis_rejected():
    with pytest.raises(PreconditionError):
        build_M(LcaRuleSet.first_order([Y("1+y+y^2")]), (3, 4))


# CX synthesis

def test_trivial_circuits():
    assert len(cx_synthesize(np.eye(5, dtype=np.int64))) == 0
    T = np.eye(3, dtype=np.int64)
    T[0, 1] = 1
    circ = cx_synthesize(T)
    assert [(g.i, g.j) for g in circ.gates] == [(0, 1)]
    assert circ.to_text() == "CX 0 1\n"


@given(st.integers(2, 16), st.integers(0, 10_000))
def test_synthesis_reconstructs(n, seed):
    M = random_unit_diagonal(np.random.default_rng(seed), n)
    assert np.array_equal(cx_synthesize(M).matrix(), M)


@given(st.integers(2, 8), st.integers(0, 10_000))
def test_synthesis_over_f3(n, seed):
    rng = np.random.default_rng(seed)
    while True:
        M = rng.integers(0, 3, (n, n))
        if inverse_fp(M, 3) is not None:
            break
    circ = cx_synthesize(M, 3, allow_zero_diagonal=True)
    assert np.array_equal(circ.matrix(), M % 3)
    assert all(line.split()[0] in ("CXP", "MUL") for line in circ.to_text().splitlines())


def test_zero_diagonal_needs_opt_in():
    M = np.array([[0, 1], [1, 0]])
    with pytest.raises(PreconditionError):
        cx_synthesize(M)
    assert np.array_equal(cx_synthesize(M, allow_zero_diagonal=True).matrix(), M)


@given(st.integers(2, 10), st.integers(0, 10_000))
def test_circuit_conjugation_matches_matrix(n, seed):
    rng = np.random.default_rng(seed)
    M = random_unit_diagonal(rng, n)
    X = rng.integers(0, 2, (3, n))
    Z = rng.integers(0, 2, (3, n))
    cx, cz = conjugate(X, Z, M, 2)
    ax, az = apply_circuit(cx_synthesize(M), X, Z)
    assert np.array_equal(cx, ax) and np.array_equal(cz, az)
    # symplectic products survive conjugation
    assert np.array_equal(X @ Z.T % 2, cx @ cz.T % 2)
    back_x, back_z = conjugate(cx, cz, inverse_fp(M, 2), 2)
    assert np.array_equal(back_x, X % 2) and np.array_equal(back_z, Z % 2)


# full pipeline

@pytest.mark.parametrize("name,sizes,bc", [
    ("toric2d", (4, 4, 4), None),
    ("ising1d", (4, 4), None),
    ("ising1d", (6, 4), (Open(), Periodic(4))),
    ("toric2d", (3, 5, 4), (Open(), Open(), Periodic(4))),
])
def test_pipeline_equals_fractalization(name, sizes, bc):
    rules = LcaRuleSet.first_order([Y("1+y+y^2")] * build_model(name).D)
    out = verify_three_step(build_model(name), rules, sizes, bc)
    assert out["equal"] and out["generators_identical"]


def test_pipeline_over_f3():
    rules = LcaRuleSet.first_order([Y("1+y+2*y^2", 3)])
    sizes, bc = (5, 3), (Open(), Periodic(3))
    assert verify_three_step(build_model("ising1d", 3), rules, sizes, bc)["equal"]


def test_newman_moore_rule_is_never_invertible():
    # f(1) = 0 for f = 1 + y over F_2, so F has no inverse on any periodic ring
    rules = LcaRuleSet.first_order([Y("1+y")])
    for Ly in (3, 4, 5):
        with pytest.raises(PreconditionError):
            three_step(build_model("ising1d"), rules, (5, Ly), (Open(), Periodic(Ly)))


def test_ising_pipeline_gives_fractal_ising():
    rules = LcaRuleSet.first_order([Y("1+y+y^2")])
    sizes, bc = (5, 4), (Open(), Periodic(4))
    res = three_step(build_model("ising1d"), rules, sizes, bc)
    ref = instantiate(fractalize_code(build_model("ising1d"), rules), sizes, bc)
    assert np.array_equal(res.Hz, ref.Hz)


def test_zero_anchor_regrouping_is_trivial():
    rules = LcaRuleSet.first_order([Y("1+y+y^2")])
    sizes, bc = (4, 4), (Open(), Periodic(4))
    a = three_step(build_model("ising1d"), rules, sizes, bc, regroup=False)
    b = three_step(build_model("ising1d"), rules, sizes, bc, regroup=True)
    assert groups_equal((a.Hx, a.Hz), (b.Hx, b.Hz), 2)


def test_groups_equal_distinguishes_codes():
    t = instantiate(build_model("toric2d"), (3, 3))
    assert groups_equal((t.Hx, t.Hz), (t.Hx, t.Hz), 2)
    i = instantiate(fractalize_code(build_model("ising1d"), LcaRuleSet.identity(2, 1)), (3, 6))
    assert not groups_equal((t.Hx, t.Hz), (i.Hx, i.Hz), 2)


def test_higher_order_rules_unsupported():
    rules = LcaRuleSet(2, 1, 1, 2, ((Y("1+y"), Y("1")),))
    with pytest.raises(UnsupportedOperatorError):
        three_step(build_model("ising1d"), rules, (4, 4), (Open(), Periodic(4)))
