import random

import pytest
from hypothesis import given
import hypothesis.strategies as st

from conftest import polys, rule_polys
from test_pauli import operators
from fractalcodes.algebra import LaurentPoly, Open, Periodic, parse_poly
from fractalcodes.codes import build_model, structurally_equal
from fractalcodes.errors import StructuralError, UnsupportedOperatorError
from fractalcodes.fractalizer import (
    LcaRuleSet, commensurability_basis, commutation_identity_holds, fractalize_code,
    fractalize_nonlocal, fractalize_op, fractalize_op_ho,
)
from fractalcodes.pauli import commutation_poly, commutes, make_operator, translate, weight


def P(text, p=2, names=("x",)):
    return parse_poly(text, p, list(names))


def Y(text, p=2):
    return P(text, p, ("y",))


def support_set(op):
    return {e for e, _ in op.support()[0].terms}


def test_ising_z_term_becomes_newman_moore():
    B = build_model("ising1d").zgens[0]
    nm = fractalize_op(B, LcaRuleSet.first_order([Y("1+y")]))
    assert support_set(nm) == {(0, 0), (-1, 0), (-1, -1)}
    assert weight(nm) == 3


def test_cluster_x_term():
    A = build_model("cluster1d").xgens[0]
    got = fractalize_op(A, LcaRuleSet.first_order([Y("1+y")]))
    xy = ("x", "y")
    assert got.coeffs == (P("1+(1+y)*x", 2, xy), P("1", 2, xy))


def test_identity_rule_gives_layer_copy():
    A = build_model("toric2d").xgens[0]
    lifted = fractalize_op(A, LcaRuleSet.identity(2, 2), s0=(3,))
    assert lifted.anchor == A.anchor + (3,)
    for c, c0 in zip(lifted.coeffs, A.coeffs):
        assert c == c0.embed(3, [0, 1])


def test_second_order_rule_on_ising():
    B = build_model("ising1d").zgens[0]
    rules = LcaRuleSet(2, 1, 1, 2, ((Y("1+y"), Y("1")),))
    got = fractalize_op_ho(B, rules)
    assert support_set(got) == {(0, 0), (-1, 0), (-1, -1), (-2, 0)}


@given(st.data())
def test_first_order_paths_agree(data):
    op = data.draw(operators(D=1))
    f = data.draw(rule_polys(op.p))
    rules = LcaRuleSet.first_order([f])
    assert fractalize_op(op, rules) == fractalize_op_ho(op, rules)


def test_second_order_needs_general_path():
    rules = LcaRuleSet(2, 1, 1, 2, ((Y("1+y"), Y("1")),))
    with pytest.raises(UnsupportedOperatorError):
        fractalize_op(build_model("ising1d").zgens[0], rules)


def test_rules_need_constant_term():
    with pytest.raises(StructuralError):
        LcaRuleSet.first_order([Y("y+y^2")])


# commensurability

def test_commensurate_rule_gives_full_space():
    cb = commensurability_basis(LcaRuleSet.first_order([Y("1+y+y^2")]), 0, 4, [4])
    assert cb.full and cb.dimension == 4


def test_nilpotent_power_leaves_nothing():
    # (1+y)^4 = 1 + y^4 = 0 on a length-4 ring, so q (f^4 - 1) = q forces q = 0
    cb = commensurability_basis(LcaRuleSet.first_order([Y("1+y")]), 0, 4, [4])
    assert cb.dimension == 0


def test_trivial_rule_commensurate():
    assert commensurability_basis(LcaRuleSet.identity(2, 1), 0, 5, [3]).full


def test_sierpinski_symmetry_operator():
    L = 8
    S = make_operator("X", 2, 1, 1, [LaurentPoly(2, 1, {(r,): 1 for r in range(L)})])
    ops = fractalize_nonlocal(S, LcaRuleSet.first_order([Y("1+y")]), (L, L), (Open(), Periodic(L)))
    assert len(ops) == L
    assert {weight(o, (Open(), Periodic(L))) for o in ops} == {27}
    rows = [{e[1] for e, _ in ops[0].support()[0].terms if e[0] == r} for r in range(L)]
    assert [len(r) for r in rows] == [1, 2, 2, 4, 2, 4, 4, 8]


def test_toric_logical_on_commensurate_torus():
    xs = ("x1", "x2")
    l1 = make_operator("X", 2, 2, 2, [LaurentPoly(2, 2, {(r, 0): 1 for r in range(4)}),
                                      LaurentPoly.zero(2, 2)])
    rules = LcaRuleSet.first_order([Y("1+y+y^2"), Y("1+y+y^2")])
    ops = fractalize_nonlocal(l1, rules, (4, 4, 4), (Periodic(4),) * 3)
    assert len(ops) == 4
    A = make_operator("Z", 2, 2, 2, [P("1+x1", 2, xs), P("1+x2", 2, xs)])
    fA = fractalize_op(A, rules)
    bc = (Periodic(4),) * 3
    for op in ops:
        for t in [(0, 0, 0), (1, 2, 3), (3, 1, 2)]:
            assert commutes(op, translate(fA, t), bc)


# code-level

def test_fractalized_ising_is_newman_moore():
    got = fractalize_code(build_model("ising1d"), LcaRuleSet.first_order([Y("1+y")]))
    assert structurally_equal(got, build_model("newman_moore"))


def test_identity_rules_layer_the_code():
    spec = build_model("toric2d")
    lay = fractalize_code(spec, LcaRuleSet.identity(2, 2))
    assert lay.D == 3 and len(lay.xgens) == len(spec.xgens)


def test_mismatched_rule_dimension():
    with pytest.raises(StructuralError):
        fractalize_code(build_model("toric2d"), LcaRuleSet.first_order([Y("1+y")]))


# commutativity preservation

@st.composite
def commuting_pairs(draw):
    p = draw(st.sampled_from([2, 3]))
    D = draw(st.integers(1, 2))
    m = draw(st.integers(1, 2))
    a = draw(operators(species="X", p=p, D=D, N=2))
    g = draw(polys(p=p, nvars=D, max_terms=3, lo=-2, hi=2))
    a1, a2 = a.natural()
    # b = (g a2, -g a1) cancels the natural-coefficient product term by term
    b = make_operator("Z", p, D, 2, [g * a2, -(g * a1)],
                      draw(st.tuples(*[st.integers(-2, 2)] * D)))
    names = ["y"] if m == 1 else ["y1", "y2"]
    rules = []
    for _ in range(D):
        lead = 1 + draw(st.integers(0, p - 2))
        extra = draw(st.lists(st.tuples(*[st.integers(0, 2)] * m), max_size=3))
        f = LaurentPoly(p, m, [((0,) * m, lead)] + [(e, 1) for e in extra if any(e)])
        rules.append(f)
    return a, b, LcaRuleSet.first_order(rules)


@given(commuting_pairs(), st.randoms(use_true_random=False))
def test_fractalization_preserves_commutation(case, rnd):
    a, b, rules = case
    assert commutation_poly(a, b).is_zero()
    for _ in range(5):
        s0 = tuple(rnd.randint(-3, 3) for _ in range(rules.m))
        s1 = tuple(rnd.randint(-3, 3) for _ in range(rules.m))
        fa, fb = fractalize_op(a, rules, s0), fractalize_op(b, rules, s1)
        assert commutes(fa, fb)
        assert commutation_identity_holds(a, b, rules, s0, s1)


@given(st.data())
def test_commutation_identity_for_any_pair(data):
    a = data.draw(operators(species="X", D=1))
    b = data.draw(operators(species="Z", p=a.p, D=1, N=a.N))
    f = data.draw(rule_polys(a.p))
    rules = LcaRuleSet.first_order([f])
    s0, s1 = (data.draw(st.integers(-3, 3)),), (data.draw(st.integers(-3, 3)),)
    assert commutation_identity_holds(a, b, rules, s0, s1)
