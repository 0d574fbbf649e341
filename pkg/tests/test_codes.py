import itertools

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from oracles import brute_min_weight, rank_mod_p
from fractalcodes.algebra import LaurentPoly, Open, Periodic, parse_poly
from fractalcodes.codes import (
    MODELS, CodeSpec, build_model, catalog, distance_bruteforce, dual_spec, excitation_code,
    excitation_map, instantiate, local_relations, logical_basis, logical_count, sparse_from_text,
    sparse_text, spec_from_text, spec_to_text, structurally_equal,
)
from fractalcodes.errors import StructuralError
from fractalcodes.fractalizer import LcaRuleSet, fractalize_code
from fractalcodes.pauli import make_operator

X12 = ("x1", "x2")


def P(text, p=2, names=("x",)):
    return parse_poly(text, p, list(names))


def Y(text, p=2):
    return P(text, p, ("y",))


def small_sizes(D):
    return {1: (5,), 2: (3, 3), 3: (2, 2, 2), 4: (2, 2, 2, 2)}[D]


# zoo

def test_toric2d_display():
    spec = build_model("toric2d")
    assert spec.xgens[0].coeffs == (P("1+x2", 2, X12), P("1+x1", 2, X12))
    assert spec.zgens[0].support() == (P("1+x1^-1", 2, X12), P("1+x2^-1", 2, X12))


def test_ising1d_display():
    spec = build_model("ising1d")
    assert not spec.xgens and spec.zgens[0].support() == (P("1+x^-1"),)


def test_toric3d_shape():
    spec = build_model("toric3d")
    assert (spec.D, spec.N, len(spec.xgens), len(spec.zgens)) == (3, 3, 3, 1)


def test_catalog_lists_every_model():
    assert set(catalog()) == set(MODELS)


def test_unknown_model():
    with pytest.raises(StructuralError):
        build_model("nope")


@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("p", [2, 3])
def test_models_commute_and_round_trip(name, p):
    spec = build_model(name, p)
    assert spec_from_text(spec_to_text(spec)) == spec


# instantiation

def brute_rows(op, sizes):
    """Place every translate on a periodic torus by walking the support directly."""
    N = op.N
    rows = []
    for shift in itertools.product(*[range(L) for L in sizes]):
        v = np.zeros(int(np.prod(sizes)) * N, dtype=np.int64)
        for q, s in enumerate(op.support()):
            for e, c in s.terms:
                site = tuple((a + b) % L for a, b, L in zip(e, shift, sizes))
                col = int(np.ravel_multi_index(site, sizes)) * N + q
                v[col] = (v[col] + c) % op.p
        rows.append(v)
    return np.array(rows)


@pytest.mark.parametrize("name", ["toric2d", "cluster1d", "newman_moore", "toric3d"])
def test_instantiation_matches_direct_placement(name):
    spec = build_model(name)
    sizes = small_sizes(spec.D)
    inst = instantiate(spec, sizes)
    for H, gens in ((inst.Hx, spec.xgens), (inst.Hz, spec.zgens)):
        if gens:
            ref = np.vstack([brute_rows(g, sizes) for g in gens])
            assert rank_mod_p(np.vstack([H, ref]), 2) == rank_mod_p(H, 2) == rank_mod_p(ref, 2)


def test_toric2d_counts():
    inst = instantiate(build_model("toric2d"), (3, 3))
    assert inst.n == 18 and inst.rank_x() == 8 and inst.rank_z() == 8
    assert logical_count(inst) == 2


def test_open_ising_chain():
    inst = instantiate(build_model("ising1d"), (5,), (Open(),))
    assert inst.Hz.shape[0] == 4 and inst.rank_z() == 4
    assert logical_count(inst) == 1


def test_newman_moore_generator_count():
    inst = instantiate(build_model("newman_moore"), (4, 4))
    assert inst.n == 16 and inst.Hz.shape[0] == 16
    assert logical_count(inst) == 16 - rank_mod_p(inst.Hz, 2)


def test_fractal_toric_degeneracy():
    rules = LcaRuleSet.first_order([Y("1+y+y^2")] * 2)
    inst = instantiate(fractalize_code(build_model("toric2d"), rules), (4, 4, 4))
    assert logical_count(inst) == 8


def test_layering_multiplies_k():
    spec = build_model("toric2d")
    lay = fractalize_code(spec, LcaRuleSet.identity(2, 2))
    assert logical_count(instantiate(lay, (3, 3, 4))) == 4 * logical_count(instantiate(spec, (3, 3)))


# logicals and distance

@pytest.mark.parametrize("name,sizes", [("toric2d", (4, 4)), ("ising1d", (5,)), ("cluster1d", (4,))])
def test_logical_basis_pairing(name, sizes):
    inst = instantiate(build_model(name), sizes)
    lb = logical_basis(inst)
    assert lb.k == logical_count(inst)
    assert np.array_equal(lb.x @ lb.z.T % 2, np.eye(lb.k, dtype=np.int64))
    assert not (inst.Hz @ lb.x.T % 2).any() and not (inst.Hx @ lb.z.T % 2).any()


def test_ising_logicals():
    lb = logical_basis(instantiate(build_model("ising1d"), (5,)))
    assert lb.k == 1 and lb.x.sum() == 5


def test_toric_distance():
    d = distance_bruteforce(instantiate(build_model("toric2d"), (3, 3)), 4)
    assert (d.d, d.d_x, d.d_z) == (3, 3, 3)


def test_ising_distances():
    d = distance_bruteforce(instantiate(build_model("ising1d"), (5,)), 5)
    assert (d.d_x, d.d_z, d.d) == (5, 1, 1)


def test_newman_moore_min_symmetry_weight():
    inst = instantiate(build_model("newman_moore"), (4, 4))
    lb = logical_basis(inst)
    d = distance_bruteforce(inst, 16)
    assert d.d_x == brute_min_weight(inst.Hz, lb.z, 2, 16)


@pytest.mark.parametrize("name,sizes", [("toric2d", (2, 3)), ("cluster1d", (3,)), ("ising2d", (2, 2))])
def test_distance_against_full_enumeration(name, sizes):
    inst = instantiate(build_model(name), sizes)
    lb = logical_basis(inst)
    got = distance_bruteforce(inst, inst.n)
    assert got.d_x == brute_min_weight(inst.Hz, lb.z, 2, inst.n)
    assert got.d_z == brute_min_weight(inst.Hx, lb.x, 2, inst.n)


# syndrome invariance

@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("p", [2, 3])
def test_syndrome_invariance(name, p):
    spec = build_model(name, p)
    inst = instantiate(spec, small_sizes(spec.D))
    assert inst.css_orthogonal()
    rng = np.random.default_rng(7)
    e = rng.integers(0, p, inst.n)
    for Hs, Hc in ((inst.Hx, inst.Hz), (inst.Hz, inst.Hx)):
        if Hs.shape[0] == 0 or Hc.shape[0] == 0:
            continue
        s = rng.integers(0, p, Hs.shape[0]) @ Hs % p
        assert np.array_equal(Hc @ e % p, Hc @ ((e + s) % p) % p)


def test_excitation_map_matches_parity_checks():
    spec = build_model("toric2d")
    sizes = (4, 4)
    inst = instantiate(spec, sizes)
    op = make_operator("X", 2, 2, 2, [P("x1", 2, X12), LaurentPoly.zero(2, 2)])
    ex = excitation_map(op, spec)
    v = np.zeros(inst.n, dtype=np.int64)
    v[inst.column((1, 0), 0)] = 1
    syndrome = inst.Hz @ v % 2
    flagged = {inst.z_labels[i][1] for i in np.flatnonzero(syndrome)}
    from_map = {tuple(t % L for t, L in zip(e, sizes)) for e, _ in ex.polys[0].terms}
    assert flagged == from_map


# excitations and relations

def test_stabilizer_has_no_excitations():
    spec = build_model("toric2d")
    assert excitation_map(spec.xgens[0], spec).is_zero()


def test_ising2d_local_relation():
    rel = local_relations(build_model("ising2d"))
    assert len(rel) == 1
    assert rel[0].l == (P("1+x2", 2, X12), P("1+x1", 2, X12))


def test_ising1d_has_no_relation():
    assert local_relations(build_model("ising1d"), 3) == []


def test_excitation_code_of_fractal_ising_is_fractal_toric():
    for f1, f2 in (("1+y", "1+y+y^2"), ("1+y^2", "1+y+y^3")):
        rules = LcaRuleSet.first_order([Y(f1), Y(f2)])
        exc = excitation_code(fractalize_code(build_model("ising2d"), rules))
        assert structurally_equal(exc, fractalize_code(build_model("toric2d"), rules))


def test_structural_inequality():
    assert not structurally_equal(build_model("toric2d"), build_model("ising2d"))
    assert structurally_equal(build_model("toric2d"), dual_spec(dual_spec(build_model("toric2d"))))


def test_noncommuting_spec_rejected():
    X = make_operator("X", 2, 1, 1, [P("1")])
    Z = make_operator("Z", 2, 1, 1, [P("1")])
    with pytest.raises(StructuralError):
        CodeSpec(2, 1, 1, (X,), (Z,))


# sparse export

@given(st.integers(1, 6), st.integers(1, 6), st.randoms(use_true_random=False))
def test_sparse_round_trip(r, c, rnd):
    M = np.array([[rnd.randrange(3) for _ in range(c)] for _ in range(r)])
    text = sparse_text(M)
    assert text.splitlines()[0] == f"{r} {c} {np.count_nonzero(M)}"
    assert np.array_equal(sparse_from_text(text), M)
