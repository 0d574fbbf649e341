"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from oracles import rank_mod_p
from fractalcodes.algebra import LaurentPoly, Periodic, parse_poly
from fractalcodes.algrel import related_pair, related_triple
from fractalcodes.codes import (
    MODELS, build_model, excitation_code, instantiate, logical_count, structurally_equal,
)
from fractalcodes.errors import BudgetExceeded
from fractalcodes.fractalizer import (
    LcaRuleSet, commutation_identity_holds, fractalize_code, fractalize_op,
)
from fractalcodes.linalg import inverse_fp
from fractalcodes.lca import parse_pbm, render_pbm, reversible, run
from fractalcodes.pauli import commutation_poly, commutes, make_operator
from fractalcodes.subsystem import (
    build_bacon_shor, build_fbs, dressed_distance, dressed_distance_detail, logical_qudits,
)
from fractalcodes.threestep import apply_circuit, conjugate, cx_synthesize, verify_three_step

from test_lca import SIERPINSKI


def X(text, p=2):
    return parse_poly(text, p, ["x"])


def Y(text, p=2):
    return parse_poly(text, p, ["y"])


@contextmanager
def criterion(capsys, num, title, limit_s=None):
    info = {}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        dt = time.perf_counter() - t0
        if ok and limit_s is not None and dt > limit_s:
            ok = False
            info["time"] = f"over the {limit_s:g} s limit"
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} ({dt:.2f} s) {detail}")
    assert dt <= limit_s if limit_s is not None else True


def test_criterion_01_sierpinski(capsys):
    with criterion(capsys, 1, "Sierpinski rows of (1+x)^t", 1) as info:
        img = parse_pbm(render_pbm(run(X("1+x"), X("1"), 7)))
        info["rows"] = img.shape[0]
        assert img.tolist() == SIERPINSKI


def test_criterion_02_reversibility(capsys):
    with criterion(capsys, 2, "reversibility on the L=4 ring", 1) as info:
        f = X("1+x+x^2")
        inv = reversible(f, [4])
        info["inverse"] = inv.pretty(["x"]) if inv is not None else None
        assert inv == (f ** 3).reduce([Periodic(4)])
        assert reversible(X("1+x"), [4]) is None


def test_criterion_03_newman_moore(capsys):
    with criterion(capsys, 3, "Ising Z term becomes the Newman-Moore triangle") as info:
        nm = fractalize_op(build_model("ising1d").zgens[0], LcaRuleSet.first_order([Y("1+y")]))
        sup = {e for e, _ in nm.support()[0].terms}
        info["support"] = sorted(sup)
        assert sup == {(0, 0), (-1, 0), (-1, -1)}


def _random_poly(rng, p, nvars, max_terms=3, lo=-2, hi=2):
    terms = [(tuple(int(v) for v in rng.integers(lo, hi + 1, nvars)), int(rng.integers(1, p)))
             for _ in range(int(rng.integers(1, max_terms + 1)))]
    return LaurentPoly(p, nvars, terms)


def _random_pair(rng):
    p = int(rng.choice([2, 3]))
    D = int(rng.integers(1, 3))
    m = int(rng.integers(1, 3))
    while True:
        a = make_operator("X", p, D, 2, [_random_poly(rng, p, D), _random_poly(rng, p, D)],
                          tuple(int(v) for v in rng.integers(-2, 3, D)))
        if not a.is_identity:
            break
    g = _random_poly(rng, p, D)
    a1, a2 = a.natural()
    b = make_operator("Z", p, D, 2, [g * a2, -(g * a1)],
                      tuple(int(v) for v in rng.integers(-2, 3, D)))
    rules = []
    for _ in range(D):
        terms = [((0,) * m, int(rng.integers(1, p)))]
        terms += [(tuple(int(v) for v in rng.integers(0, 3, m)), 1) for _ in range(int(rng.integers(0, 3)))]
        rules.append(LaurentPoly(p, m, [t for t in terms if any(t[0]) or t is terms[0]]))
    return a, b, LcaRuleSet.first_order(rules)


def test_criterion_04_commutation_preserved(capsys):
    with criterion(capsys, 4, "fractalization preserves commutation", 30) as info:
        rng = np.random.default_rng(2024)
        failures = checks = 0
        for _ in range(1000):
            a, b, rules = _random_pair(rng)
            assert commutation_poly(a, b).is_zero()
            for _ in range(5):
                s0 = tuple(int(v) for v in rng.integers(-3, 4, rules.m))
                s1 = tuple(int(v) for v in rng.integers(-3, 4, rules.m))
                ok = commutes(fractalize_op(a, rules, s0), fractalize_op(b, rules, s1))
                ok = ok and commutation_identity_holds(a, b, rules, s0, s1)
                failures += not ok
                checks += 1
        info["checks"] = checks
        info["failures"] = failures
        assert failures == 0


def test_criterion_05_fractal_toric_degeneracy(capsys):
    with criterion(capsys, 5, "fractalized toric code degeneracy", 10) as info:
        rules = LcaRuleSet.first_order([Y("1+y+y^2")] * 2)
        inst = instantiate(fractalize_code(build_model("toric2d"), rules), (4, 4, 4))
        k = logical_count(inst)
        info["k"] = k
        assert k == 8 == 2 * 4


def test_criterion_06_three_step(capsys):
    with criterion(capsys, 6, "three-step pipeline equals fractalization", 10) as info:
        for name, sizes in (("toric2d", (4, 4, 4)), ("ising1d", (4, 4))):
            rules = LcaRuleSet.first_order([Y("1+y+y^2")] * build_model(name).D)
            out = verify_three_step(build_model(name), rules, sizes)
            info[name] = out["equal"]
            assert out["equal"]


def _unit_diagonal(rng, n):
    while True:
        A = rng.integers(0, 2, (n, n))
        np.fill_diagonal(A, 1)
        if inverse_fp(A, 2) is not None:
            return A


def test_criterion_07_cx_synthesis(capsys):
    with criterion(capsys, 7, "CX synthesis of unit-diagonal matrices", 5) as info:
        rng = np.random.default_rng(7)
        bad = 0
        for i in range(100):
            n = 1 + i % 16
            M = _unit_diagonal(rng, n)
            circ = cx_synthesize(M)
            bad += not np.array_equal(circ.matrix() % 2, M % 2)
            Xs, Zs = rng.integers(0, 2, (2, n)), rng.integers(0, 2, (2, n))
            cx, cz = apply_circuit(circ, Xs, Zs)
            assert np.array_equal((cx, cz), conjugate(Xs, Zs, M, 2))
            bx, bz = conjugate(cx, cz, inverse_fp(M, 2), 2)
            bad += not (np.array_equal(bx, Xs) and np.array_equal(bz, Zs))
        info["mismatches"] = bad
        assert bad == 0


HAAH_RULES = LcaRuleSet(2, 2, 1, 2, ((Y("1+y+y^2"), LaurentPoly.zero(2, 1)),
                                     (Y("1+y"), Y("1+y+y^2"))))


def test_criterion_08_higher_order_rank_oracles(capsys):
    with criterion(capsys, 8, "higher-order rules, k by two rank routes", 60) as info:
        spec = fractalize_code(build_model("toric2d"), HAAH_RULES)
        for L in (2, 4):
            inst = instantiate(spec, (L, L, L))
            k = logical_count(inst)
            ref = inst.n - rank_mod_p(inst.Hx, 2) - rank_mod_p(inst.Hz, 2)
            info[f"k(L={L})"] = k
            assert k == ref


def test_criterion_09_algebraic_relations(capsys):
    with criterion(capsys, 9, "algebraic relation search") as info:
        w = related_pair(Y("1+y"), Y("1+y^2"), 6)
        assert w is not None and w.exponents(2) == (2, 1)
        assert related_pair(Y("1+y"), Y("1+y+y^2"), 6) is None
        assert related_triple(Y("1+y+y^2"), Y("1+y+y^3"), Y("1+y^2+y^3"), 6) is None
        info["witness"] = w.exponents(2)


def test_criterion_10_bacon_shor(capsys):
    with criterion(capsys, 10, "Bacon-Shor k=1, d=L", 30) as info:
        for L in (2, 3):
            g = build_bacon_shor(L, L)
            k, d = logical_qudits(g), dressed_distance(g, 6)
            info[f"L={L}"] = (k, d)
            assert (k, d) == (1, L)


def test_criterion_11_fractal_bacon_shor(capsys):
    f1, f2 = Y("1+y"), Y("1+y+y^2")
    with criterion(capsys, 11, "fractal Bacon-Shor protects L3 qubits with d >= 3", 300) as info:
        torus = build_fbs(3, 3, 4, f1, f2)
        info["k_periodic"] = logical_qudits(torus)
        info["d_periodic"] = dressed_distance(torus, 6)
        assert info["k_periodic"] == 4
        # open y axis padded so the central logicals cannot wrap around
        g = build_fbs(3, 3, 4, f1, f2, pad=True)
        try:
            d = dressed_distance_detail(g, 6, budget=7 * 10 ** 7)["d"]
            info["d_padded"] = d
        except BudgetExceeded as e:
            d = e.partial["ruled_out_below"]
            info["d_padded"] = f">={d}"
        info["k_padded"] = g.protected.shape[0] // 2
        assert info["k_padded"] == 4
        assert d >= 3
        # distance above the related-rule baseline d = L
        base = dressed_distance(build_fbs(2, 2, 2, f1, f1, pad=True), 6)
        frac = dressed_distance(build_fbs(2, 2, 2, f1, f2, pad=True), 6)
        info["L=2 related/unrelated"] = (base, frac)
        assert base == 2 and frac > base


def test_criterion_12_excitation_code(capsys):
    with criterion(capsys, 12, "excitations of fractal Ising form the fractal toric code") as info:
        for f1, f2 in (("1+y", "1+y+y^2"), ("1+y^2", "1+y+y^3")):
            rules = LcaRuleSet.first_order([Y(f1), Y(f2)])
            exc = excitation_code(fractalize_code(build_model("ising2d"), rules))
            info[f"({f1},{f2})"] = structurally_equal(exc, fractalize_code(build_model("toric2d"), rules))
            assert info[f"({f1},{f2})"]


def test_criterion_13_syndrome_invariance(capsys):
    with criterion(capsys, 13, "syndrome invariance and CSS orthogonality on the zoo", 60) as info:
        rng = np.random.default_rng(13)
        count = 0
        for name in sorted(MODELS):
            for p in (2, 3):
                spec = build_model(name, p)
                for L in (2, 3, 4):
                    inst = instantiate(spec, (L,) * spec.D)
                    assert inst.css_orthogonal()
                    e = rng.integers(0, p, inst.n)
                    for Hs, Hc in ((inst.Hx, inst.Hz), (inst.Hz, inst.Hx)):
                        if Hs.shape[0] and Hc.shape[0]:
                            s = rng.integers(0, p, Hs.shape[0]) @ Hs % p
                            assert np.array_equal(Hc @ e % p, Hc @ ((e + s) % p) % p)
                    count += 1
        info["instances"] = count


def test_criterion_14_excluded(capsys):
    with capsys.disabled():
        print("\n[SKIP] criterion 14: large-scale asymptotics are excluded; "
              "see scripts/ for trend reports")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
