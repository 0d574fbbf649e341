"""Fractalization as layering, a CX-circuit conjugation and a change of generators.

Lattice columns are ordered ``(r, s, n)`` row-major, matching
:func:`fractalcodes.codes.instantiate` on the ``D + m`` dimensional box. The
conjugation matrix is ``M = delta_{r r'} delta_{n n'} (prod_i F_i^{r_i})_{s s'}``
with ``F_i`` multiplication by ``f_i(y)`` on the periodic y torus. X vectors map
to ``M v`` and Z vectors to ``M^{-T} w``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import LaurentPoly, Open, Periodic, inv_mod, multiplication_matrix, poly_pow, poly_reduce
from .codes import CodeSpec, InstantiatedCode, instantiate, normalize_boundary
from .errors import PreconditionError, StructuralError, UnsupportedOperatorError
from .fractalizer import LcaRuleSet, fractalize_code
from .linalg import inverse_fp, matmul_fp, rank_fp, same_rowspace
from .pauli import make_operator


# layering

def layered_code(spec: CodeSpec, L_perp: Optional[int] = None, m: int = 1) -> CodeSpec:
    """Stack decoupled copies along ``m`` new axes (identity rules).

    The code is translation invariant, so the number of layers ``L_perp``
    only enters at instantiation; it is accepted for symmetry with the
    pipeline and validated.
    """
    if L_perp is not None and L_perp < 1:
        raise StructuralError("need at least one layer")
    D = spec.D + m
    def lift(g):
        body = [c.embed(D) for c in g.natural()]
        if g.is_identity:
            return make_operator(g.species, g.p, D, g.N, body)
        anchor = tuple(g.anchor) + (0,) * m
        shift = anchor if g.species == "X" else tuple(-a for a in anchor)
        return make_operator(g.species, g.p, D, g.N, [c.shift(shift) for c in body])
    return CodeSpec(spec.p, D, spec.N, tuple(lift(g) for g in spec.xgens),
                    tuple(lift(g) for g in spec.zgens), name=f"layered({spec.name})")


# conjugation matrix

@dataclass
class LayerMatrix:
    M: np.ndarray
    p: int
    sizes: Tuple[int, ...]
    D: int
    N: int

    def inverse(self) -> np.ndarray:
        inv = inverse_fp(self.M, self.p)
        if inv is None:
            raise PreconditionError("layer matrix is singular")
        return inv


def _check_rules(rules: LcaRuleSet, sizes, bc):
    D, m = rules.D, rules.m
    if rules.order != 1:
        raise UnsupportedOperatorError("the three-step decomposition exists only for first-order rules")
    if len(sizes) != D + m:
        raise StructuralError("sizes must cover original and new axes")
    for ax in bc[D:]:
        if not isinstance(ax, Periodic):
            raise PreconditionError("new axes must be periodic")


def y_blocks(rules: LcaRuleSet, y_sizes: Sequence[int]):
    """Multiplication matrices F_i and their inverses on the y torus."""
    bc_y = tuple(Periodic(L) for L in y_sizes)
    F, Finv = [], []
    for i in range(rules.D):
        Fi = multiplication_matrix(poly_reduce(rules.lead(i), bc_y), y_sizes)
        inv = inverse_fp(Fi, rules.p)
        if inv is None:
            raise PreconditionError(f"rule {i} is not invertible on the y torus {tuple(y_sizes)}")
        F.append(Fi)
        Finv.append(inv)
    return F, Finv


def _mat_pow(A: np.ndarray, k: int, p: int) -> np.ndarray:
    out = np.eye(A.shape[0], dtype=np.int64)
    base = A % p
    while k:
        if k & 1:
            out = matmul_fp(out, base, p)
        base = matmul_fp(base, base, p)
        k >>= 1
    return out


def build_M(rules: LcaRuleSet, sizes: Sequence[int], bc=None, N: int = 1) -> LayerMatrix:
    """Block-diagonal ``M`` over ``(r, n)`` with blocks ``prod_i F_i^{r_i}``."""
    sizes = tuple(int(v) for v in sizes)
    bc = normalize_boundary(sizes, bc)
    _check_rules(rules, sizes, bc)
    D, p = rules.D, rules.p
    y_sizes = sizes[D:]
    F, _ = y_blocks(rules, y_sizes)
    Y = int(np.prod(y_sizes))
    for i in range(D):
        if isinstance(bc[i], Periodic):
            if not np.array_equal(_mat_pow(F[i], sizes[i], p), np.eye(Y, dtype=np.int64)):
                raise PreconditionError(f"periodic axis {i} needs F_{i}^{sizes[i]} = 1")
    R = int(np.prod(sizes[:D]))
    M = np.zeros((R * Y * N, R * Y * N), dtype=np.int64)
    cache = {}
    for ridx, r in enumerate(itertools.product(*[range(L) for L in sizes[:D]])):
        block = np.eye(Y, dtype=np.int64)
        for i, ri in enumerate(r):
            key = (i, ri)
            if key not in cache:
                cache[key] = _mat_pow(F[i], ri, p)
            block = matmul_fp(block, cache[key], p)
        for n in range(N):
            idx = (ridx * Y + np.arange(Y)) * N + n
            M[np.ix_(idx, idx)] = block
    return LayerMatrix(M, p, sizes, D, N)


# CX synthesis

@dataclass(frozen=True)
class Gate:
    """``T = I + lam e_i e_j^T`` (row i += lam row j), or a diagonal scaling when ``j is None``."""
    i: int
    j: Optional[int]
    lam: int = 1

    def matrix(self, n: int, p: int) -> np.ndarray:
        T = np.eye(n, dtype=np.int64)
        if self.j is None:
            T[self.i, self.i] = self.lam % p
        else:
            T[self.i, self.j] = (T[self.i, self.j] + self.lam) % p
        return T

    def text(self, p: int) -> str:
        if self.j is None:
            return f"MUL {self.i} {self.lam}"
        if p == 2:
            return f"CX {self.i} {self.j}"
        return f"CXP {self.i} {self.j} {self.lam}"


@dataclass
class CxCircuit:
    n: int
    p: int
    gates: List[Gate]

    def matrix(self) -> np.ndarray:
        """Product ``T_1 T_2 ... T_K`` in listed order."""
        out = np.eye(self.n, dtype=np.int64)
        for g in self.gates:
            out = matmul_fp(out, g.matrix(self.n, self.p), self.p)
        return out

    def to_text(self) -> str:
        return "".join(g.text(self.p) + "\n" for g in self.gates)

    def __len__(self):
        return len(self.gates)


def cx_synthesize(M, p: int = 2, allow_zero_diagonal: bool = False) -> CxCircuit:
    """Write an invertible ``M`` as a product of elementary row-operation matrices.

    Column sweep (j outer, i inner) clears off-diagonal entries with the pivot
    row j. When an earlier step leaves ``M_jj = 0``, a repair operation adds a
    lower row k > j with ``M_kj != 0`` to row j first. For p > 2 remaining
    diagonal entries are fixed with ``MUL`` scalings.
    """
    A = np.array(M, dtype=np.int64) % p
    n = A.shape[0]
    if A.shape != (n, n):
        raise StructuralError("CX synthesis needs a square matrix")
    if inverse_fp(A, p) is None:
        raise PreconditionError("matrix is singular")
    if not allow_zero_diagonal and np.any(np.diag(A) == 0):
        raise PreconditionError("matrix has a zero diagonal entry")
    ops: List[Gate] = []  # applied on the left: E_K ... E_1 M = I

    def apply(g: Gate):
        nonlocal A
        if g.j is None:
            A[g.i] = A[g.i] * g.lam % p
        else:
            A[g.i] = (A[g.i] + g.lam * A[g.j]) % p
        ops.append(g)

    for j in range(n):
        if A[j, j] == 0:
            below = [k for k in range(j + 1, n) if A[k, j]]
            if not below:
                raise PreconditionError("lost the pivot in column %d" % j)
            apply(Gate(j, below[0], 1))
        if A[j, j] != 1:
            apply(Gate(j, None, inv_mod(int(A[j, j]), p)))
        for i in range(n):
            if i != j and A[i, j]:
                apply(Gate(i, j, (-int(A[i, j])) % p))
    # M = E_1^{-1} E_2^{-1} ... E_K^{-1}
    inv_gates = []
    for g in ops:
        if g.j is None:
            inv_gates.append(Gate(g.i, None, inv_mod(g.lam, p)))
        else:
            inv_gates.append(Gate(g.i, g.j, (-g.lam) % p))
    return CxCircuit(n, p, inv_gates)


def apply_circuit(circuit: CxCircuit, X=None, Z=None):
    """Conjugate X rows (``v -> M v``) and Z rows (``w -> M^{-T} w``) gate by gate."""
    p = circuit.p
    outs = []
    if X is not None:
        V = np.array(X, dtype=np.int64) % p
        V = np.atleast_2d(V)
        for g in reversed(circuit.gates):
            if g.j is None:
                V[:, g.i] = V[:, g.i] * g.lam % p
            else:
                V[:, g.i] = (V[:, g.i] + g.lam * V[:, g.j]) % p
        outs.append(V)
    if Z is not None:
        W = np.array(Z, dtype=np.int64) % p
        W = np.atleast_2d(W)
        # T^{-T} for T = I + lam e_i e_j^T is I - lam e_j e_i^T
        for g in reversed(circuit.gates):
            if g.j is None:
                W[:, g.i] = W[:, g.i] * inv_mod(g.lam, p) % p
            else:
                W[:, g.j] = (W[:, g.j] - g.lam * W[:, g.i]) % p
        outs.append(W)
    return outs[0] if len(outs) == 1 else tuple(outs)


def conjugate(X, Z, M, p: int):
    """Rows of X map to ``M v``; rows of Z map to ``M^{-T} w``."""
    M = np.asarray(M, dtype=np.int64)
    out_x = out_z = None
    if X is not None:
        out_x = matmul_fp(np.atleast_2d(X), M.T, p)
    if Z is not None:
        Minv = inverse_fp(M, p)
        if Minv is None:
            raise PreconditionError("conjugation matrix is singular")
        out_z = matmul_fp(np.atleast_2d(Z), Minv, p)
    return out_x, out_z


# change of generators

def _y_poly_vector(poly: LaurentPoly, y_sizes) -> np.ndarray:
    from .algebra import poly_to_vector

    return poly_to_vector(poly, y_sizes)


def change_generators(inst: InstantiatedCode, Hx: np.ndarray, Hz: np.ndarray,
                      rules: LcaRuleSet, layered: CodeSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Regroup conjugated layered generators into fractalized ones.

    A conjugated X generator placed at ``(r, s)`` equals ``f(y)^r`` times the
    fractalized one, so rows sharing ``(gen, r)`` are recombined with the
    coefficients of ``f(y)^{-r} y^s``. For Z the factor is ``f(ȳ)^{-r}`` and
    the coefficients come from ``f(ȳ)^r y^s``. Here ``r`` is the placed
    anchor, i.e. generator anchor plus translation, wrapped on periodic axes.
    """
    D, m, p = rules.D, rules.m, rules.p
    y_sizes = inst.sizes[D:]
    bc_y = tuple(Periodic(L) for L in y_sizes)
    Y = int(np.prod(y_sizes))
    y_grid = list(itertools.product(*[range(L) for L in y_sizes]))
    y_index = {s: k for k, s in enumerate(y_grid)}
    inverses = [None] * D
    from .lca import reversible

    for i in range(D):
        inv = reversible(poly_reduce(rules.lead(i), bc_y), y_sizes)
        if inv is None:
            raise PreconditionError(f"rule {i} is not invertible on the y torus")
        inverses[i] = inv

    def coeff_poly(r, zside):
        acc = LaurentPoly.one(p, m)
        for i, ri in enumerate(r):
            if ri == 0:
                continue
            base = rules.lead(i) if zside else inverses[i]
            if zside:
                base = base.bar()
            acc = poly_reduce(acc * poly_pow(base, ri), bc_y)
        return acc

    def placed_anchor(g, shift):
        r = []
        for i in range(D):
            v = g.anchor[i] + shift[i]
            r.append(v % inst.sizes[i] if isinstance(inst.bc[i], Periodic) else v)
        return tuple(r)

    def regroup(H, labels, gens, zside):
        groups = {}
        for row, (gi, shift) in enumerate(labels):
            r = placed_anchor(gens[gi], shift)
            s = tuple(v % L for v, L in zip(shift[D:], y_sizes))
            groups.setdefault((gi, r), {})[s] = row
        out = np.zeros_like(H)
        for (gi, r), rows in groups.items():
            if len(rows) != Y:
                raise PreconditionError("every layer must carry the generator for regrouping")
            base = coeff_poly(r, zside)
            for s, row_out in rows.items():
                target = poly_reduce(base * LaurentPoly.monomial(p, s), bc_y)
                vec = _y_poly_vector(target, y_sizes)
                acc = np.zeros(H.shape[1], dtype=np.int64)
                for s2, row_in in rows.items():
                    c = vec[y_index[s2]]
                    if c:
                        acc = (acc + c * H[row_in]) % p
                out[row_out] = acc
        return out

    return (regroup(Hx, inst.x_labels, layered.xgens, False),
            regroup(Hz, inst.z_labels, layered.zgens, True))


@dataclass
class PipelineResult:
    Hx: np.ndarray
    Hz: np.ndarray
    layered: InstantiatedCode
    M: LayerMatrix


def three_step(spec: CodeSpec, rules: LcaRuleSet, sizes: Sequence[int], bc=None,
               regroup: bool = True) -> PipelineResult:
    """Layer, conjugate by ``M`` and (optionally) regroup generators."""
    sizes = tuple(int(v) for v in sizes)
    bc = normalize_boundary(sizes, bc)
    _check_rules(rules, sizes, bc)
    layered = layered_code(spec, m=rules.m)
    lay = instantiate(layered, sizes, bc)
    LM = build_M(rules, sizes, bc, N=spec.N)
    Hx, Hz = conjugate(lay.Hx if lay.Hx.size else None, lay.Hz if lay.Hz.size else None, LM.M, rules.p)
    Hx = Hx if Hx is not None else lay.Hx
    Hz = Hz if Hz is not None else lay.Hz
    if regroup:
        Hx, Hz = change_generators(lay, Hx, Hz, rules, layered)
    return PipelineResult(Hx, Hz, lay, LM)


def groups_equal(a: Tuple[np.ndarray, np.ndarray], b: Tuple[np.ndarray, np.ndarray], p: int) -> bool:
    """Compare the row spaces of stacked symplectic matrices ``[Hx | 0 ; 0 | Hz]``."""
    def stack(Hx, Hz):
        n = Hx.shape[1] if Hx.size else Hz.shape[1]
        top = np.hstack([Hx.reshape(-1, n), np.zeros((Hx.reshape(-1, n).shape[0], n), dtype=np.int64)])
        bot = np.hstack([np.zeros((Hz.reshape(-1, n).shape[0], n), dtype=np.int64), Hz.reshape(-1, n)])
        return np.vstack([top, bot])
    A, B = stack(*a), stack(*b)
    if A.shape[1] != B.shape[1]:
        return False
    return same_rowspace(A, B, p)


def verify_three_step(spec: CodeSpec, rules: LcaRuleSet, sizes: Sequence[int], bc=None) -> dict:
    """Compare the pipeline against direct fractalization on the same lattice."""
    res = three_step(spec, rules, sizes, bc)
    direct = instantiate(fractalize_code(spec, rules), sizes, bc)
    equal = groups_equal((res.Hx, res.Hz), (direct.Hx, direct.Hz), rules.p)
    same_rows = (np.array_equal(res.Hx % rules.p, direct.Hx % rules.p)
                 and np.array_equal(res.Hz % rules.p, direct.Hz % rules.p))
    return {"equal": bool(equal), "generators_identical": bool(same_rows),
            "n": direct.n, "rank_x": rank_fp(direct.Hx, rules.p), "rank_z": rank_fp(direct.Hz, rules.p)}
