"""Translation-invariant CSS codes: model zoo, lattice instantiation, [n,k,d].

Generators are stored as :class:`CssOperator` values. The N x K matrices
``A(x)`` and ``B(x̄)`` are available through :meth:`CodeSpec.A` and
:meth:`CodeSpec.B` (columns are generators, natural variables).

Signs: for p > 2 every model uses ``1 - x_i`` where the binary version has
``1 + x_i``, arranged so that ``A^T B = 0`` exactly. Reducing mod 2 gives the
familiar binary matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Axis, LaurentPoly, Open, Periodic, check_prime, poly_reduce
from .errors import PreconditionError, StructuralError
from .linalg import in_rowspace, inverse_fp, kernel_fp, quotient_basis, rank_fp, rowspace_basis
from .pauli import (
    CssOperator,
    commutation_poly,
    dual,
    make_operator,
    monic,
    operator_from_lines,
    operator_to_text,
    var_names,
)
from .search import DEFAULT_BUDGET, min_weight_search


@dataclass(frozen=True)
class CodeSpec:
    p: int
    D: int
    N: int
    xgens: Tuple[CssOperator, ...]
    zgens: Tuple[CssOperator, ...]
    name: str = ""

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "xgens", tuple(self.xgens))
        object.__setattr__(self, "zgens", tuple(self.zgens))
        for g in self.xgens + self.zgens:
            if (g.p, g.D, g.N) != (self.p, self.D, self.N):
                raise StructuralError(f"generator {g} does not match p={self.p}, D={self.D}, N={self.N}")
        if any(g.species != "X" for g in self.xgens) or any(g.species != "Z" for g in self.zgens):
            raise StructuralError("xgens must be X type and zgens Z type")
        for a in self.xgens:
            for b in self.zgens:
                c = commutation_poly(a, b)
                if not c.is_zero():
                    raise StructuralError(
                        f"generators do not commute at every translation: c(x) = {c.pretty()}")

    def A(self) -> List[List[LaurentPoly]]:
        """N x K_x matrix of natural X coefficients (anchor folded in)."""
        cols = [g.raw() for g in self.xgens]
        return [[col[n] for col in cols] for n in range(self.N)]

    def B(self) -> List[List[LaurentPoly]]:
        """N x K_z matrix of natural Z coefficients, read as polynomials in x̄."""
        cols = [g.raw() for g in self.zgens]
        return [[col[n] for col in cols] for n in range(self.N)]

    def generators(self) -> Tuple[CssOperator, ...]:
        return self.xgens + self.zgens

    def to_text(self) -> str:
        return spec_to_text(self)

    def pretty(self) -> str:
        lines = [f"{self.name or 'code'}: p={self.p} D={self.D} N={self.N}"]
        lines += ["  " + g.pretty() for g in self.generators()]
        return "\n".join(lines)


# text format

def spec_to_text(spec: CodeSpec) -> str:
    name = spec.name or "-"
    head = f"spec p={spec.p} D={spec.D} N={spec.N} xgens={len(spec.xgens)} zgens={len(spec.zgens)} name={name}"
    parts = [head] + [operator_to_text(g) for g in spec.generators()]
    return "\n".join(parts) + "\n"


def spec_from_text(text: str) -> CodeSpec:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if not head or head[0] != "spec":
        raise StructuralError("spec text must start with a 'spec' header")
    fields = dict(tok.split("=", 1) for tok in head[1:])
    p, D, N = int(fields["p"]), int(fields["D"]), int(fields["N"])
    nx, nz = int(fields["xgens"]), int(fields["zgens"])
    name = fields.get("name", "-")
    ops = []
    pos = 1
    for _ in range(nx + nz):
        ops.append(operator_from_lines(lines[pos:pos + N + 1]))
        pos += N + 1
    return CodeSpec(p, D, N, tuple(ops[:nx]), tuple(ops[nx:]), name="" if name == "-" else name)


# model zoo

def _d(p: int, D: int, i: int) -> LaurentPoly:
    """The difference ``1 - x_i`` in D variables."""
    return LaurentPoly.one(p, D) - LaurentPoly.var(p, D, i)


def _zero(p, D):
    return LaurentPoly.zero(p, D)


def _ising1d(p):
    return CodeSpec(p, 1, 1, (), (make_operator("Z", p, 1, 1, [_d(p, 1, 0)]),), name="ising1d")


def _ising2d(p):
    zs = tuple(make_operator("Z", p, 2, 1, [_d(p, 2, i)]) for i in range(2))
    return CodeSpec(p, 2, 1, (), zs, name="ising2d")


def _cluster1d(p):
    one = LaurentPoly.one(p, 1)
    d = _d(p, 1, 0)
    # X (1 - x, 1) and Z (-1, 1 - x̄): c = -(1 - x) + (1 - x) = 0
    xg = make_operator("X", p, 1, 2, [d, one])
    zg = make_operator("Z", p, 1, 2, [-one, d])
    return CodeSpec(p, 1, 2, (xg,), (zg,), name="cluster1d")


def _newman_moore(p):
    from .fractalizer import LcaRuleSet, fractalize_code

    f = LaurentPoly(p, 1, {(0,): 1, (1,): 1})
    spec = fractalize_code(_ising1d(p), LcaRuleSet.first_order([f]))
    return CodeSpec(p, 2, 1, spec.xgens, spec.zgens, name="newman_moore")


def _coboundary_1(p: int, D: int):
    """Edge -> plaquette map: (dw)_ij = d_i w_j - d_j w_i for i < j."""
    plaquettes = list(itertools.combinations(range(D), 2))
    cols = []
    for e in range(D):
        col = []
        for i, j in plaquettes:
            if e == j:
                col.append(_d(p, D, i))
            elif e == i:
                col.append(-_d(p, D, j))
            else:
                col.append(_zero(p, D))
        cols.append(col)
    return plaquettes, cols


def _coboundary_2_transpose(p: int, D: int, plaquettes, cubes):
    """Columns of the cube -> plaquette transpose: (dh)_ijk = d_i h_jk - d_j h_ik + d_k h_ij."""
    cols = []
    for i, j, k in cubes:
        entries = {(j, k): _d(p, D, i), (i, k): -_d(p, D, j), (i, j): _d(p, D, k)}
        cols.append([entries.get(pl, _zero(p, D)) for pl in plaquettes])
    return cols


def _toric2d(p):
    # X on plaquettes: (-(1 - x2), 1 - x1); Z on vertices: (1 - x̄1, 1 - x̄2)
    xg = make_operator("X", p, 2, 2, [-_d(p, 2, 1), _d(p, 2, 0)])
    zg = make_operator("Z", p, 2, 2, [_d(p, 2, 0), _d(p, 2, 1)])
    return CodeSpec(p, 2, 2, (xg,), (zg,), name="toric2d")


def _toric3d(p):
    D = 3
    xs = []
    for i, j in [(1, 2), (0, 2), (0, 1)]:
        col = [_zero(p, D)] * 3
        col[i] = -_d(p, D, j)
        col[j] = _d(p, D, i)
        xs.append(make_operator("X", p, D, 3, col))
    zg = make_operator("Z", p, D, 3, [_d(p, D, i) for i in range(D)])
    return CodeSpec(p, D, 3, tuple(xs), (zg,), name="toric3d")


TORIC4D_PLAQUETTES = [(0, 1), (0, 3), (0, 2), (1, 2), (1, 3), (2, 3)]
TORIC4D_CUBES = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]


def _toric4d(p):
    D = 4
    base, cols = _coboundary_1(p, D)
    order = [base.index(pl) for pl in TORIC4D_PLAQUETTES]
    xs = tuple(make_operator("X", p, D, 6, [col[r] for r in order]) for col in cols)
    zcols = _coboundary_2_transpose(p, D, TORIC4D_PLAQUETTES, TORIC4D_CUBES)
    zs = tuple(make_operator("Z", p, D, 6, col) for col in zcols)
    return CodeSpec(p, D, 6, xs, zs, name="toric4d")


def _toric4d_edges(p):
    # qudits on edges, X on plaquettes, Z on vertices; reconstructed, no display exists
    D = 4
    plaquettes = list(itertools.combinations(range(D), 2))
    xs = []
    for i, j in plaquettes:
        col = [_zero(p, D)] * D
        col[i] = -_d(p, D, j)
        col[j] = _d(p, D, i)
        xs.append(make_operator("X", p, D, D, col))
    zg = make_operator("Z", p, D, D, [_d(p, D, i) for i in range(D)])
    return CodeSpec(p, D, D, tuple(xs), (zg,), name="toric4d_edges")


MODELS = {
    "ising1d": (_ising1d, "1D Ising chain, Z generator 1 - x̄"),
    "ising2d": (_ising2d, "2D Ising model, Z generators 1 - x̄1 and 1 - x̄2"),
    "cluster1d": (_cluster1d, "1D cluster chain with two qudits per site"),
    "newman_moore": (_newman_moore, "Ising chain fractalized with f = 1 + y"),
    "toric2d": (_toric2d, "2D toric code, qudits on edges"),
    "toric3d": (_toric3d, "3D toric code, X on plaquettes and Z on vertices"),
    "toric4d": (_toric4d, "4D toric code, qudits on plaquettes"),
    "toric4d_edges": (_toric4d_edges, "4D toric code with qudits on edges (reconstructed)"),
}


def build_model(name: str, p: int = 2) -> CodeSpec:
    try:
        builder = MODELS[name][0]
    except KeyError:
        raise StructuralError(f"unknown model {name!r}; known: {', '.join(sorted(MODELS))}") from None
    return builder(check_prime(p))


def catalog() -> Dict[str, str]:
    return {k: v[1] for k, v in sorted(MODELS.items())}


# instantiation

def default_boundary(sizes: Sequence[int]) -> Tuple[Axis, ...]:
    return tuple(Periodic(int(L)) for L in sizes)


def normalize_boundary(sizes: Sequence[int], bc) -> Tuple[Axis, ...]:
    sizes = tuple(int(L) for L in sizes)
    if any(L <= 0 for L in sizes):
        raise StructuralError(f"every axis needs a positive size, got {sizes}")
    if bc is None:
        return default_boundary(sizes)
    bc = tuple(bc)
    if len(bc) != len(sizes):
        raise StructuralError("boundary spec length differs from sizes")
    out = []
    for L, ax in zip(sizes, bc):
        if isinstance(ax, Periodic):
            if ax.L != L:
                raise StructuralError(f"periodic axis length {ax.L} differs from size {L}")
            out.append(ax)
        elif isinstance(ax, Open):
            out.append(ax)
        elif ax in (True, "periodic", "p"):
            out.append(Periodic(L))
        elif ax in (False, "open", "o"):
            out.append(Open())
        else:
            raise StructuralError(f"cannot interpret boundary entry {ax!r}")
    return tuple(out)


def place(op: CssOperator, sizes: Sequence[int], bc: Sequence[Axis], clip=False):
    """All lattice placements of ``op`` as dense rows.

    Periodic axes wrap. On open axes, translates that leave the box are dropped
    or, where ``clip`` is set (a bool or one flag per axis), cut down to their
    in-box part. Returns ``(rows, shifts)`` where ``shifts[k]`` is the
    translation of row k.
    """
    sizes = tuple(int(L) for L in sizes)
    D, N, p = op.D, op.N, op.p
    clips = [bool(clip)] * D if isinstance(clip, (bool, int)) else [bool(c) for c in clip]
    n = int(np.prod(sizes)) * N
    if op.is_identity:
        return np.zeros((0, n), dtype=np.int64), []
    terms = []
    for q, s in enumerate(op.support()):
        for e, c in s.terms:
            terms.append((np.array(e, dtype=np.int64), q, c))
    exps = np.array([t[0] for t in terms])
    lo, hi = exps.min(axis=0), exps.max(axis=0)
    ranges = []
    for i, (L, ax) in enumerate(zip(sizes, bc)):
        if isinstance(ax, Periodic):
            ranges.append(range(L))
        elif clips[i]:
            ranges.append(range(-hi[i], L - lo[i]))
        else:
            ranges.append(range(-lo[i], L - hi[i]))
    shifts = np.array(list(itertools.product(*ranges)), dtype=np.int64).reshape(-1, D)
    rows = np.zeros((shifts.shape[0], n), dtype=np.int64)
    if shifts.shape[0] == 0:
        return rows, []
    size_arr = np.array(sizes, dtype=np.int64)
    periodic_mask = np.array([isinstance(ax, Periodic) for ax in bc])
    ridx = np.arange(shifts.shape[0])
    for e, q, c in terms:
        pos = shifts + e
        pos[:, periodic_mask] %= size_arr[periodic_mask]
        ok = np.all((pos >= 0) & (pos < size_arr), axis=1)
        if not ok.any():
            continue
        site = np.ravel_multi_index(pos[ok].T, sizes)
        np.add.at(rows, (ridx[ok], site * N + q), c)
    rows %= p
    keep = rows.any(axis=1) if any(clips) else np.ones(rows.shape[0], dtype=bool)
    return rows[keep], [tuple(int(v) for v in s) for s in shifts[keep]]


@dataclass
class InstantiatedCode:
    p: int
    N: int
    sizes: Tuple[int, ...]
    bc: Tuple[Axis, ...]
    Hx: np.ndarray
    Hz: np.ndarray
    x_labels: List[Tuple[int, Tuple[int, ...]]] = field(default_factory=list)
    z_labels: List[Tuple[int, Tuple[int, ...]]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return int(np.prod(self.sizes)) * self.N

    def column(self, site: Sequence[int], qudit: int = 0) -> int:
        return int(np.ravel_multi_index(tuple(site), self.sizes)) * self.N + qudit

    def site_of(self, col: int) -> Tuple[Tuple[int, ...], int]:
        site, q = divmod(int(col), self.N)
        return tuple(int(v) for v in np.unravel_index(site, self.sizes)), q

    def rank_x(self) -> int:
        return rank_fp(self.Hx, self.p)

    def rank_z(self) -> int:
        return rank_fp(self.Hz, self.p)

    def css_orthogonal(self) -> bool:
        if self.Hx.shape[0] == 0 or self.Hz.shape[0] == 0:
            return True
        return not np.any((self.Hx @ self.Hz.T) % self.p)


def instantiate(spec: CodeSpec, sizes: Sequence[int], bc=None) -> InstantiatedCode:
    """Parity-check matrices of ``spec`` on a finite box (periodic by default)."""
    sizes = tuple(int(L) for L in sizes)
    if len(sizes) != spec.D:
        raise StructuralError(f"spec has D={spec.D} but {len(sizes)} sizes were given")
    bc = normalize_boundary(sizes, bc)
    n = int(np.prod(sizes)) * spec.N

    def stack(gens):
        blocks, labels = [], []
        for gi, g in enumerate(gens):
            rows, shifts = place(g, sizes, bc)
            blocks.append(rows)
            labels += [(gi, s) for s in shifts]
        if not blocks:
            return np.zeros((0, n), dtype=np.int64), labels
        return np.vstack(blocks), labels

    Hx, xl = stack(spec.xgens)
    Hz, zl = stack(spec.zgens)
    return InstantiatedCode(spec.p, spec.N, sizes, bc, Hx, Hz, xl, zl)


def logical_count(inst: InstantiatedCode) -> int:
    k = inst.n - inst.rank_x() - inst.rank_z()
    if k < 0:
        raise PreconditionError("negative logical count: the checks are not CSS-orthogonal")
    return k


@dataclass
class LogicalBasis:
    x: np.ndarray
    z: np.ndarray

    @property
    def k(self) -> int:
        return self.x.shape[0]


def logical_basis(inst: InstantiatedCode) -> LogicalBasis:
    """Paired X and Z logical representatives with ``Lx Lz^T = I``."""
    p, n = inst.p, inst.n
    lx = quotient_basis(kernel_fp(inst.Hz, p) if inst.Hz.size else np.eye(n, dtype=np.int64),
                        inst.Hx, p)
    lz = quotient_basis(kernel_fp(inst.Hx, p) if inst.Hx.size else np.eye(n, dtype=np.int64),
                        inst.Hz, p)
    if lx.shape[0] != lz.shape[0]:
        raise PreconditionError("X and Z logical counts differ")
    if lx.shape[0] == 0:
        return LogicalBasis(lx.reshape(0, n), lz.reshape(0, n))
    pairing = (lx @ lz.T) % p
    inv = inverse_fp(pairing, p)
    if inv is None:
        raise PreconditionError("logical pairing matrix is singular")
    lz = (inv.T @ lz) % p
    return LogicalBasis(lx, lz)


@dataclass
class DistanceResult:
    d: Optional[int]
    d_x: Optional[int]
    d_z: Optional[int]
    wmax: int
    witness_x: Optional[np.ndarray] = None
    witness_z: Optional[np.ndarray] = None
    k: int = 0

    def as_dict(self) -> dict:
        return {"d": self.d, "d_x": self.d_x, "d_z": self.d_z, "wmax": self.wmax}


def distance_bruteforce(inst: InstantiatedCode, wmax: int, threads: int = 1,
                        budget: int = DEFAULT_BUDGET) -> DistanceResult:
    """Least weight of a non-trivial logical, separately for X and Z types.

    X side: ``Hz v = 0`` and ``Lz v != 0``; Z side mirrored. Values are None
    when nothing of weight ``<= wmax`` exists (or when k = 0).
    """
    basis = logical_basis(inst)
    if basis.k == 0:
        return DistanceResult(None, None, None, wmax, k=0)
    rx = min_weight_search(inst.Hz, basis.z, inst.p, wmax, budget=budget, threads=threads)
    rz = min_weight_search(inst.Hx, basis.x, inst.p, wmax, budget=budget, threads=threads)
    found = [w for w in (rx.weight, rz.weight) if w is not None]
    # a side with nothing up to wmax is heavier than any found weight
    d = min(found) if found else None
    return DistanceResult(d, rx.weight, rz.weight, wmax, rx.witness, rz.witness, basis.k)


def sparse_text(M: np.ndarray) -> str:
    """Coordinate export: ``nrows ncols nnz`` header then ``r c v`` lines (0-based)."""
    M = np.asarray(M)
    rr, cc = np.nonzero(M)
    lines = [f"{M.shape[0]} {M.shape[1]} {len(rr)}"]
    lines += [f"{r} {c} {int(M[r, c])}" for r, c in zip(rr, cc)]
    return "\n".join(lines) + "\n"


def sparse_from_text(text: str) -> np.ndarray:
    lines = text.strip().splitlines()
    nr, nc, nnz = (int(v) for v in lines[0].split())
    M = np.zeros((nr, nc), dtype=np.int64)
    for ln in lines[1:1 + nnz]:
        r, c, v = (int(t) for t in ln.split())
        M[r, c] = v
    return M


# excitations and local relations

@dataclass(frozen=True)
class ExcitationVector:
    species: str  # species of the generators that are excited
    polys: Tuple[LaurentPoly, ...]

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.polys)


def excitation_map(op: CssOperator, spec: CodeSpec) -> ExcitationVector:
    """Excited generator translates: entry g has ``x^t`` where ``op`` fails to commute with ``g`` at ``t``."""
    if op.species == "X":
        gens, species = spec.zgens, "Z"
    else:
        gens, species = spec.xgens, "X"
    return ExcitationVector(species, tuple(commutation_poly(op, g) for g in gens))


@dataclass(frozen=True)
class LocalRelation:
    """Coefficients ``l_g`` (natural, in x̄) with ``sum_g B_g(x̄) l_g(x̄) = 0``."""
    species: str
    l: Tuple[LaurentPoly, ...]

    def support(self) -> Tuple[LaurentPoly, ...]:
        return tuple(q.bar() for q in self.l)


def _box(bounds: Sequence[int]):
    return list(itertools.product(*[range(b + 1) for b in bounds]))


def _relation_system(supports, bounds, p, D):
    """Matrix of the map (Lambda_g) -> sum_g S_g Lambda_g on a box of exponents."""
    box = _box(bounds)
    index: Dict[Tuple[int, ...], int] = {}
    entries = []
    K = len(supports)
    N = len(supports[0]) if supports else 0
    for g, S in enumerate(supports):
        for bi, e in enumerate(box):
            col = g * len(box) + bi
            for n in range(N):
                for te, c in S[n].terms:
                    key = (n,) + tuple(a + b for a, b in zip(te, e))
                    if key not in index:
                        index[key] = len(index)
                    entries.append((index[key], col, c))
    M = np.zeros((max(1, len(index)), K * len(box)), dtype=np.int64)
    for r, c, v in entries:
        M[r, c] = (M[r, c] + v) % p
    return M, box


def _vec_to_polys(vec, box, K, p, D):
    out = []
    nb = len(box)
    for g in range(K):
        chunk = vec[g * nb:(g + 1) * nb]
        out.append(LaurentPoly(p, D, {e: int(v) for e, v in zip(box, chunk) if v % p}))
    return out


def _translates_in_box(polys, bounds, p):
    """All translates of a support vector that stay inside the box, as flat vectors."""
    live = [q for q in polys if not q.is_zero()]
    lo = [min(q.min_exponents()[i] for q in live) for i in range(len(bounds))]
    hi = [max(q.max_exponents()[i] for q in live) for i in range(len(bounds))]
    base = [q.shift([-v for v in lo]) for q in polys]
    ext = [h - l for h, l in zip(hi, lo)]
    shifts = itertools.product(*[range(b - e + 1) for b, e in zip(bounds, ext)])
    box = _box(bounds)
    pos = {e: i for i, e in enumerate(box)}
    out = []
    for s in shifts:
        vec = np.zeros(len(polys) * len(box), dtype=np.int64)
        for g, q in enumerate(base):
            for e, c in q.terms:
                vec[g * len(box) + pos[tuple(a + b for a, b in zip(e, s))]] = c
        out.append(vec)
    return out


def local_relations(spec: CodeSpec, degree_bound=None, side: str = "Z") -> List[LocalRelation]:
    """Generating relations (up to translation) among generators of one species.

    A relation is a set of generator translates whose product is the
    identity: ``sum_g S_g(x) Lambda_g(x) = 0``. Unknown coefficients range over
    the box ``[0, b_i]`` per axis, where ``b_i`` defaults to the largest
    generator extent along axis ``i`` plus one; an int bound applies to all
    axes. Relations are returned smallest box first, skipping any that are
    combinations of translates of earlier ones.
    """
    side = side.upper()
    gens = spec.zgens if side == "Z" else spec.xgens
    p, D = spec.p, spec.D
    if not gens:
        return []
    if degree_bound is None:
        bounds = [max(g.span()[i] for g in gens) + 1 for i in range(D)]
    elif isinstance(degree_bound, int):
        bounds = [degree_bound] * D
    else:
        bounds = [int(b) for b in degree_bound]
    supports = [g.support() for g in gens]
    K = len(gens)
    kept: List[List[LaurentPoly]] = []
    span_rows: List[np.ndarray] = []
    extents = sorted(itertools.product(*[range(b + 1) for b in bounds]), key=lambda e: (sum(e), e))
    full_M, full_box = _relation_system(supports, bounds, p, D)
    total_dim = full_M.shape[1] - rank_fp(full_M, p)
    for ext in extents:
        if span_rows and rank_fp(np.array(span_rows), p) == total_dim:
            break
        M, box = _relation_system(supports, ext, p, D)
        ker = kernel_fp(M, p)
        for vec in ker:
            polys = _vec_to_polys(vec, box, K, p, D)
            trans = _translates_in_box(polys, bounds, p)
            if span_rows and all(in_rowspace(np.array(span_rows), t, p) for t in trans[:1]):
                continue
            kept.append(polys)
            span_rows.extend(trans)
    out = []
    for polys in kept:
        # natural coefficients of the relation read as a Z-type operator
        op = monic(make_operator("Z", p, D, K, [q.bar() for q in polys]))
        out.append(LocalRelation(side, op.coeffs))
    return out


def excitation_code(spec: CodeSpec, side: str = "Z", degree_bound=None,
                    name: Optional[str] = None) -> CodeSpec:
    """Code whose qudits are the generators of one species.

    X generators are the excitation clusters produced by a single opposite-
    species operator on each original qudit; Z generators are the local
    relations among the generators.
    """
    side = side.upper()
    gens = spec.zgens if side == "Z" else spec.xgens
    p, D, K = spec.p, spec.D, len(gens)
    if K == 0:
        raise PreconditionError(f"spec has no {side} generators")
    probe_species = "X" if side == "Z" else "Z"
    xs = []
    for n in range(spec.N):
        unit = [LaurentPoly.zero(p, D)] * spec.N
        unit[n] = LaurentPoly.one(p, D)
        probe = make_operator(probe_species, p, D, spec.N, unit)
        ex = [commutation_poly(probe, g) for g in gens]
        if all(q.is_zero() for q in ex):
            continue
        xs.append(make_operator("X", p, D, K, ex))
    zs = [make_operator("Z", p, D, K, list(rel.l))
          for rel in local_relations(spec, degree_bound, side)]
    return CodeSpec(p, D, K, tuple(xs), tuple(zs), name=name or f"exc({spec.name})")


def dual_spec(spec: CodeSpec) -> CodeSpec:
    """Exchange X and Z and invert space (keeps natural coefficients)."""
    return CodeSpec(spec.p, spec.D, spec.N, tuple(dual(g) for g in spec.zgens),
                    tuple(dual(g) for g in spec.xgens), name=f"dual({spec.name})")


def _signature(gens, perm=None):
    out = []
    for g in gens:
        coeffs = monic(g).coeffs
        if perm is not None:
            coeffs = tuple(coeffs[j] for j in perm)
        out.append(tuple(c.to_text() for c in coeffs))
    return sorted(out)


def structurally_equal(a: CodeSpec, b: CodeSpec, relabel_qudits: bool = True) -> bool:
    """Same generator coefficient vectors up to translation and unit scalars.

    With ``relabel_qudits`` the qudits inside a unit cell may also be
    permuted (the same permutation for every generator).
    """
    if (a.p, a.D, a.N) != (b.p, b.D, b.N):
        return False
    target = (_signature(b.xgens), _signature(b.zgens))
    perms = itertools.permutations(range(a.N)) if relabel_qudits else [None]
    return any((_signature(a.xgens, q), _signature(a.zgens, q)) == target for q in perms)
