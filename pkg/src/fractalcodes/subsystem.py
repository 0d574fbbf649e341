"""Subsystem codes: Bacon-Shor, fractal Bacon-Shor and their K-matrix variants.

A gauge code is a list of symplectic vectors ``(x | z)`` over F_p. The
stabilizer group is the center of the gauge group, and
``k = n - (rank G + rank S) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import LaurentPoly, Open, Periodic, check_prime
from .codes import place
from .errors import BudgetExceeded, PreconditionError, StructuralError
from .fractalizer import LcaRuleSet, fractalize_op
from .linalg import inverse_fp, kernel_fp, quotient_basis, rank_fp, rowspace_basis
from .pauli import make_operator
from .search import DEFAULT_BUDGET, min_weight_search


@dataclass
class GaugeCode:
    p: int
    n: int
    G: np.ndarray  # rows (x | z), shape (m, 2n)
    meta: Dict = field(default_factory=dict)
    # bare logicals of the qudits that store information; None means all of them
    protected: Optional[np.ndarray] = None

    def __post_init__(self):
        self.G = np.asarray(self.G, dtype=np.int64).reshape(-1, 2 * self.n) % self.p
        if self.protected is not None:
            self.protected = np.asarray(self.protected, dtype=np.int64).reshape(-1, 2 * self.n) % self.p

    @property
    def gx(self) -> np.ndarray:
        return self.G[:, : self.n]

    @property
    def gz(self) -> np.ndarray:
        return self.G[:, self.n:]

    def is_css(self) -> bool:
        return not np.any((self.gx.any(axis=1)) & (self.gz.any(axis=1)))

    def css_parts(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = self.gx[self.gx.any(axis=1)]
        zs = self.gz[self.gz.any(axis=1)]
        return xs.reshape(-1, self.n), zs.reshape(-1, self.n)


def symplectic_gram(A: np.ndarray, B: np.ndarray, n: int, p: int) -> np.ndarray:
    """``<a_i, b_j> = a_x . b_z - a_z . b_x`` for all row pairs."""
    ax, az = A[:, :n], A[:, n:]
    bx, bz = B[:, :n], B[:, n:]
    return (ax @ bz.T - az @ bx.T) % p


def _css_rows(xs: np.ndarray, zs: np.ndarray, n: int) -> np.ndarray:
    xs = xs.reshape(-1, n)
    zs = zs.reshape(-1, n)
    return np.vstack([np.hstack([xs, np.zeros_like(xs)]), np.hstack([np.zeros_like(zs), zs])])


def _css_gauge(p: int, n: int, gx: np.ndarray, gz: np.ndarray, meta: Dict,
               protected: Optional[np.ndarray] = None) -> GaugeCode:
    return GaugeCode(p, n, _css_rows(gx, gz, n), meta, protected)


# builders

def _bs_ops(p: int):
    one = LaurentPoly.one(p, 2)
    ax = make_operator("X", p, 2, 1, [one - LaurentPoly.var(p, 2, 0)])
    bz = make_operator("Z", p, 2, 1, [one - LaurentPoly.var(p, 2, 1)])
    return ax, bz


def build_bacon_shor(L1: int, L2: int, p: int = 2) -> GaugeCode:
    """X gauge ``x^r (1 - x1)`` along rows and Z gauge ``x^r (1 - x̄2)`` along columns, open box."""
    p = check_prime(p)
    if L1 < 1 or L2 < 1:
        raise StructuralError("sizes must be positive")
    sizes = (L1, L2)
    bc = (Open(), Open())
    ax, bz = _bs_ops(p)
    gx, _ = place(ax, sizes, bc)
    gz, _ = place(bz, sizes, bc)
    return _css_gauge(p, L1 * L2, gx, gz, {"model": "bs", "sizes": [L1, L2]})


def padding(L1: int, L2: int, f1: LaurentPoly, f2: LaurentPoly) -> int:
    """Extra layers ``L1 deg f1 + L2 deg f2`` kept on each open y edge."""
    return L1 * f1.degree() + L2 * f2.degree()


def build_fbs(L1: int, L2: int, L3: int, f1: LaurentPoly, f2: LaurentPoly,
              p: Optional[int] = None, pad: bool = False) -> GaugeCode:
    """Fractal Bacon-Shor gauge group.

    Gauge generators are ``x^r y^s (1 - f1(y) x1)`` (X) and
    ``x^r y^s (1 - f2(ȳ) x̄2)`` (Z). The x axes are open with overflowing
    generators dropped. Without padding the y axis is periodic of length L3;
    with padding it is open of length ``L3 + 2 dL`` and generators crossing
    its edges are clipped to their in-box part.
    """
    p = check_prime(p if p is not None else f1.p)
    rules = LcaRuleSet.first_order([f1, f2])
    ax, bz = _bs_ops(p)
    fx, fz = fractalize_op(ax, rules), fractalize_op(bz, rules)
    if pad:
        dL = padding(L1, L2, f1, f2)
        sizes = (L1, L2, L3 + 2 * dL)
        bc = (Open(), Open(), Open())
        clip = (False, False, True)
    else:
        dL = 0
        sizes = (L1, L2, L3)
        bc = (Open(), Open(), Periodic(L3))
        clip = False
    gx, _ = place(fx, sizes, bc, clip)
    gz, _ = place(fz, sizes, bc, clip)
    n = int(np.prod(sizes))
    meta = {"model": "fbs", "sizes": [L1, L2, L3], "lattice": list(sizes), "pad": dL,
            "f1": f1.pretty(["y"]), "f2": f2.pretty(["y"])}
    protected = None
    if pad:
        lx, lz = fbs_logicals(L1, L2, sizes[2], f1, f2, range(dL, dL + L3), periodic=False)
        protected = _css_rows(lx, lz, n)
    return _css_gauge(p, n, gx, gz, meta, protected)


def fbs_logicals(L1: int, L2: int, L3: int, f1: LaurentPoly, f2: LaurentPoly,
                 layers: Sequence[int], periodic: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form FBS bare logicals for the given y layers.

    X: ``x1^{L1-1} y^s sum_{r2} f2(y)^{r2} x2^{r2}``;
    Z: ``x1^{L1-1} y^s sum_{r1} f1(ȳ)^{r1} x̄1^{r1}``.
    Terms leaving an open y axis are dropped.
    """
    p = f1.p
    n = L1 * L2 * L3
    lx = np.zeros((len(layers), n), dtype=np.int64)
    lz = np.zeros((len(layers), n), dtype=np.int64)

    def put(row, r1, r2, t, c):
        if periodic:
            t %= L3
        elif not 0 <= t < L3:
            return
        idx = (r1 * L2 + r2) * L3 + t
        row[idx] = (row[idx] + c) % p

    for i, s in enumerate(layers):
        for r2 in range(L2):
            for (e,), c in (f2 ** r2).terms:
                put(lx[i], L1 - 1, r2, s + e, c)
        for r1 in range(L1):
            for (e,), c in (f1 ** r1).terms:
                put(lz[i], L1 - 1 - r1, 0, s - e, c)
    return lx, lz


def _check_K(K) -> np.ndarray:
    K = np.asarray(K, dtype=np.int64) % 2
    if K.ndim != 2:
        raise StructuralError("K must be a 2D binary matrix")
    if not K.any():
        raise StructuralError("K removes every site; the code is empty")
    return K


def _line_pairs(K: np.ndarray, axis: int):
    """Consecutive retained sites along lines parallel to ``axis``: (lower, upper)."""
    L1, L2 = K.shape
    pairs = []
    if axis == 0:
        for r2 in range(L2):
            kept = [r1 for r1 in range(L1) if K[r1, r2]]
            pairs += [((a, r2), (b, r2)) for a, b in zip(kept, kept[1:])]
    else:
        for r1 in range(L1):
            kept = [r2 for r2 in range(L2) if K[r1, r2]]
            pairs += [((r1, a), (r1, b)) for a, b in zip(kept, kept[1:])]
    return pairs


def build_bbs(K, p: int = 2) -> GaugeCode:
    """Bacon-Shor on the sites with ``K = 1``; gauge pairs skip removed sites."""
    p = check_prime(p)
    K = _check_K(K)
    L1, L2 = K.shape
    kept = [(r1, r2) for r1 in range(L1) for r2 in range(L2) if K[r1, r2]]
    col = {s: i for i, s in enumerate(kept)}
    n = len(kept)
    gx, gz = [], []
    for a, b in _line_pairs(K, 0):
        row = np.zeros(n, dtype=np.int64)
        row[col[a]], row[col[b]] = 1, p - 1
        gx.append(row)
    for a, b in _line_pairs(K, 1):
        row = np.zeros(n, dtype=np.int64)
        row[col[b]], row[col[a]] = 1, p - 1
        gz.append(row)
    gx = np.array(gx, dtype=np.int64).reshape(-1, n)
    gz = np.array(gz, dtype=np.int64).reshape(-1, n)
    return _css_gauge(p, n, gx, gz, {"model": "bbs", "K": K.tolist()})


def build_fbbs(K, f1: LaurentPoly, f2: LaurentPoly, L3: int, p: Optional[int] = None) -> GaugeCode:
    """Fractalized BBS: whole lines ``{(r, s)}_s`` are removed where ``K_r = 0``.

    A gauge pair across a gap of ``g`` sites is fractalized as
    ``1 - f1(y)^g x1^g`` (X) or ``1 - f2(ȳ)^g x̄2^g`` (Z).
    """
    p = check_prime(p if p is not None else f1.p)
    K = _check_K(K)
    L1, L2 = K.shape
    rules = LcaRuleSet.first_order([f1, f2])
    sizes = (L1, L2, L3)
    full_n = L1 * L2 * L3
    one = LaurentPoly.one(p, 2)
    rows_x, rows_z = [], []
    for (a, b) in _line_pairs(K, 0):
        g = b[0] - a[0]
        op = make_operator("X", p, 2, 1, [one - LaurentPoly.var(p, 2, 0, g)], anchor=a)
        rows_x.append(_layers(fractalize_op(op, rules), sizes))
    for (a, b) in _line_pairs(K, 1):
        g = b[1] - a[1]
        op = make_operator("Z", p, 2, 1, [one - LaurentPoly.var(p, 2, 1, g)], anchor=b)
        rows_z.append(_layers(fractalize_op(op, rules), sizes))
    gx = np.vstack(rows_x) if rows_x else np.zeros((0, full_n), dtype=np.int64)
    gz = np.vstack(rows_z) if rows_z else np.zeros((0, full_n), dtype=np.int64)
    keep = np.repeat(K.reshape(-1).astype(bool), L3)
    n = int(keep.sum())
    if np.any(gx[:, ~keep]) or np.any(gz[:, ~keep]):
        raise StructuralError("a gauge generator touches a removed site")
    meta = {"model": "fbbs", "K": K.tolist(), "L3": L3,
            "f1": f1.pretty(["y"]), "f2": f2.pretty(["y"])}
    return _css_gauge(p, n, gx[:, keep], gz[:, keep], meta)


def _layers(op, sizes) -> np.ndarray:
    """Rows for ``op`` translated along the periodic y axis only."""
    L1, L2, L3 = sizes
    n = L1 * L2 * L3
    rows = np.zeros((L3, n), dtype=np.int64)
    for s in range(L3):
        for poly in op.support():
            for (r1, r2, t), c in poly.terms:
                if not (0 <= r1 < L1 and 0 <= r2 < L2):
                    raise StructuralError("gauge generator leaves the box")
                idx = (r1 * L2 + r2) * L3 + (t + s) % L3
                rows[s, idx] = (rows[s, idx] + c) % op.p
    return rows


# structure

def center(g: GaugeCode) -> np.ndarray:
    """Independent generators of the stabilizer group ``S = C(G) ∩ G``."""
    if g.G.shape[0] == 0:
        return np.zeros((0, 2 * g.n), dtype=np.int64)
    gram = symplectic_gram(g.G, g.G, g.n, g.p)
    ker = kernel_fp(gram, g.p)
    if ker.shape[0] == 0:
        return np.zeros((0, 2 * g.n), dtype=np.int64)
    S = (ker @ g.G) % g.p
    return rowspace_basis(S, g.p)


def logical_qudits(g: GaugeCode, S: Optional[np.ndarray] = None) -> int:
    S = center(g) if S is None else S
    rg = rank_fp(g.G, g.p) if g.G.size else 0
    rs = rank_fp(S, g.p) if S.size else 0
    twice = 2 * g.n - rg - rs
    if twice % 2:
        raise PreconditionError("rank(G) + rank(S) has the wrong parity")
    return twice // 2


@dataclass
class BareLogicals:
    x: np.ndarray  # k rows, symplectic (x | z)
    z: np.ndarray

    @property
    def k(self) -> int:
        return self.x.shape[0]


def _commutant(M: np.ndarray, n: int, p: int) -> np.ndarray:
    """All symplectic v with <m, v> = 0 for every row m."""
    if M.shape[0] == 0:
        return np.eye(2 * n, dtype=np.int64)
    Omega_rows = np.hstack([-M[:, n:], M[:, :n]]) % p
    return kernel_fp(Omega_rows, p)


def _symplectic_pairs(V: np.ndarray, n: int, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """Symplectic Gram-Schmidt on rows of V (which span a non-degenerate space)."""
    pool = [v % p for v in V]
    xs, zs = [], []
    while pool:
        e = pool.pop(0)
        partner = None
        for idx, v in enumerate(pool):
            val = int(symplectic_gram(e[None], v[None], n, p)[0, 0])
            if val:
                partner = idx
                break
        if partner is None:
            raise PreconditionError("logical space is degenerate")
        f = pool.pop(partner)
        f = f * pow(val, -1, p) % p
        rest = []
        for v in pool:
            a = int(symplectic_gram(v[None], f[None], n, p)[0, 0])
            b = int(symplectic_gram(e[None], v[None], n, p)[0, 0])
            # remove components so that <e, v> = <v, f> = 0
            v = (v - a * e - b * f) % p
            rest.append(v)
        pool = [v for v in rest if v.any()]
        xs.append(e)
        zs.append(f)
    return np.array(xs, dtype=np.int64).reshape(-1, 2 * n), np.array(zs, dtype=np.int64).reshape(-1, 2 * n)


def bare_logicals(g: GaugeCode) -> BareLogicals:
    """Representatives of ``C(G) / S``, paired so that ``<x_i, z_j> = delta_ij``.

    For CSS gauge groups the X and Z representatives are pure and paired by
    a matrix inverse; otherwise symplectic Gram-Schmidt is used.
    """
    n, p = g.n, g.p
    S = center(g)
    comm = _commutant(g.G, n, p)
    V = quotient_basis(comm, S, p) if comm.shape[0] else comm
    empty = np.zeros((0, 2 * n), dtype=np.int64)
    if V.shape[0] == 0:
        return BareLogicals(empty, empty)
    if g.is_css():
        xs = V[V[:, n:].any(axis=1) == False]  # noqa: E712
        zs = V[V[:, :n].any(axis=1) == False]  # noqa: E712
        if xs.shape[0] + zs.shape[0] == V.shape[0] and xs.shape[0] == zs.shape[0]:
            pairing = (xs[:, :n] @ zs[:, n:].T) % p
            inv = inverse_fp(pairing, p)
            if inv is not None:
                zs = (inv.T @ zs) % p
                return BareLogicals(xs, zs)
    X, Z = _symplectic_pairs(V, n, p)
    return BareLogicals(X, Z)


def dressed_distance(g: GaugeCode, wmax: int, threads: int = 1,
                     budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Least weight of an element of ``C(S)`` outside ``G`` (None if above ``wmax``)."""
    return dressed_distance_detail(g, wmax, threads, budget)["d"]


def dressed_distance_detail(g: GaugeCode, wmax: int, threads: int = 1,
                            budget: int = DEFAULT_BUDGET) -> dict:
    n, p = g.n, g.p
    if g.protected is not None:
        L = g.protected
    else:
        bare = bare_logicals(g)
        L = np.vstack([bare.x, bare.z])
    k = L.shape[0] // 2
    if k == 0:
        return {"d": None, "d_x": None, "d_z": None, "k": 0}
    S = center(g)
    if g.is_css():
        # a mixed dressed logical has an X or Z part that is already a dressed logical
        Sx = S[S[:, :n].any(axis=1)][:, :n] if S.size else np.zeros((0, n), dtype=np.int64)
        Sz = S[S[:, n:].any(axis=1)][:, n:] if S.size else np.zeros((0, n), dtype=np.int64)
        sides = {}
        for name, C, T in (("x", Sz, L[:, n:]), ("z", Sx, L[:, :n])):
            try:
                sides[name] = min_weight_search(C.reshape(-1, n), T, p, wmax, budget=budget, threads=threads)
            except BudgetExceeded as e:
                sides[name] = e
        return _combine_sides(sides, n, wmax, k)
    # general case: sites carry an X and a Z column; test against all logicals
    Om = lambda M: np.hstack([-M[:, n:], M[:, :n]]) % p  # noqa: E731
    groups = [[j, n + j] for j in range(n)]
    r = min_weight_search(Om(S) if S.size else np.zeros((0, 2 * n), dtype=np.int64), Om(L), p, wmax,
                          groups=groups, budget=budget, threads=threads)
    return {"d": r.weight, "d_x": None, "d_z": None, "k": k, "witness": r.witness}


def _combine_sides(sides: dict, n: int, wmax: int, k: int) -> dict:
    """Merge the X and Z searches; a budget stop on one side only matters below the other's hit."""
    found = {s: r.weight for s, r in sides.items() if not isinstance(r, BudgetExceeded) and r.weight is not None}
    bounds = {s: r.partial["ruled_out_below"] for s, r in sides.items() if isinstance(r, BudgetExceeded)}
    best = min(found.values(), default=None)
    if bounds and (best is None or best > min(bounds.values())):
        lower = min([*bounds.values(), *found.values()])
        raise BudgetExceeded(
            f"dressed distance search stopped by budget; no dressed logical below weight {lower}",
            partial={"ruled_out_below": lower, "k": k,
                     "d_x": found.get("x"), "d_z": found.get("z")})
    out = {"d": best, "d_x": found.get("x"), "d_z": found.get("z"), "k": k, "witness": None}
    if best is not None:
        side = "x" if found.get("x") == best else "z"
        w = sides[side].witness
        out["witness"] = np.concatenate([w, np.zeros(n, dtype=np.int64)] if side == "x"
                                        else [np.zeros(n, dtype=np.int64), w])
    return out


# reports

@dataclass
class SubsystemReport:
    n: int
    k: int
    d: Optional[int]
    d_is_lower_bound: bool
    wmax: int
    D: int
    ratio: float

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "d": self.d, "d_is_lower_bound": self.d_is_lower_bound,
                "wmax": self.wmax, "D": self.D, "tradeoff_ratio": self.ratio}


def tradeoff_report(g: GaugeCode, D: int, wmax: int, threads: int = 1,
                    budget: int = DEFAULT_BUDGET) -> SubsystemReport:
    """``k d^{1/(D-1)} / n``; when no logical is found up to wmax, ``d`` is the bound wmax + 1."""
    if D < 2:
        raise StructuralError("the tradeoff ratio needs D >= 2")
    k = logical_qudits(g) if g.protected is None else g.protected.shape[0] // 2
    if k == 0:
        return SubsystemReport(g.n, 0, None, False, wmax, D, 0.0)
    d = dressed_distance(g, wmax, threads, budget)
    lower = d is None
    d_val = wmax + 1 if lower else d
    ratio = k * d_val ** (1.0 / (D - 1)) / g.n
    return SubsystemReport(g.n, k, d_val, lower, wmax, D, float(ratio))


@dataclass
class EtaReport:
    eta: Optional[float]
    sizes: List[int]
    distances: List[Optional[int]]
    note: str

    def as_dict(self) -> dict:
        return {"eta": self.eta, "sizes": self.sizes, "distances": self.distances, "note": self.note}


def eta_estimate(builder: Callable[[int], GaugeCode], sizes: Sequence[int], wmax: int,
                 threads: int = 1, budget: int = DEFAULT_BUDGET) -> EtaReport:
    """Fit ``d ~ L^eta`` by least squares in log-log space over the given sizes.

    Only sizes whose distance was found within ``wmax`` enter the fit. The
    result describes the sampled sizes and carries no asymptotic claim.
    """
    ds: List[Optional[int]] = []
    for L in sizes:
        ds.append(dressed_distance(builder(L), wmax, threads, budget))
    pts = [(L, d) for L, d in zip(sizes, ds) if d]
    if len(pts) < 2:
        return EtaReport(None, list(sizes), ds, "inconclusive: fewer than two distances found")
    x = np.log([L for L, _ in pts])
    y = np.log([d for _, d in pts])
    slope, _ = np.polyfit(x, y, 1)
    return EtaReport(float(slope), list(sizes), ds, f"fit over {len(pts)} sizes; small-size trend only")


def family(name: str, p: int = 2, f1: Optional[LaurentPoly] = None, f2: Optional[LaurentPoly] = None,
           L3: Optional[int] = None, pad: bool = False) -> Callable[[int], GaugeCode]:
    """Builders ``L -> GaugeCode`` for square families used by :func:`eta_estimate`."""
    if name == "bs":
        return lambda L: build_bacon_shor(L, L, p)
    if name in ("fbs", "layered_bs"):
        if name == "layered_bs":
            f1 = f2 = LaurentPoly.one(p, 1)
        if f1 is None or f2 is None or L3 is None:
            raise StructuralError("fbs family needs f1, f2 and L3")
        return lambda L: build_fbs(L, L, L3, f1, f2, p, pad)
    raise StructuralError(f"unknown family {name!r}")


__all__ = [
    "BareLogicals", "EtaReport", "GaugeCode", "SubsystemReport", "bare_logicals",
    "build_bacon_shor", "build_bbs", "build_fbbs", "build_fbs", "center",
    "dressed_distance", "dressed_distance_detail", "eta_estimate", "family", "fbs_logicals",
    "logical_qudits", "padding", "symplectic_gram", "tradeoff_report",
]
