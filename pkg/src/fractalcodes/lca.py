"""Linear cellular automata over F_p: evolution, reversibility, rendering, d_f."""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from .algebra import LaurentPoly, Periodic, check_prime, inv_mod, poly_inverse, poly_pow, poly_reduce
from .errors import DomainError, PreconditionError, StructuralError


def step(f: LaurentPoly, state: LaurentPoly, bc=None) -> LaurentPoly:
    """One update ``c_t = f c_{t-1}``, optionally reduced on a boundary."""
    if f.p != state.p or f.nvars != state.nvars:
        raise StructuralError("rule and state differ in p or variable count")
    out = f * state
    return poly_reduce(out, bc) if bc is not None else out


def run(f: LaurentPoly, c0: LaurentPoly, T: int, bc=None) -> List[LaurentPoly]:
    """Trajectory ``[c_0, ..., c_T]``."""
    if T < 0:
        raise StructuralError("T must be non-negative")
    traj = [poly_reduce(c0, bc) if bc is not None else c0]
    for _ in range(T):
        traj.append(step(f, traj[-1], bc))
    return traj


def _prime_power_exponent(L: int, p: int) -> Optional[int]:
    n = 0
    while L % p == 0:
        L //= p
        n += 1
    return n if L == 1 else None


def reversible(f: LaurentPoly, sizes: Sequence[int], p: Optional[int] = None) -> Optional[LaurentPoly]:
    """Inverse of ``f`` on the periodic torus with the given sizes, if any.

    Fast path: when every size is a power of p and ``f(1) != 0``, Frobenius
    gives ``f^Q = f(1)`` with ``Q`` the largest size, so ``f(1)^{-1} f^{Q-1}``
    is the inverse. Otherwise a dense linear solve decides.
    """
    if p is not None and check_prime(p) != f.p:
        raise StructuralError("p does not match the rule's field")
    sizes = tuple(int(L) for L in sizes)
    bc = tuple(Periodic(L) for L in sizes)
    if len(sizes) != f.nvars:
        raise StructuralError("one size per variable required")
    if f.is_zero():
        return None
    exps = [_prime_power_exponent(L, f.p) for L in sizes]
    if f.is_polynomial() and all(e is not None for e in exps):
        f1 = f.evaluate_at_one()
        if f1 == 0:
            return None
        Q = max(sizes)
        return poly_reduce(poly_pow(f, Q - 1).scale(inv_mod(f1, f.p)), bc)
    return poly_inverse(f, bc)


def _as_rows(trajectory: Sequence[LaurentPoly], width: Optional[int] = None) -> np.ndarray:
    if not trajectory:
        raise StructuralError("empty trajectory")
    if trajectory[0].nvars != 1:
        raise StructuralError("rendering needs one spatial variable")
    lo = min((c.min_exponents()[0] for c in trajectory if not c.is_zero()), default=0)
    lo = min(lo, 0)
    hi = max((c.max_exponents()[0] for c in trajectory if not c.is_zero()), default=0)
    w = width if width is not None else hi - lo + 1
    img = np.zeros((len(trajectory), w), dtype=np.int64)
    for t, c in enumerate(trajectory):
        for (e,), v in c.terms:
            if 0 <= e - lo < w:
                img[t, e - lo] = v
    return img


def render_pbm(trajectory: Sequence[LaurentPoly], width: Optional[int] = None) -> bytes:
    """Plain (P1) PBM bitmap; row t is state t, a set pixel marks a non-zero cell."""
    img = _as_rows(trajectory, width)
    lines = ["P1", f"{img.shape[1]} {img.shape[0]}"]
    lines += [" ".join("1" if v else "0" for v in row) for row in img]
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_pbm(data: bytes) -> np.ndarray:
    tokens = data.decode("ascii").split()
    if tokens[0] != "P1":
        raise StructuralError("not a plain PBM")
    w, h = int(tokens[1]), int(tokens[2])
    bits = [int(t) for t in tokens[3:3 + w * h]]
    return np.array(bits, dtype=np.int64).reshape(h, w)


def cumulative_counts(f: LaurentPoly, T: int, c0: Optional[LaurentPoly] = None) -> np.ndarray:
    """``N(t) = sum_{tau < t} |support(c_tau)|`` for t = 1..T."""
    c = c0 if c0 is not None else LaurentPoly.one(f.p, f.nvars)
    counts = []
    total = 0
    for _ in range(T):
        total += len(c)
        counts.append(total)
        c = f * c
    return np.array(counts, dtype=np.float64)


def hausdorff_estimate(f: LaurentPoly, T: int = 64) -> float:
    """Slope of log N(t) against log t over the sample points t = p^j <= T."""
    if T < 16:
        raise PreconditionError("the estimate needs T >= 16")
    if f.is_zero():
        raise DomainError("the zero rule kills every state; dimension undefined")
    counts = cumulative_counts(f, T)
    ts = []
    t = f.p
    while t <= T:
        ts.append(t)
        t *= f.p
    if len(ts) < 2:
        raise PreconditionError("need at least two sample points p^j <= T")
    x = np.log(np.array(ts, dtype=np.float64))
    y = np.log(counts[np.array(ts) - 1])
    if not np.all(np.isfinite(y)):
        raise DomainError("trajectory vanishes at a sample point")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def support_weights(f: LaurentPoly, T: int) -> List[int]:
    """Number of non-zero cells of ``f^t`` for t = 0..T-1."""
    return [len(c) for c in run(f, LaurentPoly.one(f.p, f.nvars), T - 1)] if T > 0 else []


__all__ = ["cumulative_counts", "hausdorff_estimate", "parse_pbm", "render_pbm",
           "reversible", "run", "step", "support_weights"]
