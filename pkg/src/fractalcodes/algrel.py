"""Bounded search for algebraic relations among polynomials.

A relation is ``prod_{i in S} f_i^{n_i} = c * prod_{j in T} f_j^{n_j}`` over
the polynomial ring (no periodic reduction), with non-negative ``n`` not all
zero and ``c`` a non-zero constant. The search is a semi-decision procedure:
``None`` means nothing was found up to the bound, never that no relation exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import LaurentPoly, inv_mod
from .errors import StructuralError


@dataclass(frozen=True)
class RelationWitness:
    lhs: Tuple[Tuple[int, int], ...]   # (polynomial index, exponent)
    rhs: Tuple[Tuple[int, int], ...]
    c: int
    pattern: str  # e.g. "1|2"

    def exponents(self, count: int) -> Tuple[int, ...]:
        out = [0] * count
        for i, n in self.lhs + self.rhs:
            out[i] = n
        return tuple(out)

    def verify(self, fs: Sequence[LaurentPoly]) -> bool:
        one = LaurentPoly.one(fs[0].p, fs[0].nvars)
        left, right = one, one
        for i, n in self.lhs:
            left = left * fs[i] ** n
        for i, n in self.rhs:
            right = right * fs[i] ** n
        return left == right.scale(self.c)

    def as_dict(self) -> dict:
        return {"lhs": [list(t) for t in self.lhs], "rhs": [list(t) for t in self.rhs],
                "c": self.c, "pattern": self.pattern}


def _low_degree(f: LaurentPoly) -> int:
    return min(sum(e) for e, _ in f.terms)


def _splits(k: int, patterns: Optional[Iterable[str]] = None):
    """Unordered splits of range(k) into two non-empty sides, smaller side first."""
    wanted = None if patterns is None else set(patterns)
    seen = set()
    for size in range(1, k // 2 + 1):
        for lhs in itertools.combinations(range(k), size):
            rhs = tuple(i for i in range(k) if i not in lhs)
            key = frozenset([lhs, rhs])
            if key in seen:
                continue
            seen.add(key)
            label = f"{len(lhs)}|{len(rhs)}"
            if wanted is not None and label not in wanted:
                continue
            yield lhs, rhs, label


class _Powers:
    def __init__(self, fs):
        self.fs = fs
        self.cache: Dict[Tuple[int, int], LaurentPoly] = {}

    def get(self, i, n):
        key = (i, n)
        if key not in self.cache:
            if n == 0:
                self.cache[key] = LaurentPoly.one(self.fs[i].p, self.fs[i].nvars)
            else:
                self.cache[key] = self.get(i, n - 1) * self.fs[i]
        return self.cache[key]


def related_multi(fs: Sequence[LaurentPoly], bound: int,
                  patterns: Optional[Iterable[str]] = None) -> Optional[RelationWitness]:
    """Search every two-sided split of the polynomials with exponents ``0..bound``.

    ``patterns`` optionally restricts the split shapes, e.g. ``["2|2"]``.
    Candidates whose total degrees (or lowest degrees) differ between the two
    sides are skipped: both add exactly under multiplication over a field.
    """
    fs = list(fs)
    if len(fs) < 2:
        raise StructuralError("need at least two polynomials")
    if bound < 1:
        raise StructuralError("bound must be at least 1")
    p = fs[0].p
    for f in fs:
        if f.p != p or f.nvars != fs[0].nvars:
            raise StructuralError("polynomials must share p and variable count")
        if f.is_zero():
            raise StructuralError("zero polynomial has no meaningful relations")
    deg = [f.degree() for f in fs]
    low = [_low_degree(f) for f in fs]
    pw = _Powers(fs)
    rng = range(bound + 1)
    for lhs, rhs, label in _splits(len(fs), patterns):
        for ln in itertools.product(rng, repeat=len(lhs)):
            dl = sum(n * deg[i] for n, i in zip(ln, lhs))
            ll = sum(n * low[i] for n, i in zip(ln, lhs))
            left = None
            for rn in itertools.product(rng, repeat=len(rhs)):
                if not any(ln) and not any(rn):
                    continue
                if sum(n * deg[j] for n, j in zip(rn, rhs)) != dl:
                    continue
                if sum(n * low[j] for n, j in zip(rn, rhs)) != ll:
                    continue
                if left is None:
                    left = LaurentPoly.one(p, fs[0].nvars)
                    for n, i in zip(ln, lhs):
                        left = left * pw.get(i, n)
                right = LaurentPoly.one(p, fs[0].nvars)
                for n, j in zip(rn, rhs):
                    right = right * pw.get(j, n)
                if len(left) != len(right):
                    continue
                c = left.terms[0][1] * inv_mod(right.terms[0][1], p) % p
                if left == right.scale(c):
                    return RelationWitness(
                        tuple((i, n) for i, n in zip(lhs, ln)),
                        tuple((j, n) for j, n in zip(rhs, rn)), c, label)
    return None


def related_pair(f1, f2, bound: int) -> Optional[RelationWitness]:
    return related_multi([f1, f2], bound)


def related_triple(f1, f2, f3, bound: int) -> Optional[RelationWitness]:
    return related_multi([f1, f2, f3], bound)


def related_quad(f1, f2, f3, f4, bound: int,
                 patterns: Optional[Iterable[str]] = None) -> Optional[RelationWitness]:
    return related_multi([f1, f2, f3, f4], bound, patterns)


def report(fs: Sequence[LaurentPoly], bound: int) -> dict:
    """JSON-ready summary; an empty search reports ``"unknown"`` rather than False."""
    w = related_multi(fs, bound)
    out: dict = {"related": True if w else "unknown", "bound": bound}
    if w:
        out["witness"] = w.as_dict()
    return out


__all__ = ["RelationWitness", "related_multi", "related_pair", "related_quad",
           "related_triple", "report"]
