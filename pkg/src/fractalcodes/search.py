"""Exhaustive minimum-weight search over F_p vectors.

Finds the least number of *sites* carrying a non-zero vector ``v`` such that
``C v = 0`` and ``T v != 0``. A site owns one or more columns (one for CSS
searches, an X and a Z column for symplectic ones). Candidates are visited in
increasing weight and, within a weight, in lexicographic site order, so the
returned witness is deterministic regardless of thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import List, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded

DEFAULT_BUDGET = 10**8


@dataclass
class SearchResult:
    weight: Optional[int]
    witness: Optional[np.ndarray]
    wmax: int
    candidates: int = 0
    exhausted: List[int] = field(default_factory=list)


def _site_options(groups, p: int):
    """Per-site coefficient patterns: all non-zero vectors, and the monic subset."""
    opts, monic = [], []
    for g in groups:
        allv = [v for v in product(range(p), repeat=len(g)) if any(v)]
        opts.append(allv)
        monic.append([v for v in allv if v[next(i for i, c in enumerate(v) if c)] == 1])
    return opts, monic


def candidate_count(n_sites: int, w: int, per_site: int, p: int) -> int:
    if w == 0:
        return 0
    return comb(n_sites, w) * per_site ** w // max(1, p - 1)


class _Gf2Kernel:
    """Bitmask representation: bits [0, c) hold C v, bits [c, c+t) hold T v."""

    def __init__(self, C, T, groups):
        self.c = C.shape[0]
        stacked = np.vstack([C, T]) % 2 if C.size or T.size else np.zeros((0, 0), dtype=np.int64)
        cols = []
        for j in range(stacked.shape[1]):
            bits = 0
            for r in np.flatnonzero(stacked[:, j]):
                bits |= 1 << int(r)
            cols.append(bits)
        self.check_mask = (1 << self.c) - 1
        self.site_vals = []
        for g in groups:
            vals = []
            for pattern in product((0, 1), repeat=len(g)):
                if not any(pattern):
                    continue
                acc = 0
                for coef, j in zip(pattern, g):
                    if coef:
                        acc ^= cols[j]
                vals.append((pattern, acc))
            self.site_vals.append(vals)

    def search(self, w: int, first_sites: Sequence[int]):
        n = len(self.site_vals)
        vals = self.site_vals
        mask = self.check_mask
        chosen = [None] * w

        def rec(start, depth, acc):
            if depth == w:
                return acc & mask == 0 and acc >> self.c != 0
            for j in range(start, n - (w - depth) + 1):
                for pattern, v in vals[j]:
                    chosen[depth] = (j, pattern)
                    if rec(j + 1, depth + 1, acc ^ v):
                        return True
            return False

        for j0 in first_sites:
            if j0 > n - w:
                break
            for pattern, v in vals[j0]:
                chosen[0] = (j0, pattern)
                if w == 1:
                    if v & mask == 0 and v >> self.c != 0:
                        return list(chosen)
                elif rec(j0 + 1, 1, v):
                    return list(chosen)
        return None


class _GfpKernel:
    """Dense modular arithmetic for odd primes."""

    def __init__(self, C, T, groups, p):
        self.p = p
        self.c = C.shape[0]
        stacked = np.vstack([C, T]).astype(np.int64) % p
        self.site_vals = []
        opts, monic = _site_options(groups, p)
        self.monic = []
        for g, allv, mon in zip(groups, opts, monic):
            cols = stacked[:, list(g)]
            self.site_vals.append([(v, cols @ np.array(v) % p) for v in allv])
            self.monic.append([(v, cols @ np.array(v) % p) for v in mon])

    def _ok(self, acc):
        return not acc[: self.c].any() and acc[self.c:].any()

    def search(self, w: int, first_sites: Sequence[int]):
        n = len(self.site_vals)
        p = self.p
        chosen = [None] * w

        def rec(start, depth, acc):
            if depth == w:
                return self._ok(acc)
            for j in range(start, n - (w - depth) + 1):
                for pattern, v in self.site_vals[j]:
                    chosen[depth] = (j, pattern)
                    if rec(j + 1, depth + 1, (acc + v) % p):
                        return True
            return False

        for j0 in first_sites:
            if j0 > n - w:
                break
            # the conditions are invariant under scaling, so the first site is monic
            for pattern, v in self.monic[j0]:
                chosen[0] = (j0, pattern)
                if w == 1:
                    if self._ok(v):
                        return list(chosen)
                elif rec(j0 + 1, 1, v.copy()):
                    return list(chosen)
        return None


def min_weight_search(C, T, p: int, wmax: int, groups: Optional[Sequence[Sequence[int]]] = None,
                      budget: int = DEFAULT_BUDGET, threads: int = 1,
                      wmin: int = 1) -> SearchResult:
    """Smallest site weight of ``v`` with ``C v = 0`` and ``T v != 0``.

    ``groups`` lists the columns belonging to each site (default: one column
    per site). Raises :class:`BudgetExceeded` before starting any weight whose
    cumulative candidate count would exceed ``budget``; the exception carries
    the weights already ruled out.
    """
    C = np.atleast_2d(np.asarray(C, dtype=np.int64))
    T = np.atleast_2d(np.asarray(T, dtype=np.int64))
    ncols = max(C.shape[1], T.shape[1])
    if C.size == 0:
        C = np.zeros((0, ncols), dtype=np.int64)
    if T.size == 0:
        T = np.zeros((0, ncols), dtype=np.int64)
    if groups is None:
        groups = [[j] for j in range(ncols)]
    groups = [list(g) for g in groups]
    n_sites = len(groups)
    result = SearchResult(None, None, wmax)
    if T.shape[0] == 0:
        return result
    per_site = max((p ** len(g) - 1 for g in groups), default=1)
    kern = _Gf2Kernel(C, T, groups) if p == 2 else _GfpKernel(C, T, groups, p)
    spent = 0
    for w in range(max(1, wmin), min(wmax, n_sites) + 1):
        cost = candidate_count(n_sites, w, per_site, p)
        if spent + cost > budget:
            raise BudgetExceeded(
                f"weight {w} would bring the candidate count to {spent + cost} (budget {budget})",
                candidates=spent + cost, budget=budget,
                partial={"ruled_out_below": w, "exhausted": list(result.exhausted)})
        spent += cost
        hit = _run_weight(kern, w, n_sites, threads)
        result.candidates = spent
        if hit is not None:
            vec = np.zeros(ncols, dtype=np.int64)
            for j, pattern in hit:
                for coef, col in zip(pattern, groups[j]):
                    vec[col] = coef
            result.weight = w
            result.witness = vec
            return result
        result.exhausted.append(w)
    return result


def _run_weight(kern, w: int, n_sites: int, threads: int):
    starts = list(range(0, n_sites - w + 1))
    if threads <= 1 or len(starts) < 2:
        return kern.search(w, starts)
    # contiguous partitions of the first site; the smallest hit wins
    chunks = np.array_split(np.array(starts), min(threads, len(starts)))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        found = list(pool.map(lambda ch: kern.search(w, [int(j) for j in ch]), chunks))
    for hit in found:
        if hit is not None:
            return hit
    return None
