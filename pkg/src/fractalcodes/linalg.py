"""Exact Gaussian elimination over F_p.

p = 2 runs on rows packed into uint64 words; other primes use int64 arrays.
Every function takes plain integer arrays and returns fresh arrays.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from .algebra import check_prime, inv_mod
from .errors import StructuralError


def _as_matrix(M, p: int) -> np.ndarray:
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise StructuralError(f"expected a matrix, got shape {A.shape}")
    return A % p


def _pack(A: np.ndarray) -> np.ndarray:
    rows, cols = A.shape
    words = max(1, (cols + 63) // 64)
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :cols] = A & 1
    bits = padded.reshape(rows, words, 64)
    weights = (np.uint64(1) << np.arange(64, dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)


def _unpack(P: np.ndarray, cols: int) -> np.ndarray:
    rows, words = P.shape
    shifts = np.arange(64, dtype=np.uint64)
    bits = (P[:, :, None] >> shifts) & np.uint64(1)
    return bits.reshape(rows, words * 64)[:, :cols].astype(np.int64)


def _rref_gf2(A: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    rows, cols = A.shape
    P = _pack(A)
    pivots: List[int] = []
    r = 0
    one = np.uint64(1)
    for c in range(cols):
        if r == rows:
            break
        w, b = divmod(c, 64)
        col = (P[r:, w] >> np.uint64(b)) & one
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            P[[r, piv]] = P[[piv, r]]
        hit = np.flatnonzero((P[:, w] >> np.uint64(b)) & one)
        hit = hit[hit != r]
        if hit.size:
            P[hit] ^= P[r]
        pivots.append(c)
        r += 1
    return _unpack(P, cols), pivots


def _rref_general(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    rows, cols = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * inv_mod(int(A[r, c]), p)) % p
        hit = np.flatnonzero(A[:, c])
        hit = hit[hit != r]
        if hit.size:
            A[hit] = (A[hit] - np.outer(A[hit, c], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rref_fp(M, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form and pivot columns of ``M`` over F_p."""
    p = check_prime(p)
    A = _as_matrix(M, p)
    if A.size == 0:
        return A, []
    if p == 2:
        return _rref_gf2(A)
    return _rref_general(A, p)


def rank_fp(M, p: int) -> int:
    A = np.asarray(M)
    if A.size == 0:
        return 0
    return len(rref_fp(A, p)[1])


def rowspace_basis(M, p: int) -> np.ndarray:
    """Independent rows (in RREF) spanning the row space of ``M``."""
    A = np.asarray(M)
    if A.size == 0:
        return np.zeros((0, A.shape[-1] if A.ndim == 2 else 0), dtype=np.int64)
    R, piv = rref_fp(A, p)
    return R[: len(piv)]


def kernel_fp(M, p: int) -> np.ndarray:
    """Basis (as rows) of the right kernel ``{v : M v = 0}``."""
    p = check_prime(p)
    A = np.asarray(M)
    ncols = A.shape[1] if A.ndim == 2 else A.shape[0]
    if A.size == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref_fp(A, p)
    free = [c for c in range(ncols) if c not in set(piv)]
    K = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        K[k, f] = 1
        for r, pc in enumerate(piv):
            K[k, pc] = (-R[r, f]) % p
    return K


def solve_fp(M, v, p: int) -> Optional[np.ndarray]:
    """One solution ``x`` of ``M x = v`` or None when inconsistent."""
    p = check_prime(p)
    A = _as_matrix(M, p)
    b = np.asarray(v, dtype=np.int64).reshape(-1) % p
    if A.shape[0] != b.shape[0]:
        raise StructuralError(f"matrix has {A.shape[0]} rows, rhs has {b.shape[0]} entries")
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, piv = rref_fp(aug, p)
    ncols = A.shape[1]
    if ncols in piv:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = R[r, ncols]
    return x


def in_rowspace(M, v, p: int) -> bool:
    A = np.asarray(M)
    vec = np.asarray(v, dtype=np.int64).reshape(1, -1)
    if A.size == 0:
        return not np.any(vec % p)
    return rank_fp(np.vstack([A, vec]), p) == rank_fp(A, p)


def same_rowspace(A, B, p: int) -> bool:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.size == 0 or B.size == 0:
        return rank_fp(A, p) == 0 and rank_fp(B, p) == 0
    ra = rank_fp(A, p)
    return ra == rank_fp(B, p) and ra == rank_fp(np.vstack([A, B]), p)


def inverse_fp(M, p: int) -> Optional[np.ndarray]:
    """Inverse of a square matrix over F_p, or None if singular."""
    p = check_prime(p)
    A = _as_matrix(M, p)
    n = A.shape[0]
    if A.shape != (n, n):
        raise StructuralError("inverse needs a square matrix")
    R, piv = rref_fp(np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return R[:, n:]


def matmul_fp(A, B, p: int) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % p


def quotient_basis(V, W, p: int) -> np.ndarray:
    """Rows of ``V`` extending a basis of span(W) to one of span(W + V).

    Returns representatives of a basis of span(V+W)/span(W).
    """
    W = np.asarray(W, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64)
    ncols = V.shape[1] if V.ndim == 2 and V.size else (W.shape[1] if W.ndim == 2 else 0)
    basis = rowspace_basis(W, p) if W.size else np.zeros((0, ncols), dtype=np.int64)
    chosen = []
    current = basis
    r = current.shape[0]
    for row in V:
        cand = np.vstack([current, row[None, :]]) if current.size else row[None, :]
        if rank_fp(cand, p) > r:
            chosen.append(row)
            current = cand
            r += 1
    if not chosen:
        return np.zeros((0, ncols), dtype=np.int64)
    return np.array(chosen, dtype=np.int64) % p
