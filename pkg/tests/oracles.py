"""Independent reference implementations used only by the tests.

Nothing here imports the package's linear algebra or search code, so a
test comparing the two is a genuine two-route check.
"""

from itertools import combinations, product

import numpy as np


def rank_mod_p(rows, p):
    """Row rank over F_p by plain Python elimination on lists of ints."""
    M = [[int(v) % p for v in r] for r in np.asarray(rows).tolist()]
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], p - 2, p)
        M[rank] = [v * inv % p for v in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][c]:
                f = M[r][c]
                M[r] = [(a - f * b) % p for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def conv_poly(a, b, p):
    """Univariate product of dense coefficient lists (lowest degree first)."""
    out = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p
    return [int(v) for v in out]


def brute_min_weight(C, T, p, wmax):
    """Smallest weight v with C v = 0 and T v != 0 by trying every support and value."""
    C = np.asarray(C, dtype=np.int64).reshape(-1, np.asarray(T).shape[1])
    T = np.asarray(T, dtype=np.int64)
    n = T.shape[1]
    for w in range(1, wmax + 1):
        for sites in combinations(range(n), w):
            for vals in product(range(1, p), repeat=w):
                v = np.zeros(n, dtype=np.int64)
                v[list(sites)] = vals
                if not ((C @ v) % p).any() and ((T @ v) % p).any():
                    return w
    return None


def symplectic_commutator(ax, bz, p):
    """Commutator exponent of X^ax and Z^bz as plain dot product."""
    return int(np.dot(ax, bz)) % p
