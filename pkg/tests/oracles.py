"""Independent reference implementations used only by the test suite.

These are deliberately naive (full grid scans, direct minor expansions)
and share no code with the production paths they check.
"""

from __future__ import annotations

import itertools

import numpy as np


def brute_force_shortest_supnorm(columns, coeff_bound: int = 25):
    """Scan every integer coefficient vector with |c_i| <= coeff_bound.

    Returns (coeffs, length) with the same sign/tie policy as the
    production enumerator: among minimizers, flip signs so the first
    nonzero coefficient is positive, then take the lexicographically
    smallest coefficient tuple.
    """
    B = np.asarray(columns, dtype=float)
    k = B.shape[0]
    axes = [np.arange(-coeff_bound, coeff_bound + 1)] * k
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    grid = grid[np.any(grid != 0, axis=1)]
    lengths = np.max(np.abs(grid @ B.T), axis=1)
    best = float(np.min(lengths))
    mask = lengths == best
    cands = []
    for c in grid[mask]:
        c = tuple(int(x) for x in c)
        first = next(x for x in c if x != 0)
        if first < 0:
            c = tuple(-x for x in c)
        cands.append(c)
    return min(cands), best


def wedge_coordinates(vectors):
    """Plücker coordinates of v_1 ^ ... ^ v_j as a dict over row index sets.

    ``vectors`` is a k x j matrix (columns are the factors); coordinates
    are the j x j minors indexed by sorted row subsets.
    """
    M = np.asarray(vectors, dtype=float)
    k, j = M.shape
    out = {}
    for rows in itertools.combinations(range(k), j):
        out[rows] = float(np.linalg.det(M[np.array(rows), :])) if j > 0 else 1.0
    return out


def exterior_matrix(A, grade):
    """Matrix of the grade-th exterior power of A in the e_I basis.

    Basis index sets are sorted subsets of {0..k-1} in lexicographic
    order; entry [I, J] = det of the I x J submatrix of A.
    """
    A = np.asarray(A, dtype=float)
    k = A.shape[0]
    subsets = list(itertools.combinations(range(k), grade))
    n = len(subsets)
    out = np.zeros((n, n))
    for a, I in enumerate(subsets):
        for b, J in enumerate(subsets):
            out[a, b] = np.linalg.det(A[np.ix_(I, J)])
    return subsets, out
