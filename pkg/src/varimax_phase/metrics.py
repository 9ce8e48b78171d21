"""Rotation recovery error modulo signed permutations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, SizeError
from .linalg import Rotation, SignedPermutation, as_matrix, dense

BRUTE_FORCE_MAX_K = 8
SCORE_TOL = 1e-12


def _square(a):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    return a


def _signs_for(a, perm):
    vals = a[list(perm), range(len(perm))]
    return tuple(-1 if v < 0 else 1 for v in vals)


def _assignment_value(w):
    if w.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(w, maximize=True)
    return float(w[rows, cols].sum())


def best_signed_permutation(a):
    """Signed permutation ``P`` maximizing ``<A, P>``, i.e. minimizing ``||A - P||_F``.

    Solves the assignment problem on ``|A|`` in O(k^3). Among optimal
    permutations (score within ``SCORE_TOL``) the lexicographically smallest
    ``perm`` is returned, found by fixing columns left to right.

    Returns
    -------
    (SignedPermutation, float)
        The permutation and its score ``sum_j |A[perm[j], j]|``.
    """
    a = _square(a)
    k = a.shape[0]
    w = np.abs(a)
    rows, cols = linear_sum_assignment(w, maximize=True)
    perm = np.empty(k, dtype=int)
    perm[cols] = rows
    best = float(w[perm, np.arange(k)].sum())
    tol = SCORE_TOL * max(1.0, best)

    free_rows = list(range(k))
    fixed = 0.0
    for j in range(k):
        rest_cols = list(range(j + 1, k))
        for r in free_rows:
            if r >= perm[j]:
                break
            others = [x for x in free_rows if x != r]
            val = fixed + w[r, j] + _assignment_value(w[np.ix_(others, rest_cols)])
            if val >= best - tol:
                sub_r, sub_c = linear_sum_assignment(w[np.ix_(others, rest_cols)], maximize=True)
                perm[j] = r
                for i, c in zip(sub_r, sub_c):
                    perm[rest_cols[c]] = others[i]
                break
        fixed += w[perm[j], j]
        free_rows.remove(perm[j])

    perm_t = tuple(int(p) for p in perm)
    score = float(w[perm, np.arange(k)].sum())
    return SignedPermutation(perm_t, _signs_for(a, perm_t)), score


def brute_force_signed_permutation(a):
    """Exhaustive maximum of ``<A, P>`` over all ``2^k k!`` signed permutations."""
    a = _square(a)
    k = a.shape[0]
    if k > BRUTE_FORCE_MAX_K:
        raise SizeError(f"brute force limited to k <= {BRUTE_FORCE_MAX_K}, got {k}")
    perms = np.array(list(itertools.permutations(range(k))))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
    best_score, best_p, best_s = -math.inf, None, None
    # chunked so k = 8 stays within a few tens of MB
    for start in range(0, len(perms), 2048):
        chunk = perms[start:start + 2048]
        vals = a[chunk, np.arange(k)]
        scores = vals @ signs.T
        top = float(scores.max())
        if best_p is None or top > best_score + SCORE_TOL * max(1.0, abs(best_score)):
            # first hit in (perm, signs) order; ties go to the earlier candidate
            hits = np.argwhere(scores >= top - SCORE_TOL * max(1.0, abs(top)))[0]
            pi, si = int(hits[0]), int(hits[1])
            best_score = float(scores[pi, si])
            best_p, best_s = chunk[pi], signs[si]
    return SignedPermutation(tuple(best_p), tuple(int(s) for s in best_s)), best_score


@dataclass(frozen=True, eq=False)
class DistanceResult:
    dist: float
    best_p: SignedPermutation
    alignment: np.ndarray


def _as_rotation(r):
    return r if isinstance(r, Rotation) else Rotation(r)


def rotation_distance(r_star, r_hat) -> DistanceResult:
    """``min_P ||R_hat - P R*||_F / ||R*||_F``, computed both ways and cross-checked."""
    r_star, r_hat = _as_rotation(r_star), _as_rotation(r_hat)
    if r_star.dim != r_hat.dim:
        raise DimensionError(f"dimension mismatch: {r_star.dim} vs {r_hat.dim}")
    k = r_star.dim
    align = r_hat.mat @ r_star.mat.T
    p, _ = best_signed_permutation(align)
    pm = dense(p)
    d_aligned = float(np.linalg.norm(align - pm) / math.sqrt(k))
    d_direct = float(np.linalg.norm(r_hat.mat - pm @ r_star.mat) / np.linalg.norm(r_star.mat))
    if abs(d_aligned - d_direct) > 1e-10:
        raise ArithmeticError(f"distance formulas disagree: {d_aligned!r} vs {d_direct!r}")
    align.setflags(write=False)
    return DistanceResult(dist=d_aligned, best_p=p, alignment=align)


def signed_permutation_gap(a):
    """Fourth-power deficit of an orthogonal ``A`` and its distance to the signed permutations.

    Returns ``(gap, t)`` with ``gap = sum_i (sum_j A_ij^4 - 1)`` and
    ``t = min_P ||A - P||_F``. ``gap <= -t^2 / 16`` for every orthogonal ``A``.
    """
    a = _as_rotation(a).mat
    gap = float(np.sum(a**4) - a.shape[0])
    p, _ = best_signed_permutation(a)
    t = float(np.linalg.norm(a - dense(p)))
    return gap, t
