"""Per-view similarity graphs under missingness and their closed-form repair.

Every similarity matrix S is N x N with zero diagonal, entries in [0, 1] and
column sums equal to 1. The cross-view coefficient matrix R is l x l with
zero diagonal and off-diagonal column sums equal to 1.
"""

from __future__ import annotations

import numpy as np

from .simplex import project_offdiag_simplex

COLSUM_TOL = 1e-8


def check_similarity(s: np.ndarray, tol: float = COLSUM_TOL) -> None:
    if np.any(s < -tol) or np.any(s > 1 + tol):
        raise ValueError("similarity entries outside [0, 1]")
    if np.any(np.abs(np.diag(s)) > tol):
        raise ValueError("similarity diagonal is not zero")
    if np.any(np.abs(s.sum(axis=0) - 1.0) > tol):
        raise ValueError("similarity columns do not sum to 1")


def check_coefficients(r: np.ndarray, tol: float = COLSUM_TOL) -> None:
    if np.any(r < -tol) or np.any(r > 1 + tol):
        raise ValueError("coefficient entries outside [0, 1]")
    if np.any(np.abs(np.diag(r)) > tol):
        raise ValueError("coefficient diagonal is not zero")
    if np.any(np.abs(r.sum(axis=0) - 1.0) > tol):
        raise ValueError("coefficient columns do not sum to 1")


def pairwise_sq_dists(v: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between the rows of v (symmetric, zero diagonal)."""
    sq = np.sum(v * v, axis=1)
    h = sq[:, None] + sq[None, :] - 2.0 * (v @ v.T)
    np.maximum(h, 0.0, out=h)
    h = 0.5 * (h + h.T)
    np.fill_diagonal(h, 0.0)
    return h


def build_initial_similarity(
    x: np.ndarray,
    presence: np.ndarray,
    k: int = 5,
    bandwidth="auto",
) -> np.ndarray:
    """Heat-kernel kNN similarity among present instances, column-normalized.

    Edges are kept when either endpoint lists the other among its k nearest
    present neighbors. Absent instances get uniform 1/(N-1) similarity to all
    others. With bandwidth="auto", sigma is the mean kth-neighbor distance
    among present instances (falling back to 1 when that mean is zero).
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[1]
    present = np.flatnonzero(np.asarray(presence) == 1)
    m = present.size
    if k >= m:
        raise ValueError(f"k={k} must be smaller than the {m} present instances")
    cols = x[:, present]
    d2 = pairwise_sq_dists(cols.T)
    order = np.argsort(d2, axis=1)
    knn = order[:, 1 : k + 1]  # skip self
    if bandwidth == "auto":
        kth = np.sqrt(d2[np.arange(m), order[:, k]])
        sigma = float(kth.mean())
        if sigma <= 0.0:
            sigma = 1.0
    else:
        sigma = float(bandwidth)
        if sigma <= 0.0:
            raise ValueError("bandwidth must be positive")
    kernel = np.exp(-d2 / (2.0 * sigma * sigma))
    mask = np.zeros((m, m), dtype=bool)
    rows = np.repeat(np.arange(m), k)
    mask[rows, knn.ravel()] = True
    mask |= mask.T
    kernel = np.where(mask, kernel, 0.0)
    np.fill_diagonal(kernel, 0.0)

    s = np.zeros((n, n))
    s[np.ix_(present, present)] = kernel
    absent = np.setdiff1d(np.arange(n), present)
    if absent.size:
        s[absent, :] = 1.0 / (n - 1)
        s[:, absent] = 1.0 / (n - 1)
        np.fill_diagonal(s, 0.0)
    colsum = s.sum(axis=0)
    colsum[colsum == 0.0] = 1.0
    s = s / colsum
    np.clip(s, 0.0, 1.0, out=s)
    return s


def laplacian(s: np.ndarray):
    """Graph Laplacian L = D_s - S with D_s the diagonal of row sums of S."""
    d = np.diag(s.sum(axis=1))
    return d - s, d


def update_similarity(
    v: int,
    graphs,
    r: np.ndarray,
    alpha: np.ndarray,
    gamma: float,
    h: np.ndarray,
) -> np.ndarray:
    """Optimal similarity matrix of view v given all other variables.

    The columns of the subproblem decouple; each column is the Euclidean
    projection of the corresponding column of the target matrix P onto the
    simplex with a pinned zero diagonal entry, which is the exact column
    minimizer under the graph constraints.
    """
    l = len(graphs)
    n = graphs[0].shape[0]
    ag = np.asarray(alpha, dtype=float) ** gamma
    others = [k for k in range(l) if k != v]
    denom = sum(ag[k] * r[v, k] ** 2 for k in others) + ag[v]
    if denom <= 0.0:
        raise ValueError("vanishing alpha and coefficients: corrupted state")
    b = sum(graphs[i] * r[i, v] for i in others)
    q = ag[v] * (b - 0.25 * h)
    for k in others:
        n_k = graphs[k].copy()
        for j in others:
            if j != k:
                n_k -= graphs[j] * r[j, k]
        q += ag[k] * r[v, k] * n_k
    p = q / denom
    s = np.empty_like(p)
    for c in range(n):
        s[:, c] = project_offdiag_simplex(p[:, c], excluded=c)
    return s
