"""Euclidean projections onto the probability simplex."""

from __future__ import annotations

import numpy as np


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Project y onto {x : x >= 0, sum(x) = 1} (sort-based exact algorithm)."""
    y = np.asarray(y, dtype=float)
    m = y.size
    if m == 0:
        raise ValueError("cannot project an empty vector")
    s = np.sort(y)[::-1]
    cumsum = np.cumsum(s)
    rho = np.nonzero(s * np.arange(1, m + 1) > (cumsum - 1))[0][-1]
    theta = (cumsum[rho] - 1.0) / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def project_offdiag_simplex(y: np.ndarray, excluded: int) -> np.ndarray:
    """Project y onto the simplex with coordinate `excluded` pinned to zero.

    The remaining coordinates are the Euclidean-nearest nonnegative vector
    summing to one.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least two coordinates")
    out = np.zeros_like(y)
    free = np.arange(y.size) != excluded
    out[free] = project_simplex(y[free])
    return out
