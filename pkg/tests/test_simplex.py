import numpy as np
import pytest

from mvufs.simplex import project_offdiag_simplex, project_simplex


def bisection_oracle(y, excluded=None):
    """Independent water-filling projection via bisection on the threshold."""
    y = np.asarray(y, dtype=float)
    free = np.ones(y.size, dtype=bool)
    if excluded is not None:
        free[excluded] = False
    z = y[free]
    lo, hi = z.min() - 1.0, z.max()
    for _ in range(200):
        theta = 0.5 * (lo + hi)
        if np.maximum(z - theta, 0.0).sum() > 1.0:
            lo = theta
        else:
            hi = theta
    out = np.zeros_like(y)
    out[free] = np.maximum(z - 0.5 * (lo + hi), 0.0)
    return out


def test_feasible_point_unchanged():
    y = np.array([0.2, 0.5, 0.3])
    assert np.allclose(project_simplex(y), y)


def test_offdiag_symmetric_case():
    out = project_offdiag_simplex(np.array([10.0, 0.0, 0.0]), excluded=0)
    assert np.allclose(out, [0.0, 0.5, 0.5])


def test_offdiag_feasible_unchanged():
    y = np.array([0.0, 0.25, 0.75])
    assert np.allclose(project_offdiag_simplex(y, excluded=0), y)


def test_matches_bisection_oracle():
    rng = np.random.default_rng(11)
    for _ in range(50):
        y = rng.normal(scale=3.0, size=5)
        v = rng.integers(5)
        out = project_offdiag_simplex(y, excluded=v)
        assert np.max(np.abs(out - bisection_oracle(y, excluded=v))) <= 1e-8
        assert out[v] == 0.0
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out >= 0)


def test_too_short_vector():
    with pytest.raises(ValueError):
        project_offdiag_simplex(np.array([1.0]), excluded=0)
