"""Alternating solver for weighted NMF feature selection on incomplete multi-view data.

One sweep updates, in order: the consensus indicator V (multiplicative, with a
large orthogonality penalty), each view's factor U^(v) (multiplicative with
l2,p reweighting), each view's similarity graph S^(v) (closed-form column
update, Gauss-Seidel across views), the cross-view coefficients R (accelerated
projected gradient on the off-diagonal simplex) and the view weights alpha
(closed form on the simplex).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .datamodel import MultiViewDataset, ViewWeights, build_view_weights, impute_missing
from .graph import (
    build_initial_similarity,
    laplacian,
    pairwise_sq_dists,
    update_similarity,
)
from .simplex import project_offdiag_simplex

DENOM_FLOOR = 1e-12


class SolverDivergence(RuntimeError):
    """Raised when the objective or an update produces a non-finite value."""


@dataclass(frozen=True)
class Hyperparameters:
    lam: float  # row-sparsity weight
    beta: float  # graph / complementarity weight
    gamma: float  # view-weight exponent, must exceed 1
    p: float  # sparsity exponent in (0, 1]
    n_clusters: int
    xi: float = 1e7  # orthogonality penalty on V
    eps: float = 1e-10  # reweighting floor
    max_iter: int = 300
    rel_tol: float = 1e-6
    seed: int = 0
    knn: int = 5
    bandwidth: object = "auto"

    def __post_init__(self):
        if self.lam < 0 or self.beta < 0:
            raise ValueError("lam and beta must be nonnegative")
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if not (0 < self.p <= 1):
            raise ValueError("p must lie in (0, 1]")
        if self.xi <= 0 or self.eps <= 0:
            raise ValueError("xi and eps must be positive")
        if self.n_clusters < 2:
            raise ValueError("need at least 2 clusters")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")


@dataclass
class SolverState:
    u: list  # l factor matrices, d_v x c
    v: np.ndarray  # consensus indicator, N x c
    s: list  # l similarity graphs, N x N
    r: np.ndarray  # cross-view coefficients, l x l
    alpha: np.ndarray  # view weights on the simplex


@dataclass
class SolverResult:
    state: SolverState
    trace: np.ndarray  # objective per sweep, including the initial value
    iterations: int
    converged: bool
    wall_time: float


def sparsity_reweight(u: np.ndarray, p: float, eps: float) -> np.ndarray:
    """Diagonal of the l2,p reweighting matrix, smoothed so zero rows stay finite.

    D_ii = p * (||u_i||^2 + eps)^((p-2)/2) / 2, the exact gradient factor of
    the smoothed surrogate sum_i (||u_i||^2 + eps)^(p/2).
    """
    row_sq = np.sum(u * u, axis=1)
    return 0.5 * p * np.power(row_sq + eps, 0.5 * (p - 2.0))


def l2p_norm_p(u: np.ndarray, p: float) -> float:
    """sum_i ||row i||_2^p."""
    return float(np.sum(np.linalg.norm(u, axis=1) ** p))


def objective(
    state: SolverState,
    dataset: MultiViewDataset,
    weights: ViewWeights,
    hyper: Hyperparameters,
) -> float:
    """Full model objective; the ||R||_F^2 term rides inside every view's bracket."""
    ag = state.alpha ** hyper.gamma
    r_term = float(np.sum(state.r * state.r))
    total = 0.0
    for v in range(dataset.n_views):
        x = dataset.views[v]
        w = weights.vectors[v]
        resid = (x - state.u[v] @ state.v.T) * w[None, :]
        term = float(np.sum(resid * resid))
        term += hyper.lam * l2p_norm_p(state.u[v], hyper.p)
        l_s, _ = laplacian(state.s[v])
        recon = state.s[v] - sum(
            state.s[i] * state.r[i, v] for i in range(dataset.n_views) if i != v
        )
        term += hyper.beta * (
            float(np.trace(state.v.T @ l_s @ state.v))
            + float(np.sum(recon * recon))
            + r_term
        )
        total += ag[v] * term
    if not np.isfinite(total):
        raise SolverDivergence("objective is non-finite")
    return total


def update_u(
    v: int,
    state: SolverState,
    dataset: MultiViewDataset,
    weights: ViewWeights,
    hyper: Hyperparameters,
) -> np.ndarray:
    """Multiplicative update of the view-v factor under the l2,p reweighting."""
    x = dataset.views[v]
    w2 = weights.vectors[v] ** 2
    u = state.u[v]
    d = sparsity_reweight(u, hyper.p, hyper.eps)
    num = (x * w2[None, :]) @ state.v
    m = state.v.T @ (state.v * w2[:, None])
    den = u @ m + hyper.lam * d[:, None] * u
    return u * np.sqrt(num / (den + DENOM_FLOOR))


def update_v(
    state: SolverState,
    dataset: MultiViewDataset,
    weights: ViewWeights,
    hyper: Hyperparameters,
) -> np.ndarray:
    """Multiplicative update of the consensus indicator with orthogonality penalty."""
    v_mat = state.v
    ag = state.alpha ** hyper.gamma
    e = np.zeros_like(v_mat)
    q = np.zeros_like(v_mat)
    for k in range(dataset.n_views):
        x = dataset.views[k]
        w2 = weights.vectors[k] ** 2
        u = state.u[k]
        s = state.s[k]
        e += ag[k] * (w2[:, None] * (x.T @ u) + hyper.beta * (s @ v_mat))
        d_row = s.sum(axis=1)
        q += ag[k] * (w2[:, None] * (v_mat @ (u.T @ u)) + hyper.beta * d_row[:, None] * v_mat)
    two_xi = 2.0 * hyper.xi
    num = e + two_xi * v_mat
    den = q + two_xi * (v_mat @ (v_mat.T @ v_mat))
    return v_mat * np.sqrt(num / (den + DENOM_FLOOR))


def update_r(state: SolverState, hyper: Hyperparameters) -> np.ndarray:
    """Solve every column's ridge regression on the off-diagonal simplex.

    The N^2 x l stacked similarity matrix is never materialized; the l x l
    Gram matrix of Frobenius inner products drives the gradient, so each
    inner iteration costs O(l^2). Columns are solved by projected gradient
    with Nesterov momentum and monotone restarts.
    """
    l = len(state.s)
    gram = np.empty((l, l))
    for i in range(l):
        for j in range(i, l):
            gram[i, j] = gram[j, i] = float(np.sum(state.s[i] * state.s[j]))
    if not np.all(np.isfinite(gram)):
        raise SolverDivergence("non-finite Gram entries in the R update")
    lip = 2.0 * (float(np.linalg.eigvalsh(gram)[-1]) + 1.0)
    r_new = np.zeros((l, l))
    for v in range(l):
        r_new[:, v] = _solve_r_column(gram, v, state.r[:, v], lip)
    return r_new


def _solve_r_column(
    gram: np.ndarray,
    v: int,
    warm: np.ndarray,
    lip: float,
    grad_tol: float = 1e-8,
    max_inner: int = 1000,
) -> np.ndarray:
    target = gram[:, v]

    def grad(r):
        return 2.0 * (gram @ r - target) + 2.0 * r

    def value(r):
        return float(r @ gram @ r - 2.0 * target @ r + r @ r)

    r = project_offdiag_simplex(warm, v)
    y = r.copy()
    t = 1.0
    f_prev = value(r)
    for _ in range(max_inner):
        r_next = project_offdiag_simplex(y - grad(y) / lip, v)
        f_next = value(r_next)
        if f_next > f_prev:  # momentum overshot: restart from the last iterate
            y = r.copy()
            t = 1.0
            r_next = project_offdiag_simplex(y - grad(y) / lip, v)
            f_next = value(r_next)
        gap = lip * np.linalg.norm(
            r_next - project_offdiag_simplex(r_next - grad(r_next) / lip, v)
        )
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = r_next + ((t - 1.0) / t_next) * (r_next - r)
        r, t, f_prev = r_next, t_next, f_next
        if gap <= grad_tol:
            break
    return r


def view_losses(
    state: SolverState,
    dataset: MultiViewDataset,
    weights: ViewWeights,
    hyper: Hyperparameters,
) -> np.ndarray:
    """Per-view loss d^(v) driving the view-weight update (no ||R||^2 term)."""
    l = dataset.n_views
    d = np.empty(l)
    for v in range(l):
        x = dataset.views[v]
        w = weights.vectors[v]
        resid = (x - state.u[v] @ state.v.T) * w[None, :]
        term = float(np.sum(resid * resid))
        term += hyper.lam * l2p_norm_p(state.u[v], hyper.p)
        l_s, _ = laplacian(state.s[v])
        recon = state.s[v] - sum(
            state.s[i] * state.r[i, v] for i in range(l) if i != v
        )
        term += hyper.beta * (
            float(np.trace(state.v.T @ l_s @ state.v)) + float(np.sum(recon * recon))
        )
        d[v] = term
    return d


def update_alpha(d: np.ndarray, gamma: float) -> np.ndarray:
    """Simplex-normalized stationary point of sum_v alpha^gamma d_v.

    Views with exactly zero loss absorb all the weight, split equally.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("view losses must be nonnegative")
    zero = d == 0.0
    if np.any(zero):
        alpha = np.zeros_like(d)
        alpha[zero] = 1.0 / zero.sum()
        return alpha
    powered = d ** (1.0 / (1.0 - gamma))
    return powered / powered.sum()


def initialize(
    dataset: MultiViewDataset,
    weights: ViewWeights,
    hyper: Hyperparameters,
) -> SolverState:
    """Strictly positive factors, kNN similarity graphs on imputed data,
    uniform coefficients and view weights.

    V starts as a column-normalized soft cluster indicator (k-means on the
    concatenated imputed views, floored at 1e-3 so multiplicative updates can
    move every entry). Starting V near the nonnegative orthogonal manifold is
    what lets the huge-xi penalty keep the objective monotone: from a generic
    positive matrix the support-splitting required by V'V = I is a slow
    process during which the penalty drags the unpenalized objective upward.
    """
    from .evaluation import kmeans  # deferred: evaluation is a sibling module

    l = dataset.n_views
    if l < 2:
        raise ValueError("complementary reconstruction needs at least two views")
    rng = np.random.default_rng(hyper.seed)
    c = hyper.n_clusters
    u = [rng.uniform(0.1, 1.1, size=(d, c)) for d in dataset.feature_counts]
    imputed = impute_missing(dataset)
    assignments = kmeans(np.vstack(imputed), c, seed=hyper.seed).assignments
    v = np.full((dataset.n_instances, c), 1e-3)
    v[np.arange(dataset.n_instances), assignments] = 1.0
    v /= np.linalg.norm(v, axis=0, keepdims=True)
    s = [
        build_initial_similarity(
            imputed[k], dataset.presence[:, k], k=hyper.knn, bandwidth=hyper.bandwidth
        )
        for k in range(l)
    ]
    r = np.full((l, l), 1.0 / (l - 1))
    np.fill_diagonal(r, 0.0)
    alpha = np.full(l, 1.0 / l)
    return SolverState(u=u, v=v, s=s, r=r, alpha=alpha)


def sweep(
    state: SolverState,
    dataset: MultiViewDataset,
    weights: ViewWeights,
    hyper: Hyperparameters,
) -> None:
    """One full alternating pass, in place: V, U^(v), S^(v), R, alpha."""
    state.v = update_v(state, dataset, weights, hyper)
    for k in range(dataset.n_views):
        state.u[k] = update_u(k, state, dataset, weights, hyper)
    h = pairwise_sq_dists(state.v)
    for k in range(dataset.n_views):
        state.s[k] = update_similarity(
            k, state.s, state.r, state.alpha, hyper.gamma, h
        )
    state.r = update_r(state, hyper)
    state.alpha = update_alpha(view_losses(state, dataset, weights, hyper), hyper.gamma)


def fit(dataset: MultiViewDataset, hyper: Hyperparameters) -> SolverResult:
    """Run alternating sweeps until the relative objective change drops below
    rel_tol or max_iter sweeps elapse."""
    start = time.perf_counter()
    weights = build_view_weights(dataset)
    state = initialize(dataset, weights, hyper)
    trace = [objective(state, dataset, weights, hyper)]
    converged = False
    iterations = 0
    for _ in range(hyper.max_iter):
        sweep(state, dataset, weights, hyper)
        trace.append(objective(state, dataset, weights, hyper))
        iterations += 1
        prev, cur = trace[-2], trace[-1]
        if abs(cur - prev) / max(1.0, prev) < hyper.rel_tol:
            converged = True
            break
    return SolverResult(
        state=state,
        trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
        wall_time=time.perf_counter() - start,
    )


def save_trace(trace: np.ndarray, path: str) -> None:
    """Two-column text: sweep index, objective value."""
    data = np.column_stack([np.arange(len(trace)), trace])
    np.savetxt(path, data, fmt=["%d", "%.12g"])
