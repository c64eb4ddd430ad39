"""Multi-view dataset containers, text I/O, missingness simulation and imputation.

A dataset holds l per-view feature matrices X^(v) of shape (d_v, N) with
nonnegative entries, an N x l presence mask (1 = instance observed in that
view) and optional ground-truth labels. All containers are immutable after
construction; operations are pure given (inputs, seed).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed datasets, manifests or matrix files."""


@dataclass(frozen=True)
class MultiViewDataset:
    views: tuple  # l arrays, each (d_v, N), nonnegative
    presence: np.ndarray  # (N, l) binary mask
    labels: np.ndarray | None = None
    feature_names: tuple | None = None

    def __post_init__(self):
        views = tuple(np.asarray(x, dtype=float) for x in self.views)
        object.__setattr__(self, "views", views)
        if len(views) == 0:
            raise DatasetError("dataset needs at least one view")
        n = views[0].shape[1]
        for v, x in enumerate(views):
            if x.ndim != 2:
                raise DatasetError(f"view {v} is not a matrix")
            if x.shape[1] != n:
                raise DatasetError(
                    f"view {v} has {x.shape[1]} instances, expected {n}"
                )
            if np.any(x < 0):
                raise DatasetError(f"view {v} contains a negative entry")
            if not np.all(np.isfinite(x)):
                raise DatasetError(f"view {v} contains a non-finite entry")
        presence = np.asarray(self.presence)
        object.__setattr__(self, "presence", presence)
        if presence.shape != (n, len(views)):
            raise DatasetError(
                f"presence mask shape {presence.shape} != ({n}, {len(views)})"
            )
        if not np.all(np.isin(presence, (0, 1))):
            raise DatasetError("presence entries must be 0 or 1")
        if np.any(presence.sum(axis=1) == 0):
            raise DatasetError("some instance is present in zero views")
        if np.any(presence.sum(axis=0) == 0):
            raise DatasetError("some view has zero present instances")
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            object.__setattr__(self, "labels", labels)
            if labels.shape != (n,):
                raise DatasetError("labels must have one entry per instance")

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def n_instances(self) -> int:
        return self.views[0].shape[1]

    @property
    def feature_counts(self) -> tuple:
        return tuple(x.shape[0] for x in self.views)

    @property
    def is_complete(self) -> bool:
        return bool(np.all(self.presence == 1))


@dataclass(frozen=True)
class ViewWeights:
    """Per-view diagonal weight vectors of length N.

    Present instances get weight 1; absent ones get the view's fraction of
    available instances, so every entry lies in (0, 1].
    """

    vectors: tuple  # l arrays of length N

    def __post_init__(self):
        vectors = tuple(np.asarray(w, dtype=float) for w in self.vectors)
        object.__setattr__(self, "vectors", vectors)
        for v, w in enumerate(vectors):
            if np.any(w <= 0) or np.any(w > 1):
                raise DatasetError(f"weights of view {v} outside (0, 1]")


@dataclass(frozen=True)
class SyntheticSpec:
    n_instances: int
    n_views: int
    n_clusters: int
    features: tuple  # per-view feature counts
    informative: tuple  # per-view count of planted discriminative features
    noise_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(int(d) for d in self.features))
        object.__setattr__(
            self, "informative", tuple(int(m) for m in self.informative)
        )
        if self.n_clusters < 2 or self.n_instances < self.n_clusters:
            raise DatasetError("need N >= c >= 2")
        if len(self.features) != self.n_views or len(self.informative) != self.n_views:
            raise DatasetError("features/informative must have one entry per view")
        for d, m in zip(self.features, self.informative):
            if not (0 <= m <= d):
                raise DatasetError("informative count must be within [0, d_v]")
        if self.noise_scale < 0:
            raise DatasetError("noise_scale must be nonnegative")


def build_view_weights(dataset: MultiViewDataset) -> ViewWeights:
    """Diagonal WNMF weights: 1 for present instances, presence fraction otherwise."""
    n = dataset.n_instances
    vectors = []
    for v in range(dataset.n_views):
        col = dataset.presence[:, v].astype(float)
        frac = col.sum() / n
        vectors.append(np.where(col == 1, 1.0, frac))
    return ViewWeights(tuple(vectors))


def simulate_missing(
    dataset: MultiViewDataset, ratio: float, seed: int, max_attempts: int = 1000
) -> MultiViewDataset:
    """Mark floor(ratio * N) instances absent in each view, uniformly at random.

    Sampling is independent across views; instances that end up absent
    everywhere are repaired by swapping presence with a randomly chosen
    instance that can spare a view, keeping per-view absence counts exact.
    Data entries of absent instances are retained in storage.
    """
    if not dataset.is_complete:
        raise DatasetError("simulate_missing expects a complete dataset")
    if not (0 <= ratio <= 0.5):
        raise DatasetError("missing ratio must lie in [0, 0.5]")
    n, l = dataset.n_instances, dataset.n_views
    n_absent = int(np.floor(ratio * n))
    if n_absent == 0:
        return dataset
    rng = np.random.default_rng(seed)
    presence = np.ones((n, l), dtype=int)
    for v in range(l):
        absent = rng.choice(n, size=n_absent, replace=False)
        presence[absent, v] = 0
    for _ in range(max_attempts):
        lost = np.flatnonzero(presence.sum(axis=1) == 0)
        if lost.size == 0:
            return MultiViewDataset(
                dataset.views, presence, dataset.labels, dataset.feature_names
            )
        i = lost[0]
        v = int(rng.integers(l))
        donors = np.flatnonzero((presence[:, v] == 1) & (presence.sum(axis=1) >= 2))
        if donors.size == 0:
            continue
        j = int(donors[rng.integers(donors.size)])
        presence[i, v] = 1
        presence[j, v] = 0
    raise DatasetError(
        f"could not satisfy the at-least-one-view constraint after "
        f"{max_attempts} repair steps (ratio={ratio})"
    )


def impute_missing(dataset: MultiViewDataset) -> list:
    """Replace absent columns of each view by the per-feature mean over present ones."""
    out = []
    for v, x in enumerate(dataset.views):
        col = dataset.presence[:, v]
        present = col == 1
        filled = x.copy()
        if not np.all(present):
            means = x[:, present].mean(axis=1)
            filled[:, ~present] = means[:, None]
        out.append(filled)
    return out


def generate_synthetic(spec: SyntheticSpec):
    """Generate a labeled complete dataset with planted discriminative features.

    Informative features get cluster-dependent nonnegative means; the rest are
    cluster-independent noise scaled by noise_scale. Returns the dataset and,
    per view, the indices of the planted informative features.
    """
    rng = np.random.default_rng(spec.seed)
    n, c = spec.n_instances, spec.n_clusters
    labels = rng.permutation(np.arange(n) % c)
    views = []
    planted = []
    for d, m in zip(spec.features, spec.informative):
        x = spec.noise_scale * rng.uniform(0.0, 1.0, size=(d, n))
        idx = rng.choice(d, size=m, replace=False)
        idx.sort()
        means = rng.uniform(1.0, 3.0, size=(m, c))
        x[idx, :] += means[:, labels]
        views.append(x)
        planted.append(idx)
    dataset = MultiViewDataset(
        tuple(views), np.ones((n, spec.n_views), dtype=int), labels
    )
    return dataset, planted


# --- dataset directory format ------------------------------------------------
#
# manifest.txt lines (order free, '#' comments allowed):
#   views <l>
#   view <matrix-file> <d_v> <N>      (one line per view, in view order)
#   labels <file>                     (optional; one integer per line)
#   mask <file>                       (optional; N lines of l space-separated 0/1)
# Matrix files are dense text: one feature (row) per line, N columns.

MANIFEST_NAME = "manifest.txt"


def write_matrix(path: str, matrix: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(matrix), fmt="%.12g")


def read_matrix(path: str) -> np.ndarray:
    try:
        return np.atleast_2d(np.loadtxt(path, dtype=float))
    except ValueError as exc:
        raise DatasetError(f"malformed matrix file {path}: {exc}") from exc


def save_dataset(dataset: MultiViewDataset, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    lines = [f"views {dataset.n_views}"]
    for v, x in enumerate(dataset.views):
        name = f"view_{v}.txt"
        write_matrix(os.path.join(directory, name), x)
        lines.append(f"view {name} {x.shape[0]} {x.shape[1]}")
    if dataset.labels is not None:
        np.savetxt(os.path.join(directory, "labels.txt"), dataset.labels, fmt="%d")
        lines.append("labels labels.txt")
    if not dataset.is_complete:
        np.savetxt(os.path.join(directory, "mask.txt"), dataset.presence, fmt="%d")
        lines.append("mask mask.txt")
    with open(os.path.join(directory, MANIFEST_NAME), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(directory: str) -> MultiViewDataset:
    """Load a dataset directory; the manifest is authoritative about which files count."""
    manifest = os.path.join(directory, MANIFEST_NAME)
    if not os.path.isfile(manifest):
        raise DatasetError(f"no {MANIFEST_NAME} in {directory}")
    declared_views = None
    view_entries = []
    labels_path = None
    mask_path = None
    with open(manifest) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            key = parts[0]
            if key == "views":
                declared_views = int(parts[1])
            elif key == "view":
                if len(parts) != 4:
                    raise DatasetError(f"manifest line {lineno}: expected "
                                       "'view <file> <d> <N>'")
                view_entries.append((parts[1], int(parts[2]), int(parts[3])))
            elif key == "labels":
                labels_path = parts[1]
            elif key == "mask":
                mask_path = parts[1]
            else:
                raise DatasetError(f"manifest line {lineno}: unknown key '{key}'")
    if declared_views is None:
        raise DatasetError("manifest missing 'views' line")
    if len(view_entries) != declared_views:
        raise DatasetError(
            f"manifest declares {declared_views} views but lists "
            f"{len(view_entries)} view lines"
        )
    views = []
    for name, d, n in view_entries:
        x = read_matrix(os.path.join(directory, name))
        if x.shape != (d, n):
            raise DatasetError(
                f"view file {name} has shape {x.shape}, manifest says ({d}, {n})"
            )
        if np.any(x < 0):
            raise DatasetError(f"negative entry in view file {name}")
        views.append(x)
    n = views[0].shape[1]
    labels = None
    if labels_path is not None:
        labels = np.loadtxt(os.path.join(directory, labels_path), dtype=int, ndmin=1)
    if mask_path is not None:
        presence = np.loadtxt(os.path.join(directory, mask_path), dtype=int, ndmin=2)
    else:
        presence = np.ones((n, len(views)), dtype=int)
    return MultiViewDataset(tuple(views), presence, labels)
