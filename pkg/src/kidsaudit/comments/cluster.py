"""Cosine k-means over comment vectors, with model selection.

The number of clusters is chosen by maximizing a summarization score:
the minimum pairwise cosine distance between cluster centers times the
number of compact clusters, where a cluster is compact when at least
30% of its members have a silhouette score above the cluster's mean
silhouette.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import KTooLarge, NoValidK
from .vectors import DocVector, to_matrix

MAX_ITER = 100
N_INIT = 4
COMPACT_FRACTION = 0.3
DEFAULT_K_GRID = tuple(range(5, 101, 5))


@dataclass
class ClusterModel:
    k: int
    centers: np.ndarray      # (k, d), unit rows
    assignment: np.ndarray   # (n,), cluster id per vector
    silhouette: np.ndarray   # (n,), cosine silhouette per vector
    vectors: np.ndarray      # (n, d), unit rows


def _as_matrix(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        mat = np.asarray(vectors, dtype=float)
    else:
        if vectors and isinstance(vectors[0], DocVector):
            mat, _ = to_matrix(vectors)
        else:
            mat = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return mat / norms


def _kmeans_pp_init(mat: np.ndarray, k: int, rng: np.random.Generator,
                    ) -> np.ndarray:
    """k-means++ seeding under cosine distance."""
    n = mat.shape[0]
    centers = np.empty((k, mat.shape[1]))
    idx = rng.integers(n)
    centers[0] = mat[idx]
    dist = np.clip(1.0 - mat @ centers[0], 0.0, None)
    for i in range(1, k):
        weights = dist * dist
        total = weights.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=weights / total)
        centers[i] = mat[idx]
        dist = np.minimum(dist, np.clip(1.0 - mat @ centers[i], 0.0, None))
    return centers


def _normalize_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return mat / norms


def cosine_silhouette(mat: np.ndarray, assignment: np.ndarray) -> np.ndarray:
    """Per-point silhouette under cosine distance.

    Members of singleton clusters score 0 by convention.
    """
    n = mat.shape[0]
    dist = np.clip(1.0 - mat @ mat.T, 0.0, None)
    labels = np.unique(assignment)
    scores = np.zeros(n)
    # mean distance from every point to every cluster
    means = np.empty((n, len(labels)))
    sizes = np.empty(len(labels), dtype=int)
    for j, lab in enumerate(labels):
        mask = assignment == lab
        sizes[j] = mask.sum()
        means[:, j] = dist[:, mask].sum(axis=1)
    for i in range(n):
        own = int(np.searchsorted(labels, assignment[i]))
        if sizes[own] <= 1:
            continue  # singleton: 0
        a = means[i, own] / (sizes[own] - 1)  # exclude self (dist 0)
        b = np.inf
        for j in range(len(labels)):
            if j != own:
                b = min(b, means[i, j] / sizes[j])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return scores


def _run_kmeans(mat: np.ndarray, k: int, rng: np.random.Generator,
                ) -> tuple[np.ndarray, np.ndarray]:
    """One k-means run from a fresh k-means++ seeding."""
    n = mat.shape[0]
    centers = _kmeans_pp_init(mat, k, rng)
    assignment = np.full(n, -1, dtype=int)
    for _ in range(MAX_ITER):
        sims = mat @ centers.T
        new_assignment = np.argmax(sims, axis=1)
        # re-seed empty clusters from the worst-fitting point
        for cid in range(k):
            if not np.any(new_assignment == cid):
                own_sim = sims[np.arange(n), new_assignment]
                farthest = int(np.argmin(own_sim))
                new_assignment[farthest] = cid
                sims[farthest, :] = -1.0
                sims[farthest, cid] = 1.0
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for cid in range(k):
            members = mat[assignment == cid]
            if len(members):
                centers[cid] = members.mean(axis=0)
        centers = _normalize_rows(centers)
    return centers, assignment


def cluster(vectors, k: int, seed: int = 0) -> ClusterModel:
    """Cosine k-means: assign to nearest center, recompute and
    renormalize centers, until the assignment stops changing.

    Deterministic for a given seed.  Empty clusters are re-seeded from
    the point farthest from its center.  Raises KTooLarge when k
    exceeds the number of distinct vectors.
    """
    mat = _as_matrix(vectors)
    n = mat.shape[0]
    if k < 2:
        raise ValueError("k must be >= 2")
    n_distinct = np.unique(mat, axis=0).shape[0]
    if k > n_distinct:
        raise KTooLarge(f"k={k} > {n_distinct} distinct vectors")

    rng = np.random.default_rng(seed)
    best = None
    best_cohesion = -np.inf
    for _ in range(N_INIT):
        centers, assignment = _run_kmeans(mat, k, rng)
        cohesion = float(
            (mat * centers[assignment]).sum())  # total sim to own center
        if cohesion > best_cohesion:
            best_cohesion = cohesion
            best = (centers, assignment)
    centers, assignment = best

    sil = cosine_silhouette(mat, assignment)
    return ClusterModel(k=k, centers=centers, assignment=assignment,
                        silhouette=sil, vectors=mat)


def summarization_metric(model: ClusterModel) -> float:
    """Minimum pairwise cosine distance between centers, times the
    number of compact clusters.  0 for fewer than two clusters."""
    if model.k < 2:
        return 0.0
    sims = model.centers @ model.centers.T
    dist = np.clip(1.0 - sims, 0.0, None)
    iu = np.triu_indices(model.k, k=1)
    min_dist = float(dist[iu].min())

    compact = 0
    for cid in range(model.k):
        sil = model.silhouette[model.assignment == cid]
        if len(sil) == 0:
            continue
        above = np.count_nonzero(sil > sil.mean())
        if above >= COMPACT_FRACTION * len(sil):
            compact += 1
    return min_dist * compact


def select_k(vectors, grid=DEFAULT_K_GRID, seed: int = 0) -> int:
    """Pick k from the grid by maximizing the summarization score.

    Grid values larger than the number of distinct vectors (or below
    2) are skipped; ties break toward the smaller k.  Raises NoValidK
    when no grid value is usable.
    """
    mat = _as_matrix(vectors)
    n_distinct = np.unique(mat, axis=0).shape[0]
    valid = [k for k in sorted(grid) if 2 <= k <= n_distinct]
    if not valid:
        raise NoValidK(f"no k in grid fits {n_distinct} distinct vectors")
    best_k = None
    best_score = -np.inf
    for k in valid:
        score = summarization_metric(cluster(mat, k, seed))
        if score > best_score:
            best_score = score
            best_k = k
    return best_k


def representatives(model: ClusterModel, n: int = 20,
                    ) -> dict[int, list[int]]:
    """Per cluster, indices of the n most representative members:
    highest silhouette first, ties broken by distance to center."""
    center_dist = np.clip(
        1.0 - np.einsum("ij,ij->i", model.vectors,
                        model.centers[model.assignment]),
        0.0, None)
    out: dict[int, list[int]] = {}
    for cid in range(model.k):
        members = np.flatnonzero(model.assignment == cid)
        ranked = sorted(members,
                        key=lambda i: (-model.silhouette[i], center_dist[i], i))
        out[cid] = [int(i) for i in ranked[:n]]
    return out
