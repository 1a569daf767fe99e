"""Brute-force k-nearest-neighbour classification on projected coordinates."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import ParameterError

DEFAULT_K = 6
# bound on query_chunk * n_train distance entries held at once
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class KnnModel:
    points: np.ndarray
    labels: tuple
    k: int

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def knn_fit(train_coords, train_labels: Sequence[Hashable], k: int = DEFAULT_K) -> KnnModel:
    """Store the training set. ``train_coords`` is (n, d), one point per row."""
    X = np.array(train_coords, dtype=np.float64)
    labels = tuple(train_labels)
    if X.size == 0:
        raise ParameterError("training set is empty")
    if X.ndim != 2:
        raise ParameterError(f"training coordinates must be 2-D (n, d), got shape {X.shape}")
    if X.shape[0] != len(labels):
        raise ParameterError(f"{X.shape[0]} points but {len(labels)} labels")
    if int(k) != k or k < 1:
        raise ParameterError(f"k must be a positive integer, got {k}")
    if k > X.shape[0]:
        raise ParameterError(f"k={k} exceeds the {X.shape[0]} training points")
    X.setflags(write=False)
    return KnnModel(X, labels, int(k))


def _vote(labels, dists):
    """Majority vote; ties go to the smallest summed distance, then the smallest label."""
    counts = defaultdict(int)
    summed = defaultdict(float)
    for lab, dist in zip(labels, dists):
        counts[lab] += 1
        summed[lab] += dist
    return min(counts, key=lambda lab: (-counts[lab], summed[lab], str(lab)))


def _distances(model, Q):
    # direct differences rather than the |a|^2 + |b|^2 - 2ab expansion:
    # exact zeros for coincident points and no cancellation near ties
    diff = Q[:, None, :] - model.points[None, :, :]
    return np.sqrt(np.einsum("qnd,qnd->qn", diff, diff))


def knn_predict_many(model: KnnModel, queries) -> list:
    Q = np.asarray(queries, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[1] != model.dimension:
        raise ParameterError(f"queries must have shape (n, {model.dimension}), got {Q.shape}")
    n_train = len(model)
    chunk = max(1, _CHUNK_CELLS // max(1, n_train * model.dimension))
    out = []
    for start in range(0, Q.shape[0], chunk):
        D = _distances(model, Q[start:start + chunk])
        # stable sort: equal distances keep insertion order
        nearest = np.argsort(D, axis=1, kind="stable")[:, : model.k]
        for row, idx in zip(D, nearest):
            out.append(_vote([model.labels[i] for i in idx], row[idx]))
    return out


def knn_predict(model: KnnModel, query):
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != model.dimension:
        raise ParameterError(f"query must be a vector of length {model.dimension}, got shape {q.shape}")
    return knn_predict_many(model, q[None, :])[0]
