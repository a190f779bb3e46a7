"""Matrix dissimilarities and the KVS clustering check."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike
from sklearn.metrics import adjusted_rand_score, pair_confusion_matrix

from .errors import InvalidArgumentError
from .graph import Graph

KVS_NEIGHBOURS = (5, 7, 9)


@dataclass(frozen=True)
class MeasureReport:
    """Metrics and timings of one codec run."""

    l1: float
    l2: float
    sze_index: float
    eps: float
    k_classes: int
    irregular_count: int
    t_compress: float
    t_decompress: float
    t_filter: float
    kvs_ari: Optional[float] = None
    kvs_k: Optional[int] = None
    l1_sze: Optional[float] = None
    l2_sze: Optional[float] = None

    def as_row(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ContingencyCounts:
    """Unordered vertex pairs grouped together (``a``) and apart (``b``) in both labelings."""

    a: int
    b: int
    total_pairs: int

    @property
    def rand_index(self) -> float:
        return (self.a + self.b) / self.total_pairs


def _matrix(m: Graph | ArrayLike) -> np.ndarray:
    return m.weights if isinstance(m, Graph) else np.asarray(m, dtype=np.float64)


def _same_shape(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = _matrix(a), _matrix(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(
            f"matrices must be square and of equal size, got {a.shape} and {b.shape}."
        )
    if a.shape[0] == 0:
        raise InvalidArgumentError("matrices must be non-empty.")
    return a, b


def l2_dist(a: Graph | ArrayLike, b: Graph | ArrayLike) -> float:
    """Frobenius norm of ``a - b`` divided by ``n``."""
    a, b = _same_shape(a, b)
    return float(np.linalg.norm(a - b) / a.shape[0])


def l1_dist(a: Graph | ArrayLike, b: Graph | ArrayLike) -> float:
    """Mean absolute entry difference, ``Σ|a - b| / n²``."""
    a, b = _same_shape(a, b)
    return float(np.abs(a - b).sum() / a.shape[0] ** 2)


def l2_reconstruction_error(a: Graph | ArrayLike, b: Graph | ArrayLike) -> float:
    """``l2_dist`` scaled back by ``n``: the Frobenius norm of ``a - b``."""
    return l2_dist(a, b) * _matrix(a).shape[0]


def _labels(labels: ArrayLike) -> np.ndarray:
    return np.asarray(labels).reshape(-1)


def kvs_predict(m: Graph | ArrayLike, labels: ArrayLike, k: int) -> np.ndarray:
    """
    Predict each vertex's label from the labels of its ``k`` heaviest columns.

    Row ``i`` ignores its own column. Equal values are ranked by ascending
    column index, and a tied vote goes to the label met first in that
    ranking.
    """
    m = _matrix(m)
    labels = _labels(labels)
    n = m.shape[0]
    if labels.size != n:
        raise InvalidArgumentError("labels must have one entry per vertex.")
    if k % 2 == 0:
        raise InvalidArgumentError("k must be odd.")
    if not 1 <= k <= n - 1:
        raise InvalidArgumentError(f"k must lie in [1, n - 1], got {k}.")

    values = m.astype(np.float64, copy=True)
    np.fill_diagonal(values, -np.inf)
    neighbours = np.argsort(-values, axis=1, kind="stable")[:, :k]
    votes = labels[neighbours]
    counts = (votes[:, :, None] == votes[:, None, :]).sum(axis=2)
    winner = np.argmax(counts, axis=1)
    return votes[np.arange(n), winner]


def ari(truth: ArrayLike, predicted: ArrayLike) -> float:
    truth, predicted = _labels(truth), _labels(predicted)
    if truth.size != predicted.size:
        raise InvalidArgumentError(
            f"label vectors differ in length ({truth.size} and {predicted.size})."
        )
    if truth.size < 2:
        raise InvalidArgumentError("ari needs at least two labelled vertices.")
    return float(adjusted_rand_score(truth, predicted))


def contingency_counts(truth: ArrayLike, predicted: ArrayLike) -> ContingencyCounts:
    truth, predicted = _labels(truth), _labels(predicted)
    if truth.size != predicted.size:
        raise InvalidArgumentError("label vectors differ in length.")
    ordered = pair_confusion_matrix(truth, predicted)
    n = truth.size
    return ContingencyCounts(
        a=int(ordered[1, 1] // 2),
        b=int(ordered[0, 0] // 2),
        total_pairs=n * (n - 1) // 2,
    )


def kvs_best_ari(
    m: Graph | ArrayLike,
    labels: ArrayLike,
    neighbours: Sequence[int] = KVS_NEIGHBOURS,
) -> tuple[float, int]:
    """Best ``ari`` of ``kvs_predict`` over ``neighbours``; the smallest ``k`` wins ties."""
    n = _matrix(m).shape[0]
    if n <= max(neighbours):
        raise InvalidArgumentError(f"kvs_best_ari needs more than {max(neighbours)} vertices.")
    best_score, best_k = -np.inf, neighbours[0]
    for k in neighbours:
        score = ari(labels, kvs_predict(m, labels, k))
        if score > best_score:
            best_score, best_k = score, k
    return float(best_score), int(best_k)


__all__ = [
    "MeasureReport",
    "ContingencyCounts",
    "l1_dist",
    "l2_dist",
    "l2_reconstruction_error",
    "kvs_predict",
    "ari",
    "contingency_counts",
    "kvs_best_ari",
]
