"""Dense symmetric graphs and the density/degree quantities built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .errors import InvalidArgumentError

# An ordered, duplicate-free array of vertex indices.
VertexClass = np.ndarray


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected graph stored as a dense ``n x n`` weight matrix.

    Every matrix the codec handles (the input G, the ground truth GT, the
    reconstructions SZE/FSZE/UFSZE) is carried by this type, so the same
    invariants hold everywhere: the matrix is symmetric, has a zero diagonal
    and all weights lie in ``[0, 1]``. Unweighted graphs use 0/1 entries.

    Parameters
    ----------
    weights : array-like of shape (n, n)
        Edge weights. The array is copied and frozen.

    Raises
    ------
    InvalidArgumentError
        If the matrix is not square, not symmetric, has a non-zero diagonal
        or entries outside ``[0, 1]``.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvalidArgumentError(
                f"weights must be a square matrix, got shape {w.shape}."
            )
        if not np.all(np.isfinite(w)):
            raise InvalidArgumentError("weights must be finite.")
        if w.size and (w.min() < 0.0 or w.max() > 1.0):
            raise InvalidArgumentError("weights must lie in [0, 1].")
        if np.any(np.diagonal(w) != 0.0):
            raise InvalidArgumentError("weights must have a zero diagonal (no loops).")
        if not np.array_equal(w, w.T):
            raise InvalidArgumentError("weights must be symmetric (undirected graph).")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def is_weighted(self) -> bool:
        """True when some weight is neither 0 nor 1."""
        w = self.weights
        return bool(np.any((w != 0.0) & (w != 1.0)))

    def density(self) -> float:
        """Total weight over ``n**2`` (ordered pairs, diagonal included)."""
        if self.n == 0:
            return 0.0
        return float(self.weights.sum() / self.n**2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n)))

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Sequence[float] | None = None,
    ) -> "Graph":
        """Build a graph from an iterable of ``(u, v)`` pairs on vertices ``0..n-1``."""
        w = np.zeros((n, n))
        edges = list(edges)
        values = [1.0] * len(edges) if weights is None else list(weights)
        if len(values) != len(edges):
            raise InvalidArgumentError("weights must have one entry per edge.")
        for (u, v), value in zip(edges, values):
            if u == v:
                raise InvalidArgumentError(f"self-loop on vertex {u} is not allowed.")
            w[u, v] = w[v, u] = value
        return cls(w)


def as_class(members: ArrayLike, n: int | None = None) -> VertexClass:
    """Validate ``members`` as a vertex class and return it as an int array."""
    arr = np.asarray(members, dtype=np.int64).reshape(-1)
    if np.unique(arr).size != arr.size:
        raise InvalidArgumentError("vertex class contains duplicate vertices.")
    if arr.size and arr.min() < 0:
        raise InvalidArgumentError("vertex indices must be non-negative.")
    if n is not None and arr.size and arr.max() >= n:
        raise InvalidArgumentError(
            f"vertex {int(arr.max())} is out of range for a graph of {n} vertices."
        )
    return arr


def _disjoint(x: VertexClass, y: VertexClass) -> bool:
    return np.intersect1d(x, y).size == 0


def pair_density(g: Graph, x: ArrayLike, y: ArrayLike) -> float:
    """
    Edge density ``e(X, Y) / (|X| |Y|)`` of two disjoint classes.

    For weighted graphs ``e(X, Y)`` is the sum of cross weights.
    """
    x, y = as_class(x, g.n), as_class(y, g.n)
    if x.size == 0 or y.size == 0:
        raise InvalidArgumentError("pair_density needs two non-empty classes.")
    if not _disjoint(x, y):
        raise InvalidArgumentError("pair_density needs disjoint classes.")
    return float(g.weights[np.ix_(x, y)].sum() / (x.size * y.size))


def internal_density(g: Graph, c: ArrayLike) -> float:
    """
    Internal density ``e(C, C) / |C|**2``.

    ``e(C, C)`` counts ordered vertex pairs, i.e. twice the undirected weight
    inside the class, so a complete class reaches ``1 - 1/|C|``.
    """
    c = as_class(c, g.n)
    if c.size == 0:
        raise InvalidArgumentError("internal_density needs a non-empty class.")
    return float(g.weights[np.ix_(c, c)].sum() / c.size**2)


def indegree_within(g: Graph, v: int, c: ArrayLike) -> float:
    """Sum of weights from ``v`` to the other members of its class ``c``."""
    c = as_class(c, g.n)
    if v not in c:
        raise InvalidArgumentError(f"vertex {v} is not a member of the class.")
    return float(g.weights[v, c].sum())


def indegrees(g: Graph, c: VertexClass) -> np.ndarray:
    """Indegree of every member of ``c``, in the order of ``c``."""
    return g.weights[np.ix_(c, c)].sum(axis=1)


def density_matrix(g: Graph, classes: Sequence[VertexClass]) -> np.ndarray:
    """
    All class densities at once.

    Returns a ``k x k`` matrix whose off-diagonal entry ``(s, t)`` is
    ``pair_density(g, C_s, C_t)`` and whose diagonal holds the internal
    densities.
    """
    k = len(classes)
    if k == 0:
        return np.zeros((0, 0))
    indicator = np.zeros((k, g.n))
    for s, members in enumerate(classes):
        indicator[s, members] = 1.0
    sums = indicator @ g.weights @ indicator.T
    sums = (sums + sums.T) / 2
    sizes = np.array([len(members) for members in classes], dtype=np.float64)
    if np.any(sizes == 0):
        raise InvalidArgumentError("density_matrix needs non-empty classes.")
    return sums / np.outer(sizes, sizes)


__all__ = [
    "Graph",
    "VertexClass",
    "as_class",
    "pair_density",
    "internal_density",
    "indegree_within",
    "indegrees",
    "density_matrix",
]
