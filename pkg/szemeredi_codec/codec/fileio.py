"""Reading and writing graphs, compressed graphs and matrix snapshots.

Compressed graphs use the little-endian ``CODC`` layout::

    magic    4s   b"CODC"
    version  u16  1
    flags    u16  bit 0: internal densities, bit 1: weighted source
    n        u64
    k        u32
    eps      f64
    membership          n x u32
    red upper triangle  k(k-1)/2 x f64, row major
    internal densities  k x f64 (flag bit 0 only)
    irregular pairs     u32 count, then count x (u32, u32)
"""

from __future__ import annotations

import logging
import re
import struct
from pathlib import Path
from typing import NamedTuple, Optional

import networkx as nx
import numpy as np
import pandas as pd
from numpy.typing import ArrayLike

from .errors import FormatError, InvalidArgumentError, ParseError
from .graph import Graph
from .pipeline import CompressedGraph

logger = logging.getLogger(__name__)

MAGIC = b"CODC"
VERSION = 1
FLAG_INTERNAL = 1
FLAG_WEIGHTED = 2
_HEADER = struct.Struct("<4sHHQId")
_COUNT = struct.Struct("<I")

GRAPH_FORMATS = ("edgelist", "csv", "npy")


def encode_compressed(c: CompressedGraph) -> bytes:
    flags = (FLAG_INTERNAL if c.internal is not None else 0) | (
        FLAG_WEIGHTED if c.weighted else 0
    )
    chunks = [
        _HEADER.pack(MAGIC, VERSION, flags, c.n, c.k, c.eps),
        c.membership.astype("<u4").tobytes(),
        c.red[np.triu_indices(c.k, 1)].astype("<f8").tobytes(),
    ]
    if c.internal is not None:
        chunks.append(c.internal.astype("<f8").tobytes())
    chunks.append(_COUNT.pack(len(c.irregular_pairs)))
    chunks.append(np.asarray(c.irregular_pairs, dtype="<u4").reshape(-1, 2).tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise FormatError(
                f"truncated file: {what} needs {size} bytes at offset {self.offset}, "
                f"{len(self.data) - self.offset} left."
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        return np.frombuffer(self.take(size, what), dtype=dtype).astype(
            np.float64 if dtype.endswith("f8") else np.int64
        )


def decode_compressed(data: bytes) -> CompressedGraph:
    reader = _Reader(data)
    magic, version, flags, n, k, eps = _HEADER.unpack(reader.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise FormatError(f"magic: expected {MAGIC!r}, got {magic!r}.")
    if version != VERSION:
        raise FormatError(f"version: unsupported version {version}.")
    if flags & ~(FLAG_INTERNAL | FLAG_WEIGHTED):
        raise FormatError(f"flags: unknown bits in {flags:#06x}.")
    if not 0.0 < eps < 1.0:
        raise FormatError(f"eps: {eps} is outside (0, 1).")

    membership = reader.array("<u4", n, "membership")
    upper = reader.array("<f8", k * (k - 1) // 2, "red")
    internal = reader.array("<f8", k, "internal") if flags & FLAG_INTERNAL else None
    (count,) = _COUNT.unpack(reader.take(_COUNT.size, "irregular pair count"))
    pairs = reader.array("<u4", 2 * count, "irregular pairs").reshape(-1, 2)
    if reader.offset != len(data):
        raise FormatError(
            f"trailing data: {len(data) - reader.offset} bytes after the irregular pairs."
        )

    red = np.zeros((k, k))
    red[np.triu_indices(k, 1)] = upper
    red = red + red.T
    try:
        return CompressedGraph(
            n=n,
            k=k,
            eps=eps,
            membership=membership,
            red=red,
            internal=internal,
            irregular_pairs=tuple(map(tuple, pairs.tolist())),
            weighted=bool(flags & FLAG_WEIGHTED),
        )
    except InvalidArgumentError as err:
        raise FormatError(f"content: {err}") from err


def save_compressed(c: CompressedGraph, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(encode_compressed(c))
    logger.info("wrote %s (%d bytes)", path, path.stat().st_size)
    return path


def load_compressed(path: str | Path) -> CompressedGraph:
    return decode_compressed(Path(path).read_bytes())


class LoadedGraph(NamedTuple):
    """A graph read from disk and the original id of each vertex index."""

    graph: Graph
    ids: np.ndarray


def infer_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".npy":
        return "npy"
    return "edgelist"


def load_graph(path: str | Path, fmt: Optional[str] = None) -> LoadedGraph:
    """
    Read a graph as an edge list, a dense CSV matrix or a ``.npy`` matrix.

    Edge lists hold ``u v [weight]`` per line, ``#`` or ``%`` starting a
    comment; vertex ids are compacted to ``0..n-1`` in ascending order.
    Self-loops are dropped with a warning in every format.

    Raises
    ------
    ParseError
        Malformed text, with the offending line number.
    FormatError
        A matrix that is not a valid undirected graph.
    """
    path = Path(path)
    fmt = fmt or infer_format(path)
    if fmt not in GRAPH_FORMATS:
        raise InvalidArgumentError(f"unknown graph format {fmt!r}, use one of {GRAPH_FORMATS}.")
    if fmt == "edgelist":
        return _load_edgelist(path)
    matrix = _load_csv(path) if fmt == "csv" else np.load(path, allow_pickle=False)
    return LoadedGraph(_matrix_graph(matrix, path), np.arange(matrix.shape[0]))


def _load_edgelist(path: Path) -> LoadedGraph:
    graph = nx.Graph()
    loops = 0
    with path.open() as handle:
        for number, line in enumerate(handle, start=1):
            record = line.split("#", 1)[0].split("%", 1)[0].split()
            if not record:
                continue
            if len(record) not in (2, 3):
                raise ParseError(
                    f"expected 'u v [weight]', got {len(record)} fields", number, path
                )
            try:
                u, v = int(record[0]), int(record[1])
                weight = float(record[2]) if len(record) == 3 else 1.0
            except ValueError:
                raise ParseError(f"non-numeric token in {line.strip()!r}", number, path) from None
            if not 0.0 <= weight <= 1.0:
                raise ParseError(f"weight {weight} is outside [0, 1]", number, path)
            if u == v:
                loops += 1
                graph.add_node(u)
                continue
            graph.add_edge(u, v, weight=weight)
    if loops:
        logger.warning("%s: dropped %d self-loop(s)", path, loops)
    ids = np.array(sorted(graph.nodes), dtype=np.int64)
    weights = nx.to_numpy_array(graph, nodelist=ids.tolist(), weight="weight")
    return LoadedGraph(Graph(weights), ids)


def _load_csv(path: Path) -> np.ndarray:
    try:
        frame = pd.read_csv(path, header=None, comment="#", skip_blank_lines=True)
    except pd.errors.ParserError as err:
        match = re.search(r"line (\d+)", str(err))
        raise ParseError(
            "ragged row", int(match.group(1)) if match else None, path
        ) from err
    except pd.errors.EmptyDataError as err:
        raise ParseError("empty file", None, path) from err

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna() & frame.notna()
    if bad.to_numpy().any():
        row = int(np.flatnonzero(bad.any(axis=1).to_numpy())[0])
        raise ParseError("non-numeric token", row + 1, path)
    missing = numeric.isna()
    if missing.to_numpy().any():
        row = int(np.flatnonzero(missing.any(axis=1).to_numpy())[0])
        raise ParseError("ragged row", row + 1, path)
    return numeric.to_numpy(dtype=np.float64)


def _matrix_graph(matrix: np.ndarray, path: Path) -> Graph:
    matrix = np.array(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise FormatError(f"{path}: adjacency matrix must be square, got {matrix.shape}.")
    loops = int(np.count_nonzero(np.diagonal(matrix)))
    if loops:
        logger.warning("%s: dropped %d self-loop(s)", path, loops)
        np.fill_diagonal(matrix, 0.0)
    try:
        return Graph(matrix)
    except InvalidArgumentError as err:
        raise FormatError(f"{path}: {err}") from err


def save_matrix(m: Graph | ArrayLike, path: str | Path) -> Path:
    path = Path(path)
    values = m.weights if isinstance(m, Graph) else np.asarray(m)
    with path.open("wb") as handle:
        np.save(handle, values)
    return path


def save_ids(loaded: LoadedGraph, path: str | Path) -> Optional[Path]:
    """
    Write the ``vertex,id`` map of ``loaded`` as CSV.

    Nothing is written when the ids already are ``0..n-1``; returns the path
    written or None.
    """
    ids = np.asarray(loaded.ids)
    if np.array_equal(ids, np.arange(loaded.graph.n)):
        return None
    path = Path(path)
    pd.DataFrame({"vertex": np.arange(ids.size), "id": ids}).to_csv(path, index=False)
    logger.info("wrote %d original vertex ids to %s", ids.size, path)
    return path


def write_pgm(m: Graph | ArrayLike, path: str | Path) -> Path:
    """Write a binary (P5) grayscale image with one pixel per entry, ``round(255 w)``."""
    path = Path(path)
    values = m.weights if isinstance(m, Graph) else np.asarray(m, dtype=np.float64)
    if values.ndim != 2:
        raise InvalidArgumentError("write_pgm needs a 2-d matrix.")
    pixels = np.rint(np.clip(values, 0.0, 1.0) * 255).astype(np.uint8)
    height, width = pixels.shape
    path.write_bytes(f"P5\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes())
    return path


__all__ = [
    "MAGIC",
    "VERSION",
    "LoadedGraph",
    "encode_compressed",
    "decode_compressed",
    "save_compressed",
    "load_compressed",
    "infer_format",
    "load_graph",
    "save_matrix",
    "save_ids",
    "write_pgm",
]
