"""Catalogue of all P5-free graphs on at most six vertices, cached on disk.

The cache is a small versioned binary file: a header, then per graph one
byte for the vertex count and the upper triangle of the adjacency matrix
packed into bytes.  A missing, corrupt or out-of-date file is rebuilt.
"""

from __future__ import annotations

import os
import struct
from functools import lru_cache
from pathlib import Path

import networkx as nx
import numpy as np

from ..graph import Graph
from ..patterns import P5, find_induced_copy

MAGIC = b"BLKCAT"
VERSION = 1
MAX_ORDER = 6
CACHE_ENV = "BLOCKADE_CACHE"
_HEADER = struct.Struct("<6sHI")


def cache_path() -> Path:
    root = os.environ.get(CACHE_ENV)
    base = Path(root) if root else Path.home() / ".cache" / "blockade"
    return base / f"p5free-catalogue-v{VERSION}.bin"


def build_catalogue() -> list[Graph]:
    """All P5-free graphs on 1..6 vertices, one per isomorphism class."""
    out = []
    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if not 1 <= n <= MAX_ORDER:
            continue
        g = Graph.from_edges(n, h.edges())
        if find_induced_copy(g, P5) is None:
            out.append(g)
    return out


def _pack(g: Graph) -> bytes:
    tri = [g.has_edge(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    return bytes([g.n]) + np.packbits(np.array(tri, dtype=bool)).tobytes()


def _packed_len(n: int) -> int:
    return (n * (n - 1) // 2 + 7) // 8


def encode(graphs: list[Graph]) -> bytes:
    return _HEADER.pack(MAGIC, VERSION, len(graphs)) + b"".join(_pack(g) for g in graphs)


def decode(data: bytes) -> list[Graph]:
    magic, version, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC or version != VERSION:
        raise ValueError("catalogue cache has the wrong magic or version")
    pos = _HEADER.size
    out = []
    for _ in range(count):
        n = data[pos]
        size = _packed_len(n)
        chunk = np.frombuffer(data[pos + 1:pos + 1 + size], dtype=np.uint8)
        if len(chunk) != size:
            raise ValueError("catalogue cache is truncated")
        tri = np.unpackbits(chunk)[: n * (n - 1) // 2]
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        out.append(Graph.from_edges(n, [p for p, bit in zip(pairs, tri) if bit]))
        pos += 1 + size
    if pos != len(data):
        raise ValueError("catalogue cache has trailing bytes")
    return out


@lru_cache(maxsize=1)
def load_catalogue() -> tuple[Graph, ...]:
    path = cache_path()
    try:
        return tuple(decode(path.read_bytes()))
    except (OSError, ValueError, struct.error, IndexError):
        pass
    graphs = build_catalogue()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(encode(graphs))
        tmp.replace(path)
    except OSError:
        pass  # read-only home: keep the in-memory copy
    return tuple(graphs)
