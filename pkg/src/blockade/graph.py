"""Dense bitset graphs and the exact predicates built on them.

Vertex sets are plain Python ints used as bitmasks over ``range(g.n)``;
bit ``i`` set means vertex ``i`` is in the set.  Every operation takes an
optional ``within`` mask and then behaves as if called on the induced
subgraph ``g[within]``, which avoids materialising subgraphs in the
recursive pipelines.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import PreconditionViolated

#: Hard cap on graph size; the whole package is desk-scale.
MAX_VERTICES = 4096


# ---------------------------------------------------------------------------
# bit helpers


def bits(mask: int) -> Iterator[int]:
    """Yield the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest(mask: int) -> int:
    """Index of the lowest set bit (``mask`` must be nonzero)."""
    return (mask & -mask).bit_length() - 1


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def take_lowest(mask: int, count: int) -> int:
    """The ``count`` lowest members of ``mask``."""
    out = 0
    for v in bits(mask):
        if count <= 0:
            break
        out |= 1 << v
        count -= 1
    return out


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a decimal string exactly."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(value) -> str:
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# the graph type


class Graph:
    """Undirected simple graph on ``range(n)`` with one bitmask row per vertex.

    Instances are immutable; derived views (numpy adjacency, degrees) are
    cached on first use.
    """

    def __init__(self, n: int, adj: Sequence[int], labels: Sequence[str] | None = None):
        if n < 0:
            raise ValueError("negative vertex count")
        if n > MAX_VERTICES:
            raise PreconditionViolated(f"graph has {n} vertices, cap is {MAX_VERTICES}")
        if len(adj) != n:
            raise ValueError("adjacency must have one row per vertex")
        self.n = n
        self.adj = tuple(adj)
        self.labels = tuple(labels) if labels is not None else None
        full = (1 << n) - 1
        for v, row in enumerate(self.adj):
            if row < 0 or row & ~full or row >> v & 1:
                raise ValueError(f"row {v} has a loop or an out-of-range bit")
        m = self.matrix
        if not np.array_equal(m, m.T):
            u, v = (int(i) for i in np.argwhere(m != m.T)[0])
            raise ValueError(f"adjacency not symmetric at {u},{v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {u}-{v} out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows, labels)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, [full ^ (1 << v) for v in range(n)])

    @classmethod
    def from_numpy(cls, matrix: np.ndarray) -> "Graph":
        n = matrix.shape[0]
        rows = []
        for v in range(n):
            row = 0
            for u in np.flatnonzero(matrix[v]):
                row |= 1 << int(u)
            rows.append(row)
        return cls(n, rows)

    # -- basic accessors -------------------------------------------------

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return self.n

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int, within: int | None = None) -> int:
        row = self.adj[v]
        return popcount(row if within is None else row & within)

    def edges(self) -> list[tuple[int, int]]:
        """Sorted edge list with ``u < v``."""
        us, vs = np.nonzero(np.triu(self.matrix, k=1))
        return list(zip(us.tolist(), vs.tolist()))

    def edge_count(self, within: int | None = None) -> int:
        if within is None:
            return sum(popcount(r) for r in self.adj) // 2
        return sum(popcount(self.adj[v] & within) for v in bits(within)) // 2

    @cached_property
    def matrix(self) -> np.ndarray:
        """Boolean adjacency matrix (read-only)."""
        width = (self.n + 7) // 8
        raw = b"".join(row.to_bytes(width, "little") for row in self.adj)
        packed = np.frombuffer(raw, dtype=np.uint8).reshape(self.n, width)
        m = np.unpackbits(packed, axis=1, bitorder="little")[:, : self.n].astype(bool)
        m.setflags(write=False)
        return m

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count()})"


# ---------------------------------------------------------------------------
# structural operations


def complement(g: Graph) -> Graph:
    full = g.full
    return Graph(g.n, [full & ~row & ~(1 << v) for v, row in enumerate(g.adj)], g.labels)


def induced_subgraph(g: Graph, s: int) -> tuple[Graph, list[int]]:
    """``g[s]`` relabelled onto ``range(|s|)`` plus the map new index -> old vertex."""
    order = list(bits(s))
    pos = {v: i for i, v in enumerate(order)}
    rows = []
    for v in order:
        row = 0
        for u in bits(g.adj[v] & s):
            row |= 1 << pos[u]
        rows.append(row)
    labels = [g.labels[v] for v in order] if g.labels is not None else None
    return Graph(len(order), rows, labels), order


def neighbours(g: Graph, v: int, within: int | None = None) -> int:
    row = g.adj[v]
    return row if within is None else row & within


def non_neighbours(g: Graph, v: int, within: int | None = None) -> int:
    """Vertices other than ``v`` not adjacent to ``v``."""
    base = g.full if within is None else within
    return base & ~g.adj[v] & ~(1 << v)


def common_neighbours(g: Graph, s: int, within: int | None = None) -> int:
    """Vertices (outside ``s``) adjacent to every member of ``s``."""
    out = g.full if within is None else within
    for v in bits(s):
        out &= g.adj[v]
    return out


def neighbourhood(g: Graph, s: int, within: int | None = None) -> int:
    """Vertices outside ``s`` with at least one neighbour in ``s``."""
    out = 0
    for v in bits(s):
        out |= g.adj[v]
    out &= ~s
    return out if within is None else out & within


def _components(rows: Sequence[int], within: int, flip: bool) -> list[int]:
    comps = []
    remaining = within
    while remaining:
        seed = remaining & -remaining
        comp = seed
        frontier = seed
        remaining ^= seed
        while frontier:
            reach = 0
            if flip:
                # complemented rows: a remaining vertex is reachable if some
                # frontier vertex is non-adjacent to it
                for v in bits(frontier):
                    reach |= remaining & ~rows[v]
                    if reach == remaining:
                        break
            else:
                for v in bits(frontier):
                    reach |= rows[v]
                reach &= remaining
            frontier = reach
            remaining &= ~reach
            comp |= reach
        comps.append(comp)
    return comps


def components(g: Graph, within: int | None = None) -> list[int]:
    """Connected components of ``g[within]`` ordered by lowest vertex."""
    return _components(g.adj, g.full if within is None else within, flip=False)


def anticomponents(g: Graph, within: int | None = None) -> list[int]:
    """Connected components of the complement of ``g[within]``, by lowest vertex.

    The complement is never built: a BFS step from a frontier reaches every
    remaining vertex that is non-adjacent to some frontier vertex.
    """
    return _components(g.adj, g.full if within is None else within, flip=True)


def is_connected(g: Graph, within: int | None = None) -> bool:
    return len(components(g, within)) <= 1


# ---------------------------------------------------------------------------
# counting helpers


def degrees_in(g: Graph, s: int, within: int | None = None) -> dict[int, int]:
    """Number of neighbours in ``s`` for each vertex of ``within`` (default ``s``)."""
    domain = s if within is None else within
    return {v: popcount(g.adj[v] & s) for v in bits(domain)}


def max_degree(g: Graph, within: int | None = None) -> int:
    w = g.full if within is None else within
    best = 0
    for v in bits(w):
        d = popcount(g.adj[v] & w)
        if d > best:
            best = d
    return best


def max_codegree(g: Graph, within: int | None = None) -> int:
    """Maximum degree of the complement of ``g[within]``."""
    w = g.full if within is None else within
    size = popcount(w)
    if size == 0:
        return 0
    best = 0
    for v in bits(w):
        d = size - 1 - popcount(g.adj[v] & w)
        if d > best:
            best = d
    return best


def edges_between(g: Graph, a: int, b: int) -> int:
    if popcount(a) > popcount(b):
        a, b = b, a
    return sum(popcount(g.adj[v] & b) for v in bits(a))


def is_complete_to(g: Graph, a: int, b: int) -> bool:
    for v in bits(a):
        if b & ~g.adj[v]:
            return False
    return True


def is_anticomplete_to(g: Graph, a: int, b: int) -> bool:
    for v in bits(a):
        if g.adj[v] & b:
            return False
    return True


def _require_disjoint(a: int, b: int) -> None:
    if a & b:
        raise PreconditionViolated("sets must be disjoint", witness=lowest(a & b))


# ---------------------------------------------------------------------------
# exact sparsity predicates


def is_x_sparse(g: Graph, x, within: int | None = None) -> bool:
    """Maximum degree of ``g[within]`` is at most ``x`` times its order."""
    x = as_fraction(x)
    w = g.full if within is None else within
    size = popcount(w)
    return max_degree(g, w) * x.denominator <= x.numerator * size


def is_co_sparse(g: Graph, x, within: int | None = None) -> bool:
    """The complement of ``g[within]`` is ``x``-sparse."""
    x = as_fraction(x)
    w = g.full if within is None else within
    size = popcount(w)
    return max_codegree(g, w) * x.denominator <= x.numerator * size


def is_restricted(g: Graph, eps, within: int | None = None) -> bool:
    """One of ``g[within]`` and its complement is ``eps``-sparse."""
    return is_x_sparse(g, eps, within) or is_co_sparse(g, eps, within)


def sparsity_of(g: Graph, within: int | None = None) -> Fraction:
    """Smallest ``x`` for which ``g[within]`` is ``x``-sparse."""
    w = g.full if within is None else within
    size = popcount(w)
    return Fraction(max_degree(g, w), size) if size else Fraction(0)


def co_sparsity_of(g: Graph, within: int | None = None) -> Fraction:
    w = g.full if within is None else within
    size = popcount(w)
    return Fraction(max_codegree(g, w), size) if size else Fraction(0)


def is_sparse_to(g: Graph, b: int, a: int, x) -> bool:
    """Every vertex of ``b`` has at most ``x*|a|`` neighbours in ``a``."""
    _require_disjoint(a, b)
    x = as_fraction(x)
    bound = x.numerator * popcount(a)
    for v in bits(b):
        if popcount(g.adj[v] & a) * x.denominator > bound:
            return False
    return True


def sparse_to_ratio(g: Graph, b: int, a: int) -> Fraction:
    """Smallest ``x`` with ``b`` x-sparse to ``a`` (``a`` nonempty)."""
    size = popcount(a)
    worst = max((popcount(g.adj[v] & a) for v in bits(b)), default=0)
    return Fraction(worst, size)


def is_weakly_sparse(g: Graph, a: int, b: int, x) -> bool:
    """Edge density between the nonempty disjoint sets ``a``, ``b`` is at most ``x``."""
    _require_disjoint(a, b)
    if not a or not b:
        raise PreconditionViolated("weak sparsity needs nonempty sets")
    x = as_fraction(x)
    return edges_between(g, a, b) * x.denominator <= x.numerator * popcount(a) * popcount(b)


def density(g: Graph, a: int, b: int) -> Fraction:
    return Fraction(edges_between(g, a, b), popcount(a) * popcount(b))


def is_mixed_on(g: Graph, v: int, s: int) -> bool:
    """``v`` (outside ``s``) has both a neighbour and a non-neighbour in ``s``."""
    if s >> v & 1:
        raise PreconditionViolated("vertex must lie outside the set", witness=v)
    hit = g.adj[v] & s
    return bool(hit) and hit != s


def is_clique(g: Graph, s: int) -> bool:
    for v in bits(s):
        if (s & ~(1 << v)) & ~g.adj[v]:
            return False
    return True


def is_stable(g: Graph, s: int) -> bool:
    for v in bits(s):
        if g.adj[v] & s:
            return False
    return True


def sparse_core(g: Graph, x, within: int | None = None) -> int:
    """Peel maximum-degree vertices until the remainder is ``x``-sparse.

    Ties go to the lowest index.  The result may be empty only if
    ``within`` is.
    """
    x = as_fraction(x)
    w = g.full if within is None else within
    order = list(bits(w))
    if not order:
        return 0
    sub = g.matrix[np.ix_(order, order)]
    deg = sub.sum(axis=1).astype(np.int64)
    alive = np.ones(len(order), dtype=bool)
    size = len(order)
    num, den = x.numerator, x.denominator
    while size:
        masked = np.where(alive, deg, -1)
        i = int(np.argmax(masked))
        if int(masked[i]) * den <= num * size:
            break
        alive[i] = False
        deg -= sub[i]
        size -= 1
    return mask_of(order[i] for i in np.flatnonzero(alive))


def co_sparse_core(g: Graph, x, within: int | None = None) -> int:
    """Like :func:`sparse_core` but for the complement of ``g[within]``."""
    x = as_fraction(x)
    w = g.full if within is None else within
    order = list(bits(w))
    if not order:
        return 0
    sub = g.matrix[np.ix_(order, order)]
    size = len(order)
    codeg = (size - 1 - sub.sum(axis=1)).astype(np.int64)
    alive = np.ones(size, dtype=bool)
    num, den = x.numerator, x.denominator
    while size:
        masked = np.where(alive, codeg, -1)
        i = int(np.argmax(masked))
        if int(masked[i]) * den <= num * size:
            break
        alive[i] = False
        # the removed vertex was a non-neighbour of everyone it is not adjacent to
        nonadj = ~sub[i]
        nonadj[i] = False
        codeg -= nonadj
        size -= 1
    return mask_of(order[i] for i in np.flatnonzero(alive))
