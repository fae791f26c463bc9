"""Induced-copy search for small pattern graphs.

The core is a bitset backtracking search.  For prime patterns (no
nontrivial module, which covers P4, P5, the house and C5) on larger hosts
the search first descends the host's modular decomposition: a copy of a
prime pattern either lies inside one maximal strong module or meets each
of them in at most one vertex, so only the quotient graphs need the
exhaustive search.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .graph import (
    Graph,
    anticomponents,
    bits,
    complement,
    components,
    lowest,
    mask_of,
    popcount,
)

MAX_PATTERN = 8

#: Hosts at or below this size skip the decomposition and backtrack directly.
DIRECT_SEARCH_LIMIT = 16


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


P4 = path(4)
P5 = path(5)
HOUSE = complement(P5)
C5 = cycle(5)

PATTERNS = {"p4": P4, "p5": P5, "house": HOUSE, "c5": C5}


@lru_cache(maxsize=64)
def is_prime_pattern(h: Graph) -> bool:
    """True if ``h`` has at least 4 vertices and no nontrivial module."""
    if h.n < 4:
        return False
    everything = h.full
    for size in range(2, h.n):
        for subset in combinations(range(h.n), size):
            m = mask_of(subset)
            outside = everything & ~m
            splits = False
            for z in bits(outside):
                hit = h.adj[z] & m
                if hit and hit != m:
                    splits = True
                    break
            if not splits:
                return False
    return True


def _order_pattern(h: Graph) -> list[int]:
    order: list[int] = []
    placed = 0
    remaining = set(range(h.n))
    while remaining:
        nxt = max(
            remaining,
            key=lambda p: (popcount(h.adj[p] & placed), h.degree(p), -p),
        )
        order.append(nxt)
        placed |= 1 << nxt
        remaining.discard(nxt)
    return order


def _backtrack(g: Graph, h: Graph, within: int) -> dict[int, int] | None:
    k = h.n
    if k == 0:
        return {}
    if popcount(within) < k:
        return None
    order = _order_pattern(h)
    size = popcount(within)
    deg = {v: popcount(g.adj[v] & within) for v in bits(within)}
    base = []
    for p in range(k):
        need_deg = h.degree(p)
        need_codeg = k - 1 - need_deg
        m = 0
        for v, dv in deg.items():
            if dv >= need_deg and size - 1 - dv >= need_codeg:
                m |= 1 << v
        base.append(m)
    # candidate order for the first pattern vertex: degree-descending
    first = order[0]
    first_candidates = sorted(bits(base[first]), key=lambda v: (-deg[v], v))
    adj = g.adj
    hadj = h.adj
    phi = [-1] * k

    def domain(p: int, used: int) -> int:
        d = base[p] & ~used
        row = hadj[p]
        for q in range(k):
            if phi[q] < 0:
                continue
            if row >> q & 1:
                d &= adj[phi[q]]
            else:
                d &= ~adj[phi[q]]
            if not d:
                return 0
        return d

    def extend(depth: int, used: int) -> bool:
        if depth == k:
            return True
        p = order[depth]
        cand = domain(p, used)
        for v in bits(cand):
            phi[p] = v
            nused = used | (1 << v)
            ok = True
            for q in order[depth + 1:]:
                if not domain(q, nused):
                    ok = False
                    break
            if ok and extend(depth + 1, nused):
                return True
            phi[p] = -1
        return False

    for v in first_candidates:
        phi[first] = v
        used = 1 << v
        if all(domain(q, used) for q in order[1:]) and extend(1, used):
            return {p: phi[p] for p in range(k)}
        phi[first] = -1
    return None


def _closure(g: Graph, v: int, u: int, within: int, far: int) -> int | None:
    """Smallest module of ``g[within]`` containing ``v`` and ``u``.

    Returns None as soon as the module is known to be all of ``within``
    (it reached everything, or swallowed a vertex already known to be far
    from ``v``).
    """
    adj = g.adj
    m = (1 << v) | (1 << u)
    union = (adj[v] | adj[u]) & within
    inter = adj[v] & adj[u] & within
    while True:
        split = union & ~inter & ~m
        if not split:
            return m
        if split & far:
            return None
        m |= split
        if m == within:
            return None
        for z in bits(split):
            union |= adj[z] & within
            inter &= adj[z]


def maximal_modules(g: Graph, within: int) -> list[int]:
    """Maximal strong modules of ``g[within]``, assumed connected and anticonnected."""
    mods = []
    assigned = 0
    remaining = within
    while remaining:
        v = lowest(remaining)
        near = 1 << v
        far = assigned
        for u in bits(remaining & ~near):
            if (near | far) >> u & 1:
                continue
            m = _closure(g, v, u, within, far)
            if m is None:
                far |= 1 << u
            else:
                near |= m
        mods.append(near)
        assigned |= near
        remaining &= ~near
    return mods


def _decomposed_search(g: Graph, h: Graph, within: int) -> dict[int, int] | None:
    k = h.n
    stack = [within]
    while stack:
        w = stack.pop()
        size = popcount(w)
        if size < k:
            continue
        if size <= DIRECT_SEARCH_LIMIT:
            found = _backtrack(g, h, w)
            if found is not None:
                return found
            continue
        parts = components(g, w)
        if len(parts) == 1:
            parts = anticomponents(g, w)
        if len(parts) == 1:
            parts = maximal_modules(g, w)
            reps = mask_of(lowest(m) for m in parts)
            found = _backtrack(g, h, reps)
            if found is not None:
                return found
            if len(parts) == size:
                continue
        stack.extend(reversed([m for m in parts if popcount(m) >= k]))
    return None


def find_induced_copy(g: Graph, h: Graph, within: int | None = None) -> dict[int, int] | None:
    """An induced copy of ``h`` in ``g[within]`` as a map pattern vertex -> host vertex.

    Returns None when no copy exists; the search is exhaustive.
    """
    if h.n > MAX_PATTERN:
        raise ValueError(f"patterns are limited to {MAX_PATTERN} vertices")
    w = g.full if within is None else within
    if h.n == 0:
        return {}
    if popcount(w) > DIRECT_SEARCH_LIMIT and is_prime_pattern(h):
        return _decomposed_search(g, h, w)
    return _backtrack(g, h, w)


def is_copy(g: Graph, h: Graph, phi: dict[int, int]) -> bool:
    """Check that ``phi`` is an injective, edge- and non-edge-preserving map."""
    if sorted(phi) != list(range(h.n)):
        return False
    if len(set(phi.values())) != h.n:
        return False
    for p in range(h.n):
        for q in range(p + 1, h.n):
            if h.has_edge(p, q) != g.has_edge(phi[p], phi[q]):
                return False
    return True


def is_free(g: Graph, h: Graph, within: int | None = None) -> bool:
    return find_induced_copy(g, h, within) is None


def is_cograph(g: Graph, within: int | None = None) -> bool:
    return is_free(g, P4, within)
