"""Brute-force ground truth, written independently of the library's search code."""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from ..errors import PreconditionViolated
from ..graph import Graph, as_fraction

#: Exhaustive enumeration cap.
EXHAUSTIVE_CAP = 18

#: Branch-and-bound cap.
BNB_CAP = 64


def _matrix(g: Graph) -> np.ndarray:
    m = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges():
        m[u, v] = m[v, u] = True
    return m


def _all_masks(n: int) -> np.ndarray:
    """Boolean membership matrix of all ``2^n`` subsets, one row per subset."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(bool)


def _exhaustive_hom(g: Graph) -> tuple[int, int]:
    n = g.n
    if n == 0:
        return 0, 0
    m = _matrix(g).astype(np.int64)
    members = _all_masks(n)
    size = members.sum(axis=1)
    inner = members.astype(np.int64) @ m  # neighbours inside each subset
    edges = (inner * members).sum(axis=1) // 2
    clique = size[edges == size * (size - 1) // 2].max()
    stable = size[edges == 0].max()
    return int(clique), int(stable)


def _max_clique_bnb(rows: list[int]) -> int:
    best = 0

    def expand(size: int, cand: int) -> None:
        nonlocal best
        if not cand:
            best = max(best, size)
            return
        while cand:
            if size + cand.bit_count() <= best:
                return
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            expand(size + 1, cand & rows[v])

    expand(0, (1 << len(rows)) - 1)
    return best


def brute_max_hom(g: Graph, mode: str = "auto") -> tuple[int, int]:
    """Exact (maximum clique size, maximum stable set size).

    ``mode`` is ``"exhaustive"`` (n <= 18), ``"bnb"`` (n <= 64) or ``"auto"``.
    """
    if mode == "auto":
        mode = "exhaustive" if g.n <= EXHAUSTIVE_CAP else "bnb"
    if mode == "exhaustive":
        if g.n > EXHAUSTIVE_CAP:
            raise PreconditionViolated(f"exhaustive oracle capped at {EXHAUSTIVE_CAP} vertices")
        return _exhaustive_hom(g)
    if mode != "bnb":
        raise ValueError(f"unknown mode {mode!r}")
    if g.n > BNB_CAP:
        raise PreconditionViolated(f"branch-and-bound oracle capped at {BNB_CAP} vertices")
    full = (1 << g.n) - 1
    co_rows = [full & ~row & ~(1 << v) for v, row in enumerate(g.adj)]
    return _max_clique_bnb(list(g.adj)), _max_clique_bnb(co_rows)


def brute_best_restricted(g: Graph, eps) -> int:
    """Vertex mask of a largest ``S`` with ``g[S]`` eps-restricted.

    Scans subset sizes from ``n`` down; within a size the first subset in
    lexicographic order wins.
    """
    eps = as_fraction(eps)
    n = g.n
    if n > EXHAUSTIVE_CAP:
        raise PreconditionViolated(f"restricted oracle capped at {EXHAUSTIVE_CAP} vertices")
    if n == 0:
        return 0
    m = _matrix(g).astype(np.int64)
    for k in range(n, 0, -1):
        combos = np.array(list(combinations(range(n), k)), dtype=np.int64)
        members = np.zeros((len(combos), n), dtype=np.int64)
        np.put_along_axis(members, combos, 1, axis=1)
        deg = members @ m
        inside = members.astype(bool)
        maxdeg = np.where(inside, deg, -1).max(axis=1)
        maxco = np.where(inside, k - 1 - deg, -1).max(axis=1)
        limit = eps.numerator * k // eps.denominator  # degrees are integers
        ok = (maxdeg <= limit) | (maxco <= limit)
        hits = np.flatnonzero(ok)
        if len(hits):
            return sum(1 << int(v) for v in combos[hits[0]])
    raise AssertionError("a single vertex is always restricted")


def has_copy_by_injections(g: Graph, h: Graph) -> bool:
    """Induced copy of ``h`` in ``g`` by trying every injection."""
    if h.n > g.n:
        return False
    gm, hm = _matrix(g), _matrix(h)
    iu = np.triu_indices(h.n, k=1)
    want = hm[iu]
    injections = np.array(list(permutations(range(g.n), h.n)), dtype=np.int64)
    if len(injections) == 0:
        return h.n == 0
    got = gm[injections[:, iu[0]], injections[:, iu[1]]]
    return bool((got == want).all(axis=1).any())


def labelled_graph(n: int, code: int) -> Graph:
    """The labelled graph on ``n`` vertices whose edge bits, in ``combinations`` order, are ``code``."""
    pairs = list(combinations(range(n), 2))
    return Graph.from_edges(n, [p for i, p in enumerate(pairs) if code >> i & 1])


def copy_table(n: int, h: Graph) -> np.ndarray:
    """``table[code]``: does labelled graph ``code`` on ``n`` vertices contain an induced ``h``?

    Every injection is a vertex subset plus an ordering, so for each subset
    the induced edge bits are compared against all orderings of ``h`` at once.
    """
    pairs = list(combinations(range(n), 2))
    index = {p: i for i, p in enumerate(pairs)}
    codes = np.arange(1 << len(pairs), dtype=np.int64)
    k = h.n
    if k > n:
        return np.zeros(len(codes), dtype=bool)
    sub_pairs = list(combinations(range(k), 2))
    images = set()
    for perm in permutations(range(k)):
        code = 0
        for i, (p, q) in enumerate(sub_pairs):
            if h.has_edge(perm[p], perm[q]):
                code |= 1 << i
        images.add(code)
    images = np.array(sorted(images), dtype=np.int64)
    out = np.zeros(len(codes), dtype=bool)
    for subset in combinations(range(n), k):
        local = np.zeros(len(codes), dtype=np.int64)
        for i, (p, q) in enumerate(sub_pairs):
            bit = index[(subset[p], subset[q])]
            local |= ((codes >> bit) & 1) << i
        out |= np.isin(local, images)
    return out


def brute_comb_exists(g: Graph, a: int, b: int) -> bool:
    """Is there a ``(k, |B|/k^2)``-comb with apexes in ``a`` and blocks in ``b`` for some ``k``?

    For a fixed apex set the largest admissible blocks are the private
    neighbourhoods, so it suffices to scan apex subsets.
    """
    apexes = [v for v in range(g.n) if a >> v & 1]
    size_b = bin(b).count("1")
    nbhd = [g.adj[v] & b for v in apexes]
    for code in range(1, 1 << len(apexes)):
        chosen = [i for i in range(len(apexes)) if code >> i & 1]
        k = len(chosen)
        ok = True
        for i in chosen:
            others = 0
            for j in chosen:
                if j != i:
                    others |= nbhd[j]
            if bin(nbhd[i] & ~others).count("1") * k * k < size_b:
                ok = False
                break
        if ok:
            return True
    return False
