"""Second sparsification round and the end-to-end pipelines.

``polynomial_rodl`` returns a certified eps-restricted induced subgraph of a
house-free graph; ``eh_extract`` turns repeated calls into a clique or
stable set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import certificates as cert
from .certificates import Blockade, Relation, classify_pair, classify_pairs
from .errors import (
    DegenerateInput,
    FinderContractBreach,
    InternalInvariantViolated,
    PreconditionViolated,
    SamplingBudgetExhausted,
    ScaleShortfall,
)
from .graph import (
    Graph,
    anticomponents,
    as_fraction,
    bits,
    complement,
    components,
    is_anticomplete_to,
    is_clique,
    is_co_sparse,
    is_complete_to,
    is_restricted,
    is_stable,
    is_x_sparse,
    lowest,
    mask_of,
    popcount,
    sparsity_of,
)
from .patterns import P4, find_induced_copy
from .primitives import (
    anticomplete_pair_sparse,
    complete_blockade_from_anticomponents,
    restricted_side,
    rodl_restricted_subgraph,
)
from .profile import ConstantsProfile, require
from .round1 import RefineReport, epsone_blockade, house_witness, largest_anticomponent

SAMPLING_RETRIES = 64

#: Scaled targets further than this many bits below one are not materialised.
TINY_BITS = 4096

# ---------------------------------------------------------------------------
# outcomes


@dataclass(frozen=True)
class SparseSubset:
    s: int
    y: Fraction

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.sparse_subset_certificate(g, self.s, self.y, lemma_id, profile)


@dataclass(frozen=True)
class CompleteBlockade:
    blockade: Blockade

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.blockade_certificate(g, self.blockade.blocks, "complete", lemma_id, profile,
                                         declared_width=self.blockade.width)


@dataclass(frozen=True)
class AnticompletePair:
    x_set: int
    y_set: int

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.anticomplete_pair_certificate(g, self.x_set, self.y_set, lemma_id, profile)


@dataclass(frozen=True)
class CompleteOrAnticompleteBlockade:
    blockade: Blockade
    kind: str  # "complete" or "anticomplete"

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.blockade_certificate(g, self.blockade.blocks, "complete_or_anticomplete",
                                         lemma_id, profile, declared_width=self.blockade.width)


@dataclass(frozen=True)
class Restricted:
    s: int
    eps: Fraction
    target: Fraction | None = None

    @property
    def size(self) -> int:
        return popcount(self.s)

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.restricted_certificate(g, self.s, self.eps, lemma_id, profile, self.target)


@dataclass(frozen=True)
class HomSet:
    s: int
    kind: str  # "clique" or "stable"

    @property
    def size(self) -> int:
        return popcount(self.s)

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.hom_set_certificate(g, self.s, self.kind, lemma_id, profile)


def _within(g: Graph, within: int | None) -> int:
    return g.full if within is None else within


def scaled(base: Fraction, power: int, n: int) -> Fraction | None:
    """``base**power * n``, or None when it is astronomically below one."""
    if power * math.log2(1 / base) - math.log2(max(n, 1)) > TINY_BITS:
        return None
    return base**power * n


def exact_sqrt(y: Fraction) -> Fraction | None:
    """``sqrt(y)`` if it is rational, else None."""
    num, den = math.isqrt(y.numerator), math.isqrt(y.denominator)
    if num * num == y.numerator and den * den == y.denominator:
        return Fraction(num, den)
    return None


def anticonnected_prefix(g: Graph, s: int, size: int) -> int:
    """``size`` vertices of the anticonnected set ``s`` that stay anticonnected.

    Takes a prefix of a breadth-first order in the complement.
    """
    if size >= popcount(s):
        return s
    start = lowest(s)
    seen = 1 << start
    order = [start]
    head = 0
    while len(order) < size:
        v = order[head]
        head += 1
        for u in bits(s & ~g.adj[v] & ~seen):
            seen |= 1 << u
            order.append(u)
            if len(order) == size:
                break
    return mask_of(order[:size])


# ---------------------------------------------------------------------------
# one step


def house6_step(g: Graph, y, profile: ConstantsProfile, seed: int = 0, within: int | None = None,
                report: RefineReport | None = None):
    """Sparse subset, complete blockade, or anticomplete pair in a sparse graph."""
    y = as_fraction(y)
    w = _within(g, within)
    n = popcount(w)
    if not 0 < y < Fraction(1, 2):
        raise PreconditionViolated(f"y = {y} must lie in (0, 1/2)")
    require(is_x_sparse(g, y, w), profile, "graph must be y-sparse")
    d = profile.d
    if n == 0:
        raise DegenerateInput("empty graph")
    if is_x_sparse(g, y ** (2 * d), w):
        return SparseSubset(w, y ** (2 * d))
    eps = y ** (3 * d)
    semi = epsone_blockade(g, eps, profile, within=w, report=report)
    parts = list(semi.blockade.blocks)
    ell = len(parts)
    m = min(popcount(p) for p in parts)
    adj_j = {(i, j) for i in range(ell) for j in range(i + 1, ell)
             if is_complete_to(g, parts[i], parts[j])}

    # random m-subsets with weakly sparse non-pattern pairs
    weak = eps ** (d - 2)
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(SAMPLING_RETRIES):
        xs = []
        for p in parts:
            members = np.array(list(bits(p)), dtype=np.int64)
            pick = rng.choice(members, size=m, replace=False)
            xs.append(mask_of(int(v) for v in pick))
        ok = all(
            classify_pair(g, xs[i], xs[j], weak) != Relation.MIXED
            for i in range(ell) for j in range(i + 1, ell) if (i, j) not in adj_j
        )
        if ok:
            break
    else:
        raise SamplingBudgetExhausted("no weakly sparse random subsets within the retry budget")

    target = max(math.ceil(eps * eps * m), math.ceil(Fraction(m, 2 * ell)))
    blocks: list[int] = []
    for i in range(ell):
        cut = 0
        for p in range(ell):
            if p == i or (min(i, p), max(i, p)) in adj_j:
                continue
            if p < i:
                ref, thr = blocks[p], eps ** (d - 8)
            else:
                ref, thr = xs[p], eps ** (d - 4)
            size_ref = popcount(ref)
            for u in bits(xs[i]):
                if popcount(g.adj[u] & ref) >= thr * size_ref:
                    cut |= 1 << u
        di = xs[i] & ~cut
        if not di:
            raise ScaleShortfall("trimming emptied a random subset")
        big = largest_anticomponent(g, di)
        if ell >= 2 and popcount(big) * ell < popcount(di):
            bl = complete_blockade_from_anticomponents(g, ell, di)
            return CompleteBlockade(Blockade(bl.blocks, len(bl.blocks), bl.width))
        blocks.append(anticonnected_prefix(g, big, min(popcount(big), target)))

    covered = 0
    for b in blocks:
        covered |= b
    rest = w & ~covered
    mixed_on = [0] * ell
    for v in bits(rest):
        hits = []
        for i, b in enumerate(blocks):
            h = g.adj[v] & b
            if h and h != b:
                hits.append(i)
                mixed_on[i] += 1
        if len(hits) >= y * ell and len(hits) >= 2:
            for a_i, i in enumerate(hits):
                for j in hits[a_i + 1:]:
                    if is_complete_to(g, blocks[i], blocks[j]):
                        ui, wi = _mixed_split(g, v, blocks[i])
                        uj, wj = _mixed_split(g, v, blocks[j])
                        house_witness(g, (v, ui, uj, wi, wj),
                                      "complete pair of mixed blocks gave no house")
            s = 0
            for i in hits:
                s |= blocks[i]
            return SparseSubset(s, sparsity_of(g, s))
    best = min(range(ell), key=lambda i: (mixed_on[i], i))
    bi = blocks[best]
    ys = 0
    for v in bits(rest):
        if not g.adj[v] & bi:
            ys |= 1 << v
    if not ys:
        raise ScaleShortfall("no vertex is anticomplete to the least mixed block")
    return AnticompletePair(bi, ys)


def _mixed_split(g: Graph, v: int, block: int) -> tuple[int, int]:
    """Non-adjacent ``u ~ v`` and ``w !~ v`` inside an anticonnected block."""
    nb = g.adj[v] & block
    far = block & ~g.adj[v]
    for u in bits(nb):
        miss = far & ~g.adj[u]
        if miss:
            return u, lowest(miss)
    raise InternalInvariantViolated("mixed vertex on an anticonnected block has no split",
                                    witness=(v, block))


# ---------------------------------------------------------------------------
# accumulation


def house7_iterate(g: Graph, y, profile: ConstantsProfile, seed: int = 0,
                   within: int | None = None, step: Callable = house6_step):
    """Iterate ``step`` at ``sqrt(y)``; anticomplete pairs accumulate into a blockade."""
    y = as_fraction(y)
    w = _within(g, within)
    r = exact_sqrt(y)
    if r is None:
        raise PreconditionViolated(f"y = {y} must be the square of a rational")
    if not 0 < y:
        raise PreconditionViolated("y must be positive")
    require(y <= Fraction(1, 4**6), profile, "y must be at most 4^-6")
    require(is_x_sparse(g, y, w), profile, "graph must be y-sparse")
    target = math.ceil(1 / r)
    blocks: list[int] = []
    current = w
    for it in range(target + 1):
        if blocks and len(blocks) + 1 >= target:
            bl = tuple(blocks) + (current,)
            return CompleteOrAnticompleteBlockade(Blockade(bl, len(bl), min(map(popcount, bl))),
                                                  "anticomplete")
        try:
            out = step(g, r, profile, seed=seed + it, within=current)
        except (ScaleShortfall, DegenerateInput):
            if blocks:
                bl = tuple(blocks) + (current,)
                return CompleteOrAnticompleteBlockade(
                    Blockade(bl, len(bl), min(map(popcount, bl))), "anticomplete")
            raise
        if isinstance(out, SparseSubset):
            return out
        if isinstance(out, CompleteBlockade):
            return CompleteOrAnticompleteBlockade(out.blockade, "complete")
        if isinstance(out, AnticompletePair):
            if (not out.x_set or not out.y_set or out.x_set & ~current or out.y_set & ~current
                    or out.x_set & out.y_set):
                raise InternalInvariantViolated("step returned sets outside the current block")
            blocks.append(out.x_set)
            current = out.y_set
            continue
        raise InternalInvariantViolated(f"unexpected step outcome {out!r}")
    raise InternalInvariantViolated("accumulation loop exceeded its iteration bound")


def _truncate(blocks, limit: int):
    if len(blocks) <= limit:
        return tuple(blocks)
    keep = sorted(range(len(blocks)), key=lambda i: (-popcount(blocks[i]), i))[:limit]
    return tuple(blocks[i] for i in sorted(keep))


def house_final(g: Graph, x, profile: ConstantsProfile, seed: int = 0, within: int | None = None):
    """An x-restricted induced subgraph, or a complete or anticomplete blockade
    of length in ``[2, 1/x]``."""
    x = as_fraction(x)
    w = _within(g, within)
    n = popcount(w)
    if not 0 < x < Fraction(1, 2):
        raise PreconditionViolated(f"x = {x} must lie in (0, 1/2)")
    if n == 0:
        raise DegenerateInput("empty graph")
    a = profile.a
    target = scaled(x, a, n)

    def fallback():
        return Restricted(rodl_restricted_subgraph(g, x, target=target, within=w), x, target)

    if target is None or target < 1:
        return fallback()
    c2 = profile.c_round2
    s = rodl_restricted_subgraph(g, c2, within=w)
    limit = math.floor(1 / x)
    if not is_x_sparse(g, c2, s):
        try:
            bl = anticomplete_pair_sparse(complement(g), profile.eta, within=s, check_free=False)
        except (DegenerateInput, PreconditionViolated):
            return fallback()
        return CompleteOrAnticompleteBlockade(Blockade(bl.blocks, 2, bl.width), "complete")
    y, f = c2, s
    while True:
        if y < x:
            if is_x_sparse(g, x, f) and popcount(f) >= target:
                return Restricted(f, x, target)
            return fallback()
        try:
            out = house7_iterate(g, y, profile, seed=seed, within=f)
        except (ScaleShortfall, DegenerateInput, SamplingBudgetExhausted):
            return fallback()
        if isinstance(out, SparseSubset):
            y, f = y**profile.d, out.s
            continue
        blocks = _truncate(out.blockade.blocks, limit)
        if len(blocks) < 2:
            return fallback()
        return CompleteOrAnticompleteBlockade(Blockade(blocks, len(blocks),
                                                       min(map(popcount, blocks))), out.kind)


# ---------------------------------------------------------------------------
# cographs


def cotree_optima(g: Graph, within: int | None = None) -> tuple[int, int]:
    """Maximum clique and maximum stable set of the cograph ``g[within]``."""
    w = _within(g, within)
    # iterative post-order over the cotree
    stack = [(w, False)]
    result: dict[int, tuple[int, int]] = {}
    while stack:
        s, expanded = stack.pop()
        if popcount(s) == 1:
            result[s] = (s, s)
            continue
        comps = components(g, s)
        if len(comps) > 1:
            kids, join = comps, False
        else:
            kids = anticomponents(g, s)
            if len(kids) == 1:
                raise PreconditionViolated("not a cograph", witness=find_induced_copy(g, P4, s))
            join = True
        if not expanded:
            stack.append((s, True))
            stack.extend((k, False) for k in kids)
            continue
        if join:
            clique = 0
            for k in kids:
                clique |= result[k][0]
            stable = max((result[k][1] for k in kids), key=lambda m: (popcount(m), -lowest(m)))
        else:
            stable = 0
            for k in kids:
                stable |= result[k][1]
            clique = max((result[k][0] for k in kids), key=lambda m: (popcount(m), -lowest(m)))
        result[s] = (clique, stable)
        for k in kids:
            del result[k]
    return result[w]


def cograph_clique_or_stable(j: Graph, within: int | None = None) -> HomSet:
    """A clique or stable set of size at least ``ceil(sqrt(n))`` in a cograph."""
    w = _within(j, within)
    copy = find_induced_copy(j, P4, w)
    if copy is not None:
        raise PreconditionViolated("graph contains an induced P4", witness=copy)
    if not w:
        return HomSet(0, "clique")
    clique, stable = cotree_optima(j, w)
    if popcount(clique) >= popcount(stable):
        return HomSet(clique, "clique")
    return HomSet(stable, "stable")


# ---------------------------------------------------------------------------
# cograph layout


@dataclass
class BlocksReport:
    steps: list = field(default_factory=list)
    violations: list = field(default_factory=list)


def _check_finder(out, host: int, g: Graph, limit: int) -> tuple[tuple[int, ...], bool]:
    if not isinstance(out, (CompleteOrAnticompleteBlockade, CompleteBlockade)):
        raise FinderContractBreach(f"finder returned {type(out).__name__}", provenance=out)
    blocks = tuple(out.blockade.blocks)
    problems = Blockade(blocks).failures()
    if len(blocks) < 2 or len(blocks) > limit:
        problems.append(f"length {len(blocks)} outside [2, {limit}]")
    if any(b & ~host for b in blocks):
        problems.append("blocks leave the part being split")
    complete = anticomplete = False
    if not problems:
        tags = set(classify_pairs(g, blocks, 0).values())
        complete = tags == {Relation.COMPLETE}
        anticomplete = tags == {Relation.ANTICOMPLETE}
        if not (complete or anticomplete):
            problems.append("blockade is neither complete nor anticomplete")
    if problems:
        raise FinderContractBreach("; ".join(problems), provenance=out)
    return blocks, complete


def blocks_extract(g: Graph, eps, a: int, blockade_finder: Callable, profile: ConstantsProfile,
                   within: int | None = None, report: BlocksReport | None = None) -> Restricted:
    """eps-restricted subgraph from a cograph layout of complete/anticomplete splits.

    ``blockade_finder(within=A)`` must return a complete or anticomplete
    blockade inside ``A`` of length in ``[2, 1/eps]``.
    """
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise PreconditionViolated(f"eps = {eps} must lie in (0, 1/2)")
    w = _within(g, within)
    n = popcount(w)
    if n == 0:
        raise DegenerateInput("empty graph")
    report = report if report is not None else BlocksReport()
    limit = math.floor(1 / eps)
    min_part = scaled(eps, 3 * a, n) or 0
    parts = [w]
    edges: set = set()
    while len(parts) * eps * eps < 1:
        idx = max(range(len(parts)), key=lambda i: (popcount(parts[i]), -i))
        part = parts[idx]
        if popcount(part) < 2:
            break
        try:
            out = blockade_finder(within=part)
        except (ScaleShortfall, DegenerateInput):
            break
        blocks, complete = _check_finder(out, part, g, limit)
        smallest = min(popcount(b) for b in blocks)
        if smallest < min_part or smallest * len(blocks) ** a < popcount(part):
            report.steps.append({"action": "stop", "reason": "width"})
            break
        ell = len(blocks)
        shift = ell - 1

        def remap(j: int) -> int:
            return j if j < idx else j + shift

        new_edges = set()
        for i, j in edges:
            if idx in (i, j):
                other = j if i == idx else i
                for p in range(ell):
                    new_edges.add(tuple(sorted((idx + p, remap(other)))))
            else:
                new_edges.add(tuple(sorted((remap(i), remap(j)))))
        if complete:
            for p in range(ell):
                for q in range(p + 1, ell):
                    new_edges.add((idx + p, idx + q))
        parts = parts[:idx] + list(blocks) + parts[idx + 1:]
        edges = new_edges
        pattern = Graph.from_edges(len(parts), edges)
        if find_induced_copy(pattern, P4) is not None:
            report.violations.append(("cograph", len(parts)))
            raise InternalInvariantViolated("substitution broke the cograph pattern")
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                want = (i, j) in edges
                if want and not is_complete_to(g, parts[i], parts[j]):
                    report.violations.append(("complete", i, j))
                    raise InternalInvariantViolated("pattern edge between non-complete parts")
                if not want and not is_anticomplete_to(g, parts[i], parts[j]):
                    report.violations.append(("anticomplete", i, j))
                    raise InternalInvariantViolated("pattern non-edge between adjacent parts")
        report.steps.append({"action": "substitute", "parts": len(parts), "k": ell})
    pattern = Graph.from_edges(len(parts), edges)
    hom = cograph_clique_or_stable(pattern)
    chosen = list(bits(hom.s))
    size = min(popcount(parts[j]) for j in chosen)
    s = 0
    for j in chosen:
        taken = 0
        for v in bits(parts[j]):
            if popcount(taken) == size:
                break
            taken |= 1 << v
        s |= taken
    if not is_restricted(g, eps, s):
        raise ScaleShortfall("layout too short for a restricted union of parts")
    return Restricted(s, eps, scaled(eps, 3 * a, n))


# ---------------------------------------------------------------------------
# pipelines


class _FoundRestricted(Exception):
    def __init__(self, outcome: Restricted):
        super().__init__("restricted outcome")
        self.outcome = outcome


def polynomial_rodl(g: Graph, eps, profile: ConstantsProfile, seed: int = 0,
                    within: int | None = None, report: BlocksReport | None = None) -> Restricted:
    """A certified eps-restricted induced subgraph of a house-free graph."""
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise PreconditionViolated(f"eps = {eps} must lie in (0, 1/2)")
    w = _within(g, within)
    n = popcount(w)
    if n == 0:
        raise DegenerateInput("empty graph")
    a = profile.a
    target = scaled(eps, 3 * a, n)
    require(target is not None and target >= 1, profile, "graph too small for eps")
    if is_restricted(g, eps, w):
        return Restricted(w, eps, target)

    def finder(within):
        out = house_final(g, eps, profile, seed=seed, within=within)
        if isinstance(out, Restricted):
            raise _FoundRestricted(out)
        return out

    found = None
    try:
        found = blocks_extract(g, eps, a, finder, profile, within=w, report=report)
    except _FoundRestricted as hit:
        found = hit.outcome
    except ScaleShortfall:
        found = None
    alt = rodl_restricted_subgraph(g, eps, target=target, within=w)
    s = alt if found is None or popcount(alt) > popcount(found.s) else found.s
    if not is_restricted(g, eps, s):
        raise InternalInvariantViolated("pipeline produced an unrestricted set", witness=s)
    return Restricted(s, eps, target)


def _greedy(g: Graph, w: int, kind: str) -> int:
    """Greedy clique or stable set: repeatedly take the vertex keeping the most candidates."""
    order = list(bits(w))
    if not order:
        return 0
    rel = g.matrix[np.ix_(order, order)]
    if kind == "stable":
        rel = ~rel
        np.fill_diagonal(rel, False)
    weights = rel.astype(np.float32)  # counts stay exact well past the size cap
    cand = np.ones(len(order), dtype=bool)
    out = 0
    while cand.any():
        keep = np.where(cand, weights @ cand.astype(np.float32), -1)
        i = int(np.argmax(keep))  # first maximum: lowest index
        out |= 1 << order[i]
        cand &= rel[i]
        cand[i] = False
    return out


def _bigger(a: int, b: int) -> int:
    return a if popcount(a) >= popcount(b) else b


def eh_extract(g: Graph, profile: ConstantsProfile, seed: int = 0) -> HomSet:
    """A verified clique or stable set, grown through restricted subgraphs."""
    n = g.n
    if n == 0:
        return HomSet(0, "clique")
    if find_induced_copy(g, P4) is None:
        out = cograph_clique_or_stable(g)
    else:
        eps = Fraction(1, 4)
        max_depth = max(1, n.bit_length())

        def rec(w: int, depth: int) -> tuple[int, int]:
            if popcount(w) <= 1:
                return w, w
            clique, stable = _greedy(g, w, "clique"), _greedy(g, w, "stable")
            if depth == 0:
                return clique, stable
            s = polynomial_rodl(g, eps, profile, seed=seed, within=w).s
            if popcount(s) <= 1:
                return clique, stable
            if restricted_side(g, eps, s) == "sparse":
                v = min(bits(s), key=lambda u: (popcount(g.adj[u] & s), u))
                c2, s2 = rec(s & ~g.adj[v] & ~(1 << v), depth - 1)
                stable = _bigger(stable, s2 | (1 << v))
                clique = _bigger(clique, c2)
            else:
                v = min(bits(s), key=lambda u: (popcount(s & ~g.adj[u]), u))
                c2, s2 = rec(s & g.adj[v], depth - 1)
                clique = _bigger(clique, c2 | (1 << v))
                stable = _bigger(stable, s2)
            return clique, stable

        clique, stable = rec(g.full, max_depth)
        if popcount(clique) >= popcount(stable):
            out = HomSet(clique, "clique")
        else:
            out = HomSet(stable, "stable")
    ok = is_clique(g, out.s) if out.kind == "clique" else is_stable(g, out.s)
    if not ok:
        raise InternalInvariantViolated("extracted set is not homogeneous", witness=out.s)
    return out


def achieved_exponent(size: int, n: int) -> float:
    """``log(size)/log(n)``; 1.0 for graphs with fewer than two vertices."""
    if n <= 1:
        return 1.0
    if size <= 0:
        return 0.0
    return math.log(size) / math.log(n)
