"""First sparsification round: pure-or-sparse blockades in house-free graphs
and the layout refinement that turns them into long semisparse blockades.
"""

from __future__ import annotations

import math
from itertools import permutations
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import certificates as cert
from .certificates import Blockade, Relation, classify_pair, classify_pairs, count_pairs
from .errors import (
    DegenerateInput,
    FinderContractBreach,
    InternalInvariantViolated,
    PreconditionViolated,
    ScaleShortfall,
)
from .graph import (
    Graph,
    anticomponents,
    as_fraction,
    bits,
    complement,
    edges_between,
    is_complete_to,
    is_sparse_to,
    is_x_sparse,
    lowest,
    popcount,
    sparse_core,
    sparsity_of,
)
from .patterns import HOUSE, is_copy
from .primitives import (
    CombFound,
    anticomplete_pair_sparse,
    comb_or_sparse_cover,
    complete_blockade_from_anticomponents,
    covering_set,
    restricted_side,
    rodl_restricted_subgraph,
)
from .profile import ConstantsProfile, require

# ---------------------------------------------------------------------------
# outcomes


@dataclass(frozen=True)
class Sparser:
    s: int
    sparsity: Fraction

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.sparse_subset_certificate(g, self.s, self.sparsity, lemma_id, profile)


@dataclass(frozen=True)
class PureBlockadeFound:
    blockade: Blockade

    @property
    def k(self) -> int:
        return self.blockade.length

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.blockade_certificate(g, self.blockade.blocks, "pure", lemma_id, profile,
                                         declared_width=self.blockade.width)


@dataclass(frozen=True)
class XSparseBlockade:
    blockade: Blockade
    x: Fraction

    @property
    def k(self) -> int:
        return self.blockade.length

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.blockade_certificate(g, self.blockade.blocks, "x_sparse", lemma_id, profile,
                                         x=self.x, declared_width=self.blockade.width)


@dataclass(frozen=True)
class SparsePair:
    """``y`` is ``x``-sparse to ``x_set``."""

    x_set: int
    y_set: int
    x: Fraction

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.sparse_pair_certificate(g, self.x_set, self.y_set, self.x, lemma_id, profile)


@dataclass
class SemisparseBlockade:
    """Every pair of blocks is complete or weakly ``x``-sparse."""

    blockade: Blockade
    x: Fraction
    relations: dict = field(default_factory=dict)
    audit: list = field(default_factory=list)

    def certify(self, g: Graph, profile, lemma_id: str):
        return cert.blockade_certificate(g, self.blockade.blocks, "semisparse", lemma_id, profile,
                                         x=self.x, declared_width=self.blockade.width)


def blockade_of(outcome) -> Blockade:
    if isinstance(outcome, (PureBlockadeFound, XSparseBlockade, SemisparseBlockade)):
        return outcome.blockade
    raise TypeError(f"{type(outcome).__name__} carries no blockade")


# ---------------------------------------------------------------------------
# helpers


def _within(g: Graph, within: int | None) -> int:
    return g.full if within is None else within


def ceil_root(value: int, d: int) -> int:
    """Smallest integer ``k`` with ``k**d >= value``."""
    if value <= 1:
        return 1 if value == 1 else 0
    k = max(1, int(round(value ** (1.0 / d))))
    while k**d < value:
        k += 1
    while k > 1 and (k - 1) ** d >= value:
        k -= 1
    return k


def house_witness(g: Graph, vertices, message: str):
    """Raise for a would-be house: a precondition error if it is real."""
    vs = tuple(vertices)
    if len(set(vs)) == 5:
        for order in _house_orders(vs):
            if is_copy(g, HOUSE, dict(enumerate(order))):
                raise PreconditionViolated("input contains an induced house", witness=order)
    raise InternalInvariantViolated(message, witness=vs)


def _house_orders(vs):
    return permutations(vs)


def _non_adjacent_split(g: Graph, u: int, d: int) -> tuple[int, int]:
    """For ``u`` mixed on the anticonnected set ``d``: ``w ~ u``, ``z !~ u``, ``w !~ z`` in ``d``."""
    nb = g.adj[u] & d
    far = d & ~g.adj[u]
    for w in bits(nb):
        miss = far & ~g.adj[w]
        if miss:
            return w, lowest(miss)
    raise InternalInvariantViolated("mixed vertex on an anticonnected set has no split", witness=(u, d))


def largest_anticomponent(g: Graph, s: int) -> int:
    return max(anticomponents(g, s), key=lambda p: (popcount(p), -lowest(p)))


# ---------------------------------------------------------------------------
# single step


def house1_step(g: Graph, x, y, profile: ConstantsProfile, within: int | None = None,
                seed: int | None = None):
    """Sparser, pure blockade, or sparse pair, from one high-degree vertex."""
    x, y = as_fraction(x), as_fraction(y)
    w = _within(g, within)
    n = popcount(w)
    if not 0 < x <= y:
        raise PreconditionViolated(f"need 0 < x <= y, got x={x}, y={y}")
    require(y <= Fraction(1, 256), profile, "y must be at most 2^-8")
    require(n * y**4 >= 1, profile, "graph too small for y")
    require(is_x_sparse(g, y**3, w), profile, "graph must be y^3-sparse")
    if n == 0:
        raise DegenerateInput("empty graph")
    if is_x_sparse(g, 2 * y**4, w):
        return Sparser(w, 2 * y**4)

    members = list(bits(w))
    v = max(members, key=lambda u: (popcount(g.adj[u] & w), -u))
    nbrs = g.adj[v] & w
    size_n = popcount(nbrs)
    rest = w & ~nbrs & ~(1 << v)
    half_y2 = y * y / 2
    a_prime = 0
    for u in bits(rest):
        if popcount(g.adj[u] & nbrs) >= half_y2 * size_n:
            a_prime |= 1 << u
    a = rest & ~a_prime
    size_a = popcount(a)
    x2 = x * x
    n_prime = 0
    for u in bits(nbrs):
        if popcount(g.adj[u] & a) <= x2 * size_a:
            n_prime |= 1 << u
    b = nbrs & ~n_prime
    if n_prime and popcount(n_prime) > y**4 * n:
        size_np = popcount(n_prime)
        ys = 0
        for u in bits(a):
            if popcount(g.adj[u] & n_prime) <= x * size_np:
                ys |= 1 << u
        if ys:
            return SparsePair(n_prime, ys, x)
    if not b or not a:
        raise ScaleShortfall("no usable neighbourhood split")

    s = covering_set(g, a, b, x2, seed=seed) if x2 < Fraction(1, 2) else a
    delta = y * y * popcount(b)
    max_into_b = max(popcount(g.adj[u] & b) for u in bits(s))
    if max_into_b > delta:
        # only possible when the sparsity bounds fail at this size
        delta = Fraction(max_into_b)
    outcome = comb_or_sparse_cover(g, s, b, delta)
    if not isinstance(outcome, CombFound) or outcome.k < 2:
        raise ScaleShortfall("no comb of length two or more")
    ell = outcome.k
    k = max(2, ceil_root(ell, 4))
    order = sorted(range(ell), key=lambda i: (-popcount(outcome.blocks[i]), i))[:k]
    order.sort()
    apexes = [outcome.apexes[i] for i in order]
    blocks = [outcome.blocks[i] for i in order]

    ds = []
    for bi in blocks:
        big = largest_anticomponent(g, bi)
        if popcount(big) * k < popcount(bi):
            bl = complete_blockade_from_anticomponents(g, k, bi)
            return PureBlockadeFound(Blockade(bl.blocks, k, bl.width))
        ds.append(big)
    for i, di in enumerate(ds):
        for j, dj in enumerate(ds):
            if i == j:
                continue
            for u in bits(dj):
                hit = g.adj[u] & di
                if hit and hit != di:
                    wv, z = _non_adjacent_split(g, u, di)
                    house_witness(g, (v, u, wv, z, apexes[i]),
                                  "mixed vertex on an anticonnected comb block gave no house")
    return PureBlockadeFound(Blockade(tuple(ds), k, min(popcount(d) for d in ds)))


# ---------------------------------------------------------------------------
# accumulation


Step = Callable[..., object]


def house2_iterate(g: Graph, x, y, profile: ConstantsProfile, within: int | None = None,
                   step: Step = house1_step):
    """Iterate ``step``; sparse pairs accumulate into an x-sparse blockade."""
    x, y = as_fraction(x), as_fraction(y)
    w = _within(g, within)
    c = profile.c
    if not 0 < x <= y:
        raise PreconditionViolated(f"need 0 < x <= y, got x={x}, y={y}")
    require(y <= c, profile, "y must be at most c")
    require(is_x_sparse(g, c * y**3, w), profile, "graph must be c*y^3-sparse")
    target = math.ceil(1 / y)
    blocks: list[int] = []
    current = w
    for _ in range(target + 1):
        if len(blocks) + 1 >= target and blocks:
            bl = tuple(blocks) + (current,)
            return XSparseBlockade(Blockade(bl, len(bl), min(popcount(b) for b in bl)), x)
        try:
            out = step(g, x, y, profile, within=current)
        except (ScaleShortfall, DegenerateInput):
            if blocks:
                bl = tuple(blocks) + (current,)
                return XSparseBlockade(Blockade(bl, len(bl), min(popcount(b) for b in bl)), x)
            raise
        if isinstance(out, Sparser):
            return Sparser(out.s, out.sparsity)
        if isinstance(out, (PureBlockadeFound, XSparseBlockade)):
            return out
        if isinstance(out, SparsePair):
            if (not out.x_set or not out.y_set or out.x_set & ~current or out.y_set & ~current
                    or out.x_set & out.y_set):
                raise InternalInvariantViolated("step returned sets outside the current block")
            blocks.append(out.x_set)
            current = out.y_set
            continue
        raise InternalInvariantViolated(f"unexpected step outcome {out!r}")
    raise InternalInvariantViolated("accumulation loop exceeded its iteration bound")


def equal_partition(s: int, parts: int) -> list[int]:
    """Split ``s`` into ``parts`` index-contiguous sets of near-equal size."""
    members = list(bits(s))
    parts = max(1, min(parts, len(members)))
    base, extra = divmod(len(members), parts)
    out = []
    pos = 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        m = 0
        for v in members[pos:pos + size]:
            m |= 1 << v
        out.append(m)
        pos += size
    return out


def house3_sparsify(g: Graph, x, profile: ConstantsProfile, within: int | None = None,
                    step: Step = house1_step):
    """Pure or x-sparse blockade from a sparse graph by grid descent on ``y``."""
    x = as_fraction(x)
    w = _within(g, within)
    c = profile.c
    if popcount(w) <= 1:
        raise DegenerateInput("need at least two vertices")
    if not 0 < x:
        raise PreconditionViolated("x must be positive")
    require(x < c**5, profile, "x must be below c^5")
    require(is_x_sparse(g, c**16, w), profile, "graph must be c^16-sparse")
    n = popcount(w)
    # grid-minimal y with a c*y^3-sparse witness of size >= y|G|
    y = c**5
    f = sparse_core(g, c * y**3, w)
    while y >= x:
        ny = c * y
        nf = sparse_core(g, c * ny**3, w)
        if popcount(nf) < ny * n:
            break
        y, f = ny, nf
    while True:
        if y < x:
            parts = equal_partition(f, math.ceil(1 / x))
            if len(parts) < 2:
                raise ScaleShortfall("sparse witness too small to partition")
            bl = Blockade(tuple(parts), len(parts), min(popcount(p) for p in parts))
            if all(is_sparse_to(g, parts[j], parts[i], x)
                   for i in range(len(parts)) for j in range(i + 1, len(parts))):
                return XSparseBlockade(bl, x)
            raise ScaleShortfall("partition of the sparse witness is not x-sparse")
        out = house2_iterate(g, x, y, profile, within=f, step=step)
        if isinstance(out, Sparser):
            # a sparser witness: move one grid step down
            y, f = c * y, out.s
            continue
        return out


# ---------------------------------------------------------------------------
# no sparsity hypothesis


def _trivial_pure(g: Graph, w: int) -> PureBlockadeFound:
    u = lowest(w)
    v = lowest(w & ~(1 << u))
    return PureBlockadeFound(Blockade((1 << u, 1 << v), 2, 1))


def house4_blockade(g: Graph, x, profile: ConstantsProfile, within: int | None = None,
                    step: Step = house1_step):
    """A pure or x-sparse blockade of length at least 2, as wide as achieved."""
    x = as_fraction(x)
    w = _within(g, within)
    n = popcount(w)
    if n < 2:
        raise DegenerateInput("need at least two vertices")
    d = profile.d
    require(x < Fraction(1, 2**d), profile, "x must be below 2^-d")
    require(n * x**d >= 1, profile, "graph too small for x")
    xi = profile.xi
    f = rodl_restricted_subgraph(g, xi, within=w)
    if popcount(f) < 2:
        return _trivial_pure(g, w)
    if restricted_side(g, xi, f) == "dense":
        try:
            bl = anticomplete_pair_sparse(complement(g), profile.eta, within=f, check_free=False)
        except (DegenerateInput, PreconditionViolated):
            return _trivial_pure(g, w)
        return PureBlockadeFound(Blockade(bl.blocks, 2, bl.width))
    try:
        return house3_sparsify(g, x, profile, within=f, step=step)
    except (ScaleShortfall, DegenerateInput):
        return _trivial_pure(g, w)


# ---------------------------------------------------------------------------
# layout refinement


@dataclass
class Layout:
    """Pattern ``J`` (adjacency sets) with one part per vertex."""

    parts: list[int]
    edges: set = field(default_factory=set)
    decided: int = 0
    wrong: int = 0

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def pattern(self) -> Graph:
        return Graph.from_edges(len(self.parts), self.edges)

    @property
    def covered(self) -> int:
        m = 0
        for p in self.parts:
            m |= p
        return m


def _largest(parts: list[int]) -> int:
    return max(range(len(parts)), key=lambda i: (popcount(parts[i]), -i))


def _substitute(g: Graph, lay: Layout, idx: int, blocks: list[int]) -> Layout:
    """Replace part ``idx`` by ``blocks``; blocks complete to each other become J-adjacent."""
    old = lay.parts[idx]
    new_set = 0
    for b in blocks:
        new_set |= b
    others = [j for j in range(len(lay.parts)) if j != idx]
    other_size = sum(popcount(lay.parts[j]) for j in others)
    # pairs between the old part and the rest of the layout
    lost_wrong = sum(edges_between(g, old, lay.parts[j]) for j in others if not lay.adjacent(idx, j))
    kept_wrong = sum(edges_between(g, new_set, lay.parts[j]) for j in others if not lay.adjacent(idx, j))
    inner_decided = 0
    inner_wrong = 0
    k_edges = set()
    for p in range(len(blocks)):
        for q in range(p + 1, len(blocks)):
            inner_decided += popcount(blocks[p]) * popcount(blocks[q])
            if is_complete_to(g, blocks[p], blocks[q]):
                k_edges.add((p, q))
            else:
                inner_wrong += edges_between(g, blocks[p], blocks[q])
    decided = lay.decided - popcount(old) * other_size + popcount(new_set) * other_size + inner_decided
    wrong = lay.wrong - lost_wrong + kept_wrong + inner_wrong
    # new index layout: blocks take positions idx .. idx+len-1
    parts = lay.parts[:idx] + list(blocks) + lay.parts[idx + 1:]
    shift = len(blocks) - 1

    def remap(j: int) -> int:
        return j if j < idx else j + shift

    edges = set()
    for i, j in lay.edges:
        if idx in (i, j):
            other = j if i == idx else i
            for p in range(len(blocks)):
                a, b = sorted((idx + p, remap(other)))
                edges.add((a, b))
        else:
            edges.add(tuple(sorted((remap(i), remap(j)))))
    for p, q in k_edges:
        edges.add((idx + p, idx + q))
    return Layout(parts, edges, decided, wrong)


@dataclass
class RefineReport:
    """Per-step audit of the layout loop; ``violations`` must stay empty."""

    steps: list = field(default_factory=list)
    violations: list = field(default_factory=list)


def _finder_blocks(outcome, host: int, x: Fraction, g: Graph, provenance: str) -> list[int]:
    try:
        bl = blockade_of(outcome)
    except TypeError as exc:
        raise FinderContractBreach(str(exc), provenance) from exc
    blocks = list(bl.blocks)
    problems = Blockade(tuple(blocks)).failures()
    if len(blocks) < 2:
        problems.append("fewer than two blocks")
    for b in blocks:
        if b & ~host:
            problems.append("block leaves the part it was asked to split")
    if not problems:
        tags = classify_pairs(g, blocks, x)
        pure = all(t in (Relation.COMPLETE, Relation.ANTICOMPLETE) for t in tags.values())
        sparse = all(t in (Relation.ANTICOMPLETE, Relation.SPARSE) for t in tags.values())
        if not (pure or sparse):
            problems.append("blockade is neither pure nor x-sparse")
    if problems:
        raise FinderContractBreach("; ".join(problems), provenance)
    return blocks


def refine_layout(g: Graph, eps, d: int, block_finder: Callable, profile: ConstantsProfile,
                  within: int | None = None, report: RefineReport | None = None) -> SemisparseBlockade:
    """Long blockade whose pairs are complete or weakly ``eps^d``-sparse.

    ``block_finder(g, x, within=A)`` must return an outcome carrying a pure or
    x-sparse blockade inside ``A``, with ``x = eps^(5d)``.
    """
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise PreconditionViolated(f"eps = {eps} must lie in (0, 1/2)")
    w = _within(g, within)
    n = popcount(w)
    if n < 2:
        raise DegenerateInput("need at least two vertices")
    require(n * eps ** (10 * d * d) >= 1, profile, "graph too small for eps")
    x = eps ** (5 * d)
    weak = eps**d
    min_part = eps ** (2 * d) * n
    length = max(2, math.ceil(1 / eps))
    report = report if report is not None else RefineReport()
    lay = Layout([w])
    last_blocks: list[int] | None = None
    while len(lay.parts) < length:
        idx = _largest(lay.parts)
        part = lay.parts[idx]
        try:
            out = block_finder(g, x, within=part)
        except (ScaleShortfall, DegenerateInput):
            break
        blocks = _finder_blocks(out, part, x, g, provenance=f"step {len(report.steps)}")
        last_blocks = blocks
        if len(blocks) >= length:
            rel = classify_pairs(g, blocks, weak)
            bl = Blockade(tuple(blocks), len(blocks), min(popcount(b) for b in blocks))
            report.steps.append({"action": "finder_long", "k": len(blocks)})
            return SemisparseBlockade(bl, weak, rel, report.steps)
        ell = len(blocks)
        smallest = min(popcount(b) for b in blocks)
        if smallest < min_part or smallest * ell**d < popcount(part):
            report.steps.append({"action": "stop", "reason": "width"})
            break
        new = _substitute(g, lay, idx, blocks)
        if new.wrong > x * new.decided:
            report.steps.append({"action": "stop", "reason": "wrong pairs"})
            break
        decided, wrong = count_pairs(g, new.pattern(), new.parts)
        if (decided, wrong) != (new.decided, new.wrong):
            report.violations.append(("recount", (decided, wrong), (new.decided, new.wrong)))
            raise InternalInvariantViolated("incremental pair counts disagree with recount")
        for i, j in new.edges:
            if not is_complete_to(g, new.parts[i], new.parts[j]):
                report.violations.append(("pattern edge", i, j))
                raise InternalInvariantViolated("pattern edge between non-complete parts")
        if any(popcount(p) < min_part for p in new.parts) or new.wrong > x * new.decided:
            report.violations.append(("bullets", len(new.parts)))
            raise InternalInvariantViolated("layout bullets fail after substitution")
        if len(new.parts) <= len(lay.parts):
            raise InternalInvariantViolated("layout did not grow")
        lay = new
        report.steps.append({"action": "substitute", "parts": len(lay.parts),
                             "decided": lay.decided, "wrong": lay.wrong})
    if len(lay.parts) >= 2:
        blocks = lay.parts
    elif last_blocks is not None:
        blocks = last_blocks
    else:
        raise ScaleShortfall("no split of the whole graph was found")
    rel = classify_pairs(g, blocks, weak)
    for (i, j), tag in rel.items():
        if tag == Relation.MIXED:
            raise InternalInvariantViolated(f"pair ({i}, {j}) is mixed in a refined layout")
    bl = Blockade(tuple(blocks), len(blocks), min(popcount(b) for b in blocks))
    return SemisparseBlockade(bl, weak, rel, report.steps)


def epsone_blockade(g: Graph, eps, profile: ConstantsProfile, within: int | None = None,
                    report: RefineReport | None = None) -> SemisparseBlockade:
    """Semisparse blockade via layout refinement with the pure-or-sparse finder."""

    def finder(host, x, within=None):
        return house4_blockade(host, x, profile, within=within)

    return refine_layout(g, eps, profile.d, finder, profile, within=within, report=report)
