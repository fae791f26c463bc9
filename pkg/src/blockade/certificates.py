"""Certificates: typed, serialisable conclusions with an independent checker.

Nothing in here trusts the code that built a certificate.  ``verify_certificate``
recomputes every claimed property from the host graph alone, and reports
each failed clause by name.
"""

from __future__ import annotations

import json
import weakref
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CertificateStructureError
from .graph import (
    Graph,
    as_fraction,
    bits,
    edges_between,
    format_rational,
    is_anticomplete_to,
    is_complete_to,
    is_restricted,
    is_sparse_to,
    is_x_sparse,
    lowest,
    mask_of,
    parse_rational,
    popcount,
)

VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


_HASHES: "weakref.WeakKeyDictionary[Graph, str]" = weakref.WeakKeyDictionary()


def graph_hash(g: Graph) -> str:
    """64-bit FNV-1a over the sorted edge list (each endpoint a little-endian u32)."""
    cached = _HASHES.get(g)
    if cached is not None:
        return cached
    data = np.array(g.edges(), dtype="<u4").tobytes()
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    out = f"{h:016x}"
    _HASHES[g] = out
    return out


# ---------------------------------------------------------------------------
# pair relations


class Relation(str, Enum):
    COMPLETE = "complete"
    ANTICOMPLETE = "anticomplete"
    SPARSE = "sparse"
    WEAKLY_SPARSE = "weakly_sparse"
    MIXED = "mixed"


def classify_pair(g: Graph, a: int, b: int, x) -> Relation:
    """Relation of the ordered pair (earlier block ``a``, later block ``b``).

    ``SPARSE`` means ``b`` is x-sparse to ``a``, which implies weak
    x-sparsity; it is reported in preference to ``WEAKLY_SPARSE``.
    """
    x = as_fraction(x)
    if is_anticomplete_to(g, a, b):
        return Relation.ANTICOMPLETE
    if is_complete_to(g, a, b):
        return Relation.COMPLETE
    if is_sparse_to(g, b, a, x):
        return Relation.SPARSE
    if edges_between(g, a, b) * x.denominator <= x.numerator * popcount(a) * popcount(b):
        return Relation.WEAKLY_SPARSE
    return Relation.MIXED


def classify_pairs(g: Graph, blocks: Sequence[int], x) -> dict[tuple[int, int], Relation]:
    """Tags for every pair ``i < j`` of blocks."""
    x = as_fraction(x)
    return {
        (i, j): classify_pair(g, blocks[i], blocks[j], x)
        for i in range(len(blocks))
        for j in range(i + 1, len(blocks))
    }


def _weakly(tag: Relation) -> bool:
    return tag in (Relation.ANTICOMPLETE, Relation.SPARSE, Relation.WEAKLY_SPARSE)


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Blockade:
    blocks: tuple[int, ...]
    declared_length: int = 0
    declared_width: Fraction = Fraction(0)

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def width(self) -> int:
        return min((popcount(b) for b in self.blocks), default=0)

    @property
    def sizes(self) -> list[int]:
        return [popcount(b) for b in self.blocks]

    @property
    def union(self) -> int:
        m = 0
        for b in self.blocks:
            m |= b
        return m

    def failures(self) -> list[str]:
        out = []
        seen = 0
        for i, b in enumerate(self.blocks):
            if not b:
                out.append(f"block {i} is empty")
            if seen & b:
                out.append(f"block {i} overlaps an earlier block at vertex {lowest(seen & b)}")
            seen |= b
        if self.length < self.declared_length:
            out.append(f"length {self.length} < declared {self.declared_length}")
        if self.width < as_fraction(self.declared_width):
            out.append(f"width {self.width} < declared {self.declared_width}")
        return out


@dataclass(frozen=True)
class Comb:
    pairs: tuple[tuple[int, int], ...]  # (apex, block mask)

    @property
    def apexes(self) -> list[int]:
        return [a for a, _ in self.pairs]

    @property
    def blocks(self) -> list[int]:
        return [b for _, b in self.pairs]

    @property
    def width(self) -> int:
        return min((popcount(b) for _, b in self.pairs), default=0)


def comb_failures(g: Graph, apexes: Sequence[int], blocks: Sequence[int]) -> list[str]:
    out = []
    if len(apexes) != len(blocks):
        return [f"{len(apexes)} apexes for {len(blocks)} blocks"]
    if len(set(apexes)) != len(apexes):
        out.append("apexes are not distinct")
    apex_mask = mask_of(apexes)
    seen = 0
    for i, b in enumerate(blocks):
        if not b:
            out.append(f"comb block {i} is empty")
        if b & apex_mask:
            out.append(f"comb block {i} contains apex {lowest(b & apex_mask)}")
        if seen & b:
            out.append(f"comb block {i} overlaps an earlier block")
        seen |= b
    for i, a in enumerate(apexes):
        for j, b in enumerate(blocks):
            hit = g.adj[a] & b
            if i == j and hit != b:
                out.append(f"apex {a} misses vertex {lowest(b & ~hit)} of its block {i}")
            elif i != j and hit:
                out.append(f"apex {a} is adjacent to vertex {lowest(hit)} of block {j}")
    return out


def count_pairs(g: Graph, pattern: Graph, parts: Sequence[int]) -> tuple[int, int]:
    """(decided, wrong) pair counts of a layout, computed from scratch.

    Decided pairs are pairs of vertices lying in two different parts; wrong
    pairs are the adjacent ones among them whose parts are non-adjacent in
    the pattern.
    """
    decided = 0
    wrong = 0
    sizes = [popcount(p) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            decided += sizes[i] * sizes[j]
            if not pattern.has_edge(i, j):
                wrong += edges_between(g, parts[i], parts[j])
    return decided, wrong


def layout_failures(g: Graph, pattern: Graph, parts: Sequence[int], x,
                    decided: int | None = None, wrong: int | None = None) -> list[str]:
    x = as_fraction(x)
    out = []
    if pattern.n != len(parts):
        return [f"pattern has {pattern.n} vertices for {len(parts)} parts"]
    seen = 0
    for i, p in enumerate(parts):
        if not p:
            out.append(f"part {i} is empty")
        if seen & p:
            out.append(f"part {i} overlaps an earlier part")
        seen |= p
    for i, j in pattern.edges():
        if not is_complete_to(g, parts[i], parts[j]):
            out.append(f"pattern edge {i}-{j} but parts are not complete")
    true_decided, true_wrong = count_pairs(g, pattern, parts)
    if decided is not None and decided != true_decided:
        out.append(f"decided count {decided} != recount {true_decided}")
    if wrong is not None and wrong != true_wrong:
        out.append(f"wrong count {wrong} != recount {true_wrong}")
    if true_wrong * x.denominator > x.numerator * true_decided:
        out.append(f"wrong pairs {true_wrong} exceed {x} of decided {true_decided}")
    return out


# ---------------------------------------------------------------------------
# the certificate document


KINDS = (
    "restricted_subgraph",
    "sparse_subset",
    "hom_set",
    "anticomplete_pair",
    "sparse_pair",
    "blockade",
    "comb",
    "layout",
)

BLOCKADE_KINDS = ("pure", "complete", "anticomplete", "x_sparse", "semisparse",
                  "complete_or_anticomplete")


@dataclass(frozen=True)
class Claim:
    property: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"property": self.property, "params": self.params}


@dataclass(frozen=True)
class Certificate:
    kind: str
    lemma_id: str
    profile: dict
    blocks: tuple[tuple[int, ...], ...]
    claims: tuple[Claim, ...]
    graph_hash: str
    apexes: tuple[int, ...] = ()
    pattern_edges: tuple[tuple[int, int], ...] = ()
    version: int = VERSION

    def block_masks(self) -> list[int]:
        return [mask_of(b) for b in self.blocks]

    @property
    def vertex_set(self) -> int:
        """Union of all blocks."""
        m = 0
        for b in self.block_masks():
            m |= b
        return m

    def claim(self, name: str) -> Claim | None:
        for c in self.claims:
            if c.property == name:
                return c
        return None

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "lemma_id": self.lemma_id,
            "constants_profile": self.profile,
            "kind": self.kind,
            "blocks": [list(b) for b in self.blocks],
            "apexes": list(self.apexes),
            "pattern_edges": [list(e) for e in self.pattern_edges],
            "claims": [c.to_json() for c in self.claims],
            "graph_hash": self.graph_hash,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "Certificate":
        try:
            claims = tuple(Claim(c["property"], dict(c.get("params", {}))) for c in doc["claims"])
            return cls(
                kind=doc["kind"],
                lemma_id=doc["lemma_id"],
                profile=doc["constants_profile"],
                blocks=tuple(tuple(int(v) for v in b) for b in doc["blocks"]),
                claims=claims,
                graph_hash=doc["graph_hash"],
                apexes=tuple(int(a) for a in doc.get("apexes", [])),
                pattern_edges=tuple((int(i), int(j)) for i, j in doc.get("pattern_edges", [])),
                version=int(doc["version"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateStructureError(f"malformed certificate: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateStructureError(f"not JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise CertificateStructureError("certificate must be a JSON object")
        return cls.from_dict(doc)


def _sorted_block(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def _rel_tags(g: Graph, blocks: Sequence[int], x) -> list[list]:
    return [[i, j, tag.value] for (i, j), tag in sorted(classify_pairs(g, blocks, x).items())]


def make_certificate(
    g: Graph,
    kind: str,
    lemma_id: str,
    profile,
    blocks: Sequence[int],
    claims: Iterable[Claim],
    apexes: Sequence[int] = (),
    pattern_edges: Sequence[tuple[int, int]] = (),
) -> Certificate:
    if kind not in KINDS:
        raise ValueError(f"unknown certificate kind {kind!r}")
    prof = profile.serialised() if hasattr(profile, "serialised") else dict(profile)
    all_claims = [Claim("block_sizes", {"sizes": [popcount(b) for b in blocks]})]
    all_claims.extend(claims)
    return Certificate(
        kind=kind,
        lemma_id=lemma_id,
        profile=prof,
        blocks=tuple(_sorted_block(b) for b in blocks),
        claims=tuple(all_claims),
        graph_hash=graph_hash(g),
        apexes=tuple(apexes),
        pattern_edges=tuple(sorted((min(e), max(e)) for e in pattern_edges)),
    )


# convenience constructors; every numeric parameter is what was achieved


def restricted_certificate(g, s: int, eps, lemma_id, profile, target=None) -> Certificate:
    params = {"eps": format_rational(eps)}
    claims = [Claim("restricted", params)]
    if target is not None:
        claims.append(Claim("target_size", {"value": format_rational(target),
                                             "met": popcount(s) >= as_fraction(target)}))
    return make_certificate(g, "restricted_subgraph", lemma_id, profile, [s], claims)


def sparse_subset_certificate(g, s: int, y, lemma_id, profile) -> Certificate:
    return make_certificate(g, "sparse_subset", lemma_id, profile, [s],
                            [Claim("sparse", {"x": format_rational(y)})])


def hom_set_certificate(g, s: int, kind: str, lemma_id, profile) -> Certificate:
    if kind not in ("clique", "stable"):
        raise ValueError(kind)
    return make_certificate(g, "hom_set", lemma_id, profile, [s], [Claim(kind)])


def anticomplete_pair_certificate(g, x: int, y: int, lemma_id, profile) -> Certificate:
    return make_certificate(g, "anticomplete_pair", lemma_id, profile, [x, y],
                            [Claim("anticomplete")])


def sparse_pair_certificate(g, x: int, y: int, ratio, lemma_id, profile) -> Certificate:
    """``y`` is ``ratio``-sparse to ``x``."""
    return make_certificate(g, "sparse_pair", lemma_id, profile, [x, y],
                            [Claim("sparse_to", {"x": format_rational(ratio)})])


def blockade_certificate(g, blocks: Sequence[int], kind: str, lemma_id, profile,
                         x=None, declared_width=None) -> Certificate:
    if kind not in BLOCKADE_KINDS:
        raise ValueError(f"unknown blockade kind {kind!r}")
    width = min(popcount(b) for b in blocks)
    declared_width = width if declared_width is None else as_fraction(declared_width)
    params = {} if x is None else {"x": format_rational(x)}
    tag_x = Fraction(0) if x is None else as_fraction(x)
    claims = [
        Claim(kind, params),
        Claim("length_at_least", {"value": len(blocks)}),
        Claim("width_at_least", {"value": format_rational(declared_width)}),
        Claim("relations", {"x": format_rational(tag_x), "tags": _rel_tags(g, blocks, tag_x)}),
    ]
    return make_certificate(g, "blockade", lemma_id, profile, blocks, claims)


def comb_certificate(g, apexes: Sequence[int], blocks: Sequence[int], lemma_id, profile,
                     declared_width=None) -> Certificate:
    width = min(popcount(b) for b in blocks)
    declared_width = width if declared_width is None else as_fraction(declared_width)
    claims = [Claim("comb"), Claim("width_at_least", {"value": format_rational(declared_width)})]
    return make_certificate(g, "comb", lemma_id, profile, blocks, claims, apexes=apexes)


def layout_certificate(g, pattern: Graph, parts: Sequence[int], x, decided: int, wrong: int,
                       lemma_id, profile) -> Certificate:
    claims = [Claim("layout", {"x": format_rational(x), "decided": decided, "wrong": wrong})]
    return make_certificate(g, "layout", lemma_id, profile, parts, claims,
                            pattern_edges=pattern.edges())


# ---------------------------------------------------------------------------
# verification


@dataclass
class Verdict:
    accepted: bool
    failures: list[str]

    def __bool__(self) -> bool:
        return self.accepted

    def report(self) -> str:
        if self.accepted:
            return "ACCEPTED"
        return "REJECTED\n" + "\n".join(f"  - {f}" for f in self.failures)


def _check_structure(c: Certificate, g: Graph) -> None:
    if c.version != VERSION:
        raise CertificateStructureError(f"unsupported certificate version {c.version}")
    if c.kind not in KINDS:
        raise CertificateStructureError(f"unknown kind {c.kind!r}")
    if c.graph_hash != graph_hash(g):
        raise CertificateStructureError("graph hash mismatch: certificate is for another graph")
    for i, block in enumerate(c.blocks):
        for v in block:
            if not 0 <= v < g.n:
                raise CertificateStructureError(f"block {i} names vertex {v} outside [0, {g.n})")
        if len(set(block)) != len(block):
            raise CertificateStructureError(f"block {i} repeats a vertex")
    for a in c.apexes:
        if not 0 <= a < g.n:
            raise CertificateStructureError(f"apex {a} outside [0, {g.n})")
    for i, j in c.pattern_edges:
        if not (0 <= i < len(c.blocks) and 0 <= j < len(c.blocks)) or i == j:
            raise CertificateStructureError(f"pattern edge {i}-{j} is invalid")


def _param_fraction(claim: Claim, key: str) -> Fraction:
    try:
        return parse_rational(str(claim.params[key]))
    except (KeyError, ValueError) as exc:
        raise CertificateStructureError(f"claim {claim.property!r} lacks a rational {key!r}") from exc


def _pairs(blocks):
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            yield i, j


def _check_claim(claim: Claim, c: Certificate, g: Graph, blocks: list[int]) -> list[str]:
    p = claim.property
    out: list[str] = []
    first = blocks[0] if blocks else 0
    if p == "block_sizes":
        sizes = [popcount(b) for b in blocks]
        if list(claim.params.get("sizes", [])) != sizes:
            out.append(f"block_sizes: claimed {claim.params.get('sizes')} but found {sizes}")
    elif p == "length_at_least":
        if len(blocks) < int(claim.params["value"]):
            out.append(f"length_at_least: {len(blocks)} < {claim.params['value']}")
    elif p == "width_at_least":
        w = _param_fraction(claim, "value")
        for i, b in enumerate(blocks):
            if popcount(b) < w:
                out.append(f"width_at_least: block {i} has {popcount(b)} < {w} vertices")
    elif p == "restricted":
        eps = _param_fraction(claim, "eps")
        if not first or not is_restricted(g, eps, first):
            out.append(f"restricted: neither side of the subgraph is {eps}-sparse")
    elif p == "target_size":
        pass  # informational; the achieved size is recorded in block_sizes
    elif p == "sparse":
        x = _param_fraction(claim, "x")
        if not first or not is_x_sparse(g, x, first):
            out.append(f"sparse: subgraph is not {x}-sparse")
    elif p == "clique":
        for v in bits(first):
            miss = first & ~g.adj[v] & ~(1 << v)
            if miss:
                out.append(f"clique: non-adjacent pair ({v}, {lowest(miss)})")
                break
    elif p == "stable":
        for v in bits(first):
            hit = first & g.adj[v]
            if hit:
                out.append(f"stable: adjacent pair ({v}, {lowest(hit)})")
                break
    elif p == "anticomplete":
        for i, j in _pairs(blocks):
            if not is_anticomplete_to(g, blocks[i], blocks[j]):
                out.append(f"anticomplete: blocks {i} and {j} have an edge between them")
    elif p == "complete":
        for i, j in _pairs(blocks):
            if not is_complete_to(g, blocks[i], blocks[j]):
                out.append(f"complete: blocks {i} and {j} have a non-edge between them")
    elif p == "pure":
        for i, j in _pairs(blocks):
            if not (is_complete_to(g, blocks[i], blocks[j])
                    or is_anticomplete_to(g, blocks[i], blocks[j])):
                out.append(f"pure: blocks {i} and {j} are neither complete nor anticomplete")
    elif p == "complete_or_anticomplete":
        tags = {classify_pair(g, blocks[i], blocks[j], 0) for i, j in _pairs(blocks)}
        if not (tags <= {Relation.COMPLETE} or tags <= {Relation.ANTICOMPLETE}):
            out.append("complete_or_anticomplete: pairs are not uniformly complete or anticomplete")
    elif p in ("x_sparse", "sparse_to"):
        x = _param_fraction(claim, "x")
        for i, j in _pairs(blocks):
            if blocks[i] & blocks[j]:
                continue  # reported by the disjointness check
            if not is_sparse_to(g, blocks[j], blocks[i], x):
                out.append(f"{p}: block {j} is not {x}-sparse to block {i}")
    elif p == "semisparse":
        x = _param_fraction(claim, "x")
        for i, j in _pairs(blocks):
            if blocks[i] & blocks[j]:
                continue
            tag = classify_pair(g, blocks[i], blocks[j], x)
            if not (tag == Relation.COMPLETE or _weakly(tag)):
                out.append(f"semisparse: blocks {i} and {j} are neither complete nor weakly {x}-sparse")
    elif p == "relations":
        x = _param_fraction(claim, "x")
        try:
            stated = {(int(i), int(j)): Relation(t) for i, j, t in claim.params["tags"]}
        except (KeyError, ValueError, TypeError) as exc:
            raise CertificateStructureError(f"bad relation tags: {exc!r}") from exc
        expected = set(_pairs(blocks))
        if set(stated) != expected:
            out.append("relations: tag matrix does not cover exactly the block pairs")
        for (i, j), tag in sorted(stated.items()):
            if (i, j) not in expected or blocks[i] & blocks[j]:
                continue
            actual = classify_pair(g, blocks[i], blocks[j], x)
            if actual != tag:
                out.append(f"relations: pair ({i}, {j}) tagged {tag.value} but is {actual.value}")
    elif p == "comb":
        out.extend(f"comb: {f}" for f in comb_failures(g, list(c.apexes), blocks))
    elif p == "layout":
        x = _param_fraction(claim, "x")
        pattern = Graph.from_edges(len(blocks), c.pattern_edges)
        out.extend(
            f"layout: {f}"
            for f in layout_failures(g, pattern, blocks, x,
                                     int(claim.params["decided"]), int(claim.params["wrong"]))
        )
    else:
        out.append(f"unknown claim {p!r}")
    return out


_REQUIRED = {
    "restricted_subgraph": ("restricted",),
    "sparse_subset": ("sparse",),
    "anticomplete_pair": ("anticomplete",),
    "sparse_pair": ("sparse_to",),
    "comb": ("comb",),
    "layout": ("layout",),
}

_SINGLE_BLOCK = ("restricted_subgraph", "sparse_subset", "hom_set")


def verify_certificate(c: Certificate, g: Graph) -> Verdict:
    """Re-derive every claim of ``c`` from ``g``.

    Raises ``CertificateStructureError`` for malformed input; property
    failures are listed in the returned verdict instead.
    """
    _check_structure(c, g)
    blocks = c.block_masks()
    failures: list[str] = []
    if not blocks:
        failures.append("certificate has no blocks")
    if c.kind in _SINGLE_BLOCK and len(blocks) != 1:
        failures.append(f"{c.kind} must carry exactly one block")
    if c.kind in ("anticomplete_pair", "sparse_pair") and len(blocks) != 2:
        failures.append(f"{c.kind} must carry exactly two blocks")
    b = Blockade(tuple(blocks))
    failures.extend(f"disjointness: {f}" for f in b.failures())
    names = {cl.property for cl in c.claims}
    for name in _REQUIRED.get(c.kind, ()):
        if name not in names:
            failures.append(f"missing claim {name!r}")
    if c.kind == "hom_set" and not names & {"clique", "stable"}:
        failures.append("hom_set must claim clique or stable")
    if c.kind == "blockade" and not names & set(BLOCKADE_KINDS):
        failures.append("blockade certificate names no blockade kind")
    if "block_sizes" not in names:
        failures.append("missing claim 'block_sizes'")
    if blocks:
        for claim in c.claims:
            failures.extend(_check_claim(claim, c, g, blocks))
    return Verdict(not failures, failures)
