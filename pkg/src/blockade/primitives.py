"""Building blocks: complete blockades from anticomponents, covering sets,
combs, anticomplete pairs in sparse P5-free graphs, and a best-effort
search for large restricted induced subgraphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .certificates import Blockade, comb_failures
from .errors import InternalInvariantViolated, PreconditionViolated, DegenerateInput
from .graph import (
    Graph,
    anticomponents,
    as_fraction,
    bits,
    co_sparse_core,
    components,
    is_anticomplete_to,
    is_co_sparse,
    is_restricted,
    is_x_sparse,
    lowest,
    popcount,
    sparse_core,
)
from .patterns import P5, find_induced_copy

ETA = Fraction(1, 32)

#: Comb search is exhaustive over apex subsets at or below this many apexes.
EXHAUSTIVE_COMB_LIMIT = 12

#: Restricted-subgraph search is exhaustive at or below this many vertices.
EXHAUSTIVE_RESTRICTED_LIMIT = 18

RANDOM_RETRIES = 64


def _order_parts(parts):
    return sorted(parts, key=lowest)


# ---------------------------------------------------------------------------
# complete blockades from small anticomponents


def complete_blockade_from_anticomponents(g: Graph, k: int, within: int | None = None) -> Blockade:
    """A complete blockade of length at least ``k`` and width at least ``|W|/k^2``.

    Requires every anticomponent of ``g[W]`` to have fewer than ``|W|/k``
    vertices.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    w = g.full if within is None else within
    n = popcount(w)
    parts = anticomponents(g, w)
    for p in parts:
        if popcount(p) * k >= n:
            raise PreconditionViolated(
                f"anticomponent of size {popcount(p)} is not below |G|/k = {Fraction(n, k)}",
                witness=p,
            )
    # merge the two smallest parts while the union stays below |W|/k
    parts = sorted(parts, key=lambda p: (popcount(p), lowest(p)))
    while len(parts) >= 2 and (popcount(parts[0]) + popcount(parts[1])) * k < n:
        merged = parts[0] | parts[1]
        parts = sorted(parts[2:] + [merged], key=lambda p: (popcount(p), lowest(p)))
    blocks = _order_parts(parts[1:])
    return Blockade(tuple(blocks), declared_length=k, declared_width=Fraction(n, k * k))


# ---------------------------------------------------------------------------
# covering sets


def _check_cover_precondition(g: Graph, a: int, b: int, x: Fraction) -> None:
    if a & b:
        raise PreconditionViolated("a and b must be disjoint", witness=lowest(a & b))
    size = popcount(a)
    for v in bits(b):
        if popcount(g.adj[v] & a) * x.denominator < x.numerator * size:
            raise PreconditionViolated(
                f"vertex {v} has fewer than {x}*|A| neighbours in A", witness=v
            )


def _covered(g: Graph, chosen: int, b: int) -> int:
    out = 0
    for v in bits(chosen):
        out |= g.adj[v] & b
    return out


def _greedy_cover(g: Graph, a: int, b: int, cap: int) -> int:
    chosen = 0
    uncovered = b
    while uncovered and popcount(chosen) < cap:
        best, gain = -1, 0
        for v in bits(a & ~chosen):
            c = popcount(g.adj[v] & uncovered)
            if c > gain:
                best, gain = v, c
        if best < 0:
            break
        chosen |= 1 << best
        uncovered &= ~g.adj[best]
    return chosen


def covering_set(g: Graph, a: int, b: int, x, seed: int | None = None) -> int:
    """A small subset of ``a`` with a neighbour of at least half of ``b``.

    Deterministic greedy max-coverage by default (at most ``ceil(1/x)``
    vertices).  With a ``seed``, samples ``floor(1/x)`` vertices uniformly
    with replacement, retrying up to 64 times before falling back to greedy.
    """
    x = as_fraction(x)
    if not 0 < x < Fraction(1, 2):
        raise PreconditionViolated(f"x = {x} must lie in (0, 1/2)")
    _check_cover_precondition(g, a, b, x)
    need = popcount(b)  # twice the covered count must reach |b|
    if seed is not None:
        k = math.floor(1 / x)
        members = np.array(list(bits(a)), dtype=np.int64)
        if len(members) <= k:
            return a
        rng = np.random.Generator(np.random.Philox(seed))
        for _ in range(RANDOM_RETRIES):
            picks = rng.choice(members, size=k, replace=True)
            chosen = 0
            for v in picks:
                chosen |= 1 << int(v)
            if 2 * popcount(_covered(g, chosen, b)) >= need:
                return chosen
    return _greedy_cover(g, a, b, math.ceil(1 / x))


# ---------------------------------------------------------------------------
# combs


@dataclass(frozen=True)
class SmallCover:
    covered: int


@dataclass(frozen=True)
class CombFound:
    apexes: tuple[int, ...]
    blocks: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.apexes)

    @property
    def width(self) -> int:
        return min(popcount(b) for b in self.blocks)


def _private_sets(g: Graph, apexes, b: int) -> list[int]:
    nbhds = [g.adj[a] & b for a in apexes]
    out = []
    for i, nb in enumerate(nbhds):
        others = 0
        for j, other in enumerate(nbhds):
            if j != i:
                others |= other
        out.append(nb & ~others)
    return out


def comb_is_wide(blocks, size_b: int) -> bool:
    """Every block has at least ``|B|/k^2`` vertices."""
    k = len(blocks)
    return bool(blocks) and all(popcount(p) * k * k >= size_b for p in blocks)


def small_cover_bound_holds(covered: int, size_b: int, delta: Fraction) -> bool:
    """``covered <= 20*sqrt(|B|*delta)``, compared after squaring."""
    return covered * covered * delta.denominator <= 400 * size_b * delta.numerator


def _better(cand, best) -> bool:
    # prefer longer combs, then wider ones, then lexicographically smaller apexes
    if best is None:
        return True
    ck, bk = len(cand[0]), len(best[0])
    if ck != bk:
        return ck > bk
    cw = min(popcount(p) for p in cand[1])
    bw = min(popcount(p) for p in best[1])
    if cw != bw:
        return cw > bw
    return cand[0] < best[0]


def exhaustive_comb(g: Graph, a: int, b: int):
    """Best comb over all apex subsets of ``a`` (private neighbourhoods as blocks)."""
    size_b = popcount(b)
    cands = [v for v in bits(a) if g.adj[v] & b]
    best = None
    for k in range(1, len(cands) + 1):
        for apexes in combinations(cands, k):
            privates = _private_sets(g, apexes, b)
            if comb_is_wide(privates, size_b) and _better((apexes, privates), best):
                best = (apexes, privates)
    return best


def _greedy_comb(g: Graph, a: int, b: int, score):
    size_b = popcount(b)
    chosen: list[int] = []
    covered = 0
    best = None
    pool = [v for v in bits(a) if g.adj[v] & b]
    while pool:
        pick, pick_score = None, None
        for v in pool:
            s = score(v, chosen, covered)
            if s is not None and (pick_score is None or s > pick_score):
                pick, pick_score = v, s
        if pick is None:
            break
        chosen.append(pick)
        pool.remove(pick)
        covered |= g.adj[pick] & b
        privates = _private_sets(g, chosen, b)
        k = len(chosen)
        if comb_is_wide(privates, size_b):
            if _better((tuple(chosen), privates), best):
                best = (tuple(chosen), privates)
        elif min(popcount(p) for p in privates) * (k + 1) ** 2 < size_b and best is not None:
            break
    return best


def _peeling_comb(g: Graph, a: int, b: int):
    # pick the apex with the most still-private neighbours
    def score(v, chosen, covered):
        c = popcount(g.adj[v] & b & ~covered)
        return (c, -v) if c else None

    return _greedy_comb(g, a, b, score)


def _balanced_comb(g: Graph, a: int, b: int):
    # pick the apex that keeps the smallest private block largest
    def score(v, chosen, covered):
        if not g.adj[v] & b & ~covered:
            return None
        privates = _private_sets(g, chosen + [v], b)
        return (min(popcount(p) for p in privates), -v)

    return _greedy_comb(g, a, b, score)


def comb_or_sparse_cover(g: Graph, a: int, b: int, delta) -> SmallCover | CombFound:
    """Either a ``(k, |B|/k^2)``-comb with apexes in ``a`` and blocks in ``b``,
    or few vertices of ``b`` have a neighbour in ``a``.

    A comb is returned whenever the search finds one; the cover arm is the
    fallback.
    """
    delta = as_fraction(delta)
    if delta <= 0:
        raise PreconditionViolated("delta must be positive")
    if not a or not b:
        raise PreconditionViolated("a and b must be nonempty")
    if a & b:
        raise PreconditionViolated("a and b must be disjoint", witness=lowest(a & b))
    for v in bits(a):
        if popcount(g.adj[v] & b) * delta.denominator > delta.numerator:
            raise PreconditionViolated(f"vertex {v} has more than {delta} neighbours in b", witness=v)
    size_b = popcount(b)
    if popcount(a) <= EXHAUSTIVE_COMB_LIMIT:
        best = exhaustive_comb(g, a, b)
    else:
        best = _peeling_comb(g, a, b)
    if best is None:
        best = _balanced_comb(g, a, b) if popcount(a) > EXHAUSTIVE_COMB_LIMIT else None
    if best is not None:
        apexes, privates = best
        if comb_failures(g, list(apexes), privates) or not comb_is_wide(privates, size_b):
            raise InternalInvariantViolated("constructed comb fails its own check", witness=best)
        return CombFound(tuple(apexes), tuple(privates))
    covered = _covered(g, a, b)
    if small_cover_bound_holds(popcount(covered), size_b, delta):
        return SmallCover(covered)
    raise InternalInvariantViolated(
        "neither a comb nor a small cover found", witness=(a, b, delta)
    )


# ---------------------------------------------------------------------------
# anticomplete pairs in sparse P5-free graphs


def _split(g: Graph, w: int, target: Fraction) -> tuple[int, int] | None:
    """Anticomplete pair inside ``w`` made of unions of components, both sides >= target."""
    parts = sorted(components(g, w), key=lambda p: (popcount(p), lowest(p)))
    if len(parts) < 2:
        return None
    total = popcount(w)
    acc = 0
    for p in parts[:-1]:
        acc |= p
        size = popcount(acc)
        if size >= target:
            if total - size >= target:
                return acc, w & ~acc
            break
    big = parts[-1]
    if popcount(big) >= target and total - popcount(big) >= target:
        return w & ~big, big
    return None


def _pair_ok(g: Graph, x: int, y: int, target: Fraction) -> bool:
    return (x and y and not x & y and popcount(x) >= target and popcount(y) >= target
            and is_anticomplete_to(g, x, y))


def anticomplete_pair_sparse(g: Graph, eta=ETA, within: int | None = None,
                             check_free: bool = True) -> Blockade:
    """An anticomplete pair of sets, each with at least ``eta*|W|`` vertices.

    ``g[W]`` must be ``eta``-sparse and P5-free with ``|W| >= 1/eta``.  The
    candidate splits are tried in the order they appear in the
    contradiction argument; the P5 it would otherwise produce is a bug
    detector.
    """
    eta = as_fraction(eta)
    w = g.full if within is None else within
    n = popcount(w)
    if n * eta < 1:
        raise DegenerateInput(f"need at least {math.ceil(1 / eta)} vertices, got {n}")
    if not is_x_sparse(g, eta, w):
        raise PreconditionViolated(f"graph is not {eta}-sparse")
    if check_free:
        copy = find_induced_copy(g, P5, w)
        if copy is not None:
            raise PreconditionViolated("graph contains an induced P5", witness=copy)
    target = eta * n

    def done(pair):
        x, y = pair
        if not _pair_ok(g, x, y, target):
            raise InternalInvariantViolated("split failed its own check", witness=pair)
        x, y = sorted((x, y), key=lowest)
        return Blockade((x, y), declared_length=2, declared_width=target)

    pair = _split(g, w, target)
    if pair:
        return done(pair)
    big = max(components(g, w), key=popcount)
    v = lowest(big)
    nbrs = g.adj[v] & big
    f_prime = big & ~nbrs & ~(1 << v)
    pair = _split(g, f_prime, target)
    if pair:
        return done(pair)
    if f_prime:
        j = max(components(g, f_prime), key=popcount)
        rest = f_prime & ~j
        # j is a component of f_prime, hence anticomplete to the rest of it
        if _pair_ok(g, j, rest, target):
            return done((j, rest))
        for u in bits(nbrs):
            touch = g.adj[u] & j
            if not touch:
                continue
            wv = lowest(touch)
            inner = j & ~touch
            pair = _split(g, inner, target)
            if pair:
                return done(pair)
            if inner:
                jp = max(components(g, inner), key=popcount)
                if _pair_ok(g, jp, inner & ~jp, target):
                    return done((jp, inner & ~jp))
                # the contradiction: w mixed on J' gives a P5
                hit = g.adj[wv] & jp
                if hit and hit != jp:
                    for z in bits(hit):
                        far = g.adj[z] & jp & ~g.adj[wv]
                        if far:
                            raise InternalInvariantViolated(
                                "argument produced an induced P5",
                                witness=(v, u, wv, z, lowest(far)),
                            )
            break
    # fallback: anticomponent pairs of non-neighbourhoods
    for vv in bits(w):
        outside = w & ~g.adj[vv] & ~(1 << vv)
        pair = _split(g, outside, target)
        if pair:
            return done(pair)
    raise InternalInvariantViolated("no anticomplete pair found")


# ---------------------------------------------------------------------------
# restricted induced subgraphs


def _exhaustive_restricted(g: Graph, eps: Fraction, w: int) -> int:
    order = list(bits(w))
    m = len(order)
    masks = np.arange(1 << m, dtype=np.uint32)
    size = np.bitwise_count(masks).astype(np.int64)
    maxdeg = np.zeros(1 << m, dtype=np.int64)
    maxcodeg = np.zeros(1 << m, dtype=np.int64)
    for i, v in enumerate(order):
        row = 0
        for j, u in enumerate(order):
            if g.adj[v] >> u & 1:
                row |= 1 << j
        member = (masks >> np.uint32(i)) & np.uint32(1)
        deg = np.bitwise_count(masks & np.uint32(row)).astype(np.int64)
        codeg = size - 1 - deg
        inside = member.astype(bool)
        np.maximum(maxdeg, np.where(inside, deg, 0), out=maxdeg)
        np.maximum(maxcodeg, np.where(inside, codeg, 0), out=maxcodeg)
    # floor(eps*s) per size keeps the comparison exact in machine integers
    thr = np.array([eps.numerator * k // eps.denominator for k in range(m + 1)], dtype=np.int64)
    ok = (maxdeg <= thr[size]) | (maxcodeg <= thr[size])
    score = np.where(ok, size, -1)
    best = int(np.argmax(score))  # first maximum: the smallest mask
    return sum(1 << order[j] for j in range(m) if best >> j & 1)


def _split_search(g: Graph, eps: Fraction, w: int) -> int:
    # repeatedly move into the larger side around a max-degree vertex of the
    # denser of g[w] and its complement
    while w and not is_restricted(g, eps, w):
        size = popcount(w)
        members = list(bits(w))
        degs = [popcount(g.adj[v] & w) for v in members]
        edges2 = sum(degs)
        dense = 2 * edges2 > size * (size - 1)
        if dense:
            key = [size - 1 - d for d in degs]
        else:
            key = degs
        top = max(range(len(members)), key=lambda i: (key[i], -members[i]))
        v = members[top]
        nb = g.adj[v] & w
        non = w & ~nb & ~(1 << v)
        w = nb if popcount(nb) >= popcount(non) else non
    return w


def rodl_restricted_subgraph(g: Graph, eps, target=None, within: int | None = None) -> int:
    """A vertex set ``S`` with ``g[S]`` eps-restricted, as large as the search finds.

    Exhaustive for at most 18 vertices; otherwise the best of peeling in
    ``g``, peeling in the complement, and density splitting.  ``target`` is
    advisory: the search stops early once it is met.
    """
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise PreconditionViolated(f"eps = {eps} must lie in (0, 1/2)")
    w = g.full if within is None else within
    if not w:
        return 0
    if is_restricted(g, eps, w):
        return w
    if popcount(w) <= EXHAUSTIVE_RESTRICTED_LIMIT:
        s = _exhaustive_restricted(g, eps, w)
    else:
        cands = [sparse_core(g, eps, w), co_sparse_core(g, eps, w)]
        if target is None or max(popcount(c) for c in cands) < target:
            cands.append(_split_search(g, eps, w))
        s = max(cands, key=lambda c: (popcount(c), -lowest(c) if c else 0))
    if not s:
        s = 1 << lowest(w)
    if not is_restricted(g, eps, s):
        raise InternalInvariantViolated("restricted search returned an unrestricted set", witness=s)
    return s


def restricted_side(g: Graph, eps, s: int) -> str:
    """``"sparse"`` if ``g[s]`` is eps-sparse, else ``"dense"`` (complement eps-sparse)."""
    if is_x_sparse(g, eps, s):
        return "sparse"
    if is_co_sparse(g, eps, s):
        return "dense"
    raise PreconditionViolated("set is not restricted")
