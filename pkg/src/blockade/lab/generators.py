"""Seeded generators for hereditary graph families.

Every emitted graph is checked against its class with ``find_induced_copy``
before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import PreconditionViolated, RejectionBudgetExhausted
from ..graph import MAX_VERTICES, Graph, complement, mask_of
from ..patterns import HOUSE, P5, find_induced_copy
from .catalogue import load_catalogue

COGRAPH = "cograph"
SUBSTITUTION = "substitution"
SPARSE_RANDOM = "sparse-random-filtered"
FAMILIES = (COGRAPH, SUBSTITUTION, SPARSE_RANDOM)

#: Size cap for generated graphs.
MAX_GENERATED = 1024

#: Attempts before the filtered random family gives up.
REJECTION_BUDGET = 200

# patterns each base family excludes; the complement flag swaps P5 and house
_EXCLUDES = {
    COGRAPH: ("p5", "house"),
    SUBSTITUTION: ("p5",),
    SPARSE_RANDOM: ("house",),
}
_PATTERN = {"p5": P5, "house": HOUSE}
_SWAP = {"p5": "house", "house": "p5"}


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    seed: int = 0
    complement: bool = False
    # cograph: probability of a join node; sparse-random-filtered: mean degree
    density: float | None = None
    max_branch: int = 4
    params: dict = field(default_factory=dict, compare=False)

    def excludes(self) -> tuple[str, ...]:
        base = _EXCLUDES[self.family]
        return tuple(sorted(_SWAP[p] for p in base)) if self.complement else base


def _rng(spec: GeneratorSpec) -> np.random.Generator:
    key = FAMILIES.index(spec.family)
    return np.random.Generator(np.random.Philox(key=[spec.seed, key]))


def _random_sizes(rng: np.random.Generator, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` positive sizes."""
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False))
    bounds = [0, *cuts.tolist(), total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def _join(rows: list[int], a: int, b: int) -> None:
    for v in range(len(rows)):
        if a >> v & 1:
            rows[v] |= b
        elif b >> v & 1:
            rows[v] |= a


def _cograph_rows(rng, n: int, p_join: float, max_branch: int) -> list[int]:
    rows = [0] * n
    stack = [list(range(n))]
    while stack:
        verts = stack.pop()
        if len(verts) == 1:
            continue
        k = int(rng.integers(2, min(max_branch, len(verts)) + 1))
        sizes = _random_sizes(rng, len(verts), k)
        groups, start = [], 0
        for s in sizes:
            groups.append(verts[start:start + s])
            start += s
        if rng.random() < p_join:
            for i in range(k):
                for j in range(i + 1, k):
                    _join(rows, mask_of(groups[i]), mask_of(groups[j]))
        stack.extend(groups)
    return rows


def _substitution_rows(rng, n: int, max_branch: int) -> list[int]:
    catalogue = [q for q in load_catalogue() if q.n >= 2]
    rows = [0] * n
    stack = [list(range(n))]
    while stack:
        verts = stack.pop()
        if len(verts) == 1:
            continue
        fitting = [q for q in catalogue if q.n <= len(verts)]
        q = fitting[int(rng.integers(len(fitting)))]
        sizes = _random_sizes(rng, len(verts), q.n)
        groups, start = [], 0
        for s in sizes:
            groups.append(verts[start:start + s])
            start += s
        for i, j in q.edges():
            _join(rows, mask_of(groups[i]), mask_of(groups[j]))
        stack.extend(groups)
    return rows


def _sparse_random_rows(rng, n: int, mean_degree: float) -> list[int]:
    p = min(1.0, mean_degree / max(1, n - 1))
    upper = np.triu(rng.random((n, n)) < p, k=1)
    rows = [0] * n
    for u, v in zip(*np.nonzero(upper)):
        rows[u] |= 1 << int(v)
        rows[v] |= 1 << int(u)
    return rows


def generate(spec: GeneratorSpec) -> Graph:
    """A graph from ``spec``'s family, verified free of every excluded pattern."""
    if spec.family not in FAMILIES:
        raise PreconditionViolated(f"unknown family {spec.family!r}; known: {FAMILIES}")
    if not 1 <= spec.n <= min(MAX_GENERATED, MAX_VERTICES):
        raise PreconditionViolated(f"n = {spec.n} outside [1, {MAX_GENERATED}]")
    rng = _rng(spec)
    attempts = REJECTION_BUDGET if spec.family == SPARSE_RANDOM else 1
    for _ in range(attempts):
        if spec.family == COGRAPH:
            p = 0.5 if spec.density is None else spec.density
            rows = _cograph_rows(rng, spec.n, p, spec.max_branch)
        elif spec.family == SUBSTITUTION:
            rows = _substitution_rows(rng, spec.n, spec.max_branch)
        else:
            deg = 2.0 if spec.density is None else spec.density
            rows = _sparse_random_rows(rng, spec.n, deg)
        g = Graph(spec.n, rows)
        if spec.complement:
            g = complement(g)
        bad = [p for p in spec.excludes() if find_induced_copy(g, _PATTERN[p]) is not None]
        if not bad:
            return g
        if spec.family != SPARSE_RANDOM:
            raise RuntimeError(f"{spec.family} generator produced an induced {bad[0]}")
    raise RejectionBudgetExhausted(
        f"no {spec.excludes()}-free sample in {REJECTION_BUDGET} attempts for {spec}"
    )
