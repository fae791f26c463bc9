"""Acceptance suite: one PASS/FAIL line per primary criterion.

Run with ``pytest tests/test_acceptance.py -v``.  Set ``BLOCKADE_FULL_RECOGNITION=1``
to extend the recognition check to every labelled graph on 7 vertices (slow).
"""

import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

import networkx as nx
import pytest

from blockade.certificates import Blockade, comb_failures, verify_certificate
from blockade.errors import DegenerateInput, InternalInvariantViolated, ScaleShortfall
from blockade.graph import (
    Graph,
    anticomponents,
    components,
    is_anticomplete_to,
    is_complete_to,
    is_x_sparse,
    popcount,
)
from blockade.lab.generators import COGRAPH, SPARSE_RANDOM, SUBSTITUTION, GeneratorSpec, generate
from blockade.lab.harness import run_instance
from blockade.lab.oracles import (
    brute_best_restricted,
    brute_comb_exists,
    brute_max_hom,
    copy_table,
    labelled_graph,
)
from blockade.patterns import PATTERNS, find_induced_copy
from blockade.primitives import (
    CombFound,
    SmallCover,
    anticomplete_pair_sparse,
    comb_is_wide,
    comb_or_sparse_cover,
    complete_blockade_from_anticomponents,
    covering_set,
    small_cover_bound_holds,
)
from blockade.profile import get_profile
from blockade.round1 import RefineReport, epsone_blockade
from blockade.round2 import (
    BlocksReport,
    CompleteOrAnticompleteBlockade,
    blocks_extract,
    cograph_clique_or_stable,
    eh_extract,
    polynomial_rodl,
)

PROFILE = get_profile("demo-small")

# house-free families used for corpus runs
HOUSE_FREE = (
    dict(family=COGRAPH),
    dict(family=SUBSTITUTION, complement=True),
    dict(family=SPARSE_RANDOM),
)

#: Wall-clock budget for the soundness run, in seconds.
SOUNDNESS_BUDGET = 600

#: Share of quality instances reaching half the optimum on the first recorded run.
QUALITY_BASELINE = Fraction(200, 200)

#: Substitution-family eh exponents on the first recorded run (report-only).
SUBSTITUTION_BASELINE = {64: 0.666667, 128: 0.686765, 256: 0.665241, 512: 0.678725}


@pytest.fixture
def report(capsys):
    def emit(name: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail

    return emit


def corpus_spec(i: int, n: int, seed: int) -> GeneratorSpec:
    return GeneratorSpec(n=n, seed=seed, **HOUSE_FREE[i % len(HOUSE_FREE)])


def test_certificate_soundness(report):
    rng = random.Random(2026)
    start = time.perf_counter()
    runs = accepted = 0
    for i in range(1000):
        g = generate(corpus_spec(i, rng.randint(32, 512), i))
        for out, lemma in ((polynomial_rodl(g, Fraction(1, 4), PROFILE, seed=i), "polynomial_rodl"),
                           (eh_extract(g, PROFILE, seed=i), "eh_extract")):
            runs += 1
            accepted += verify_certificate(out.certify(g, PROFILE, lemma), g).accepted
    elapsed = time.perf_counter() - start
    report("certificate soundness", accepted == runs and elapsed < SOUNDNESS_BUDGET,
           f"{accepted}/{runs} certificates accepted in {elapsed:.0f}s (budget {SOUNDNESS_BUDGET}s)")


def test_recognition_equivalence(report):
    mismatches = checked = 0
    tables = {}
    for n in range(0, 8):
        for name, h in PATTERNS.items():
            tables[n, name] = copy_table(n, h)
    full = os.environ.get("BLOCKADE_FULL_RECOGNITION") == "1"
    for n in range(0, 7 if not full else 8):
        for code in range(1 << (n * (n - 1) // 2)):
            g = labelled_graph(n, code)
            for name, h in PATTERNS.items():
                checked += 1
                mismatches += (find_induced_copy(g, h) is not None) != bool(tables[n, name][code])
    classes = 0
    if not full:
        # every isomorphism class on 7 vertices, each under several labellings
        rng = random.Random(7)
        pairs = [(u, v) for u in range(7) for v in range(u + 1, 7)]
        for atlas in nx.graph_atlas_g():
            if atlas.number_of_nodes() != 7:
                continue
            classes += 1
            for _ in range(4):
                perm = list(range(7))
                rng.shuffle(perm)
                edges = {tuple(sorted((perm[u], perm[v]))) for u, v in atlas.edges()}
                code = sum(1 << i for i, p in enumerate(pairs) if p in edges)
                g = labelled_graph(7, code)
                for name, h in PATTERNS.items():
                    checked += 1
                    mismatches += (find_induced_copy(g, h) is not None) != bool(tables[7, name][code])
    scope = "all labelled graphs n<=7" if full else f"all labelled graphs n<=6, {classes} classes n=7"
    report("recognition equivalence", mismatches == 0 and (full or classes == 1044),
           f"{mismatches} mismatches over {checked} checks ({scope})")


def joined_parts(rng: random.Random, n: int, k: int) -> Graph:
    """Join of random parts, each below n/k, with random edges inside each part."""
    cap = math.ceil(n / k) - 1
    sizes = []
    while sum(sizes) < n:
        sizes.append(min(rng.randint(1, cap), n - sum(sizes)))
    edges, start, parts = [], 0, []
    for s in sizes:
        part = list(range(start, start + s))
        parts.append(part)
        edges += [(u, v) for i, u in enumerate(part) for v in part[i + 1:] if rng.random() < 0.3]
        start += s
    for i, p in enumerate(parts):
        for q in parts[i + 1:]:
            edges += [(u, v) for u in p for v in q]
    return Graph.from_edges(n, edges)


def test_complete_blockade_lemma(report):
    rng = random.Random(41)
    good = 0
    for _ in range(200):
        k = rng.randint(2, 8)
        n = rng.randint(2 * k, 256)
        g = joined_parts(rng, n, k)
        bl = complete_blockade_from_anticomponents(g, k)
        blocks = bl.blocks
        ok = (len(blocks) >= k and all(popcount(b) * k * k >= n for b in blocks)
              and not bl.failures()
              and all(is_complete_to(g, blocks[i], blocks[j])
                      for i in range(len(blocks)) for j in range(i + 1, len(blocks))))
        good += ok
    report("complete blockade from small anticomponents", good == 200, f"{good}/200 instances")


def test_covering_lemma(report):
    rng = random.Random(42)
    good = 0
    for _ in range(500):
        x = rng.choice([Fraction(1, 3), Fraction(1, 4), Fraction(1, 5), Fraction(1, 8), Fraction(1, 10)])
        size_a, size_b = rng.randint(4, 60), rng.randint(1, 100)
        a = (1 << size_a) - 1
        b = ((1 << (size_a + size_b)) - 1) ^ a
        low = math.ceil(x * size_a)
        edges = []
        for v in range(size_a, size_a + size_b):
            edges += [(u, v) for u in rng.sample(range(size_a), rng.randint(low, size_a))]
        g = Graph.from_edges(size_a + size_b, edges)
        s = covering_set(g, a, b, x)
        covered = 0
        for u in range(size_a):
            if s >> u & 1:
                covered |= g.adj[u] & b
        good += (not s & ~a and 2 * popcount(covered) >= size_b
                 and popcount(s) <= math.ceil(1 / x))
    report("covering set", good == 500, f"{good}/500 instances")


def test_comb_lemma(report):
    rng = random.Random(43)
    good = agree = small = bound_fails = 0
    for _ in range(300):
        size_a, size_b = rng.randint(1, 30), rng.randint(1, 200)
        p = rng.choice([0.01, 0.05, 0.1, 0.3])
        a = (1 << size_a) - 1
        b = ((1 << (size_a + size_b)) - 1) ^ a
        edges = [(u, v) for u in range(size_a) for v in range(size_a, size_a + size_b)
                 if rng.random() < p]
        g = Graph.from_edges(size_a + size_b, edges)
        delta = Fraction(max(1, max(popcount(g.adj[u] & b) for u in range(size_a))))
        out = comb_or_sparse_cover(g, a, b, delta)
        if isinstance(out, CombFound):
            ok = not comb_failures(g, list(out.apexes), list(out.blocks)) and comb_is_wide(out.blocks, size_b)
        else:
            reach = 0
            for u in range(size_a):
                reach |= g.adj[u] & b
            ok = isinstance(out, SmallCover) and out.covered == reach
        good += ok
        reach = 0
        for u in range(size_a):
            reach |= g.adj[u] & b
        bound_fails += not small_cover_bound_holds(popcount(reach), size_b, delta)
        if size_a <= 12:
            small += 1
            agree += isinstance(out, CombFound) == brute_comb_exists(g, a, b)
    report("combs", good == 300 and agree == small,
           f"{good}/300 arms verify; {agree}/{small} agree with the apex-subset oracle; "
           f"{bound_fails} instances with the cover bound failing")


def sparse_p5_free(rng: random.Random, n: int, eta: Fraction) -> Graph:
    """Disjoint union of P5-free pieces small enough to keep every degree below eta*n."""
    cap = max(1, math.floor(eta * n)) + 1
    edges, start = [], 0
    while start < n:
        s = min(rng.randint(1, cap), n - start)
        piece = generate(GeneratorSpec(SUBSTITUTION, s, seed=rng.randrange(1 << 30)))
        edges += [(u + start, v + start) for u, v in piece.edges()]
        start += s
    return Graph.from_edges(n, edges)


def test_anticomplete_pair_lemma(report):
    rng = random.Random(44)
    eta = Fraction(1, 32)
    good = fired = 0
    for _ in range(200):
        n = rng.randint(32, 512)
        g = sparse_p5_free(rng, n, eta)
        assert is_x_sparse(g, eta)
        try:
            bl = anticomplete_pair_sparse(g, eta)
        except InternalInvariantViolated:
            fired += 1
            continue
        x, y = bl.blocks
        good += is_anticomplete_to(g, x, y) and min(popcount(x), popcount(y)) >= eta * n
    report("anticomplete pair in sparse P5-free graphs", good == 200 and fired == 0,
           f"{good}/200 instances; invariant fired {fired} times")


def test_cograph_fact(report):
    rng = random.Random(45)
    good = exact = small = 0
    for i in range(300):
        n = rng.randint(1, 200)
        g = generate(GeneratorSpec(COGRAPH, n, seed=i, density=rng.choice([0.2, 0.5, 0.8])))
        out = cograph_clique_or_stable(g)
        good += out.size >= math.isqrt(n - 1) + 1 if n > 1 else out.size == 1
        if n <= 18:
            small += 1
            exact += out.size == max(brute_max_hom(g))
    report("cograph clique or stable set", good == 300 and exact == small,
           f"{good}/300 reach ceil(sqrt n); {exact}/{small} equal the brute-force optimum")


def cotree_finder(g: Graph):
    """Split a part into its components or anticomponents, merged down to at most four."""

    def finder(within):
        parts, kind = components(g, within), "anticomplete"
        if len(parts) == 1:
            parts, kind = anticomponents(g, within), "complete"
        if len(parts) == 1:
            raise DegenerateInput("single vertex")
        parts = sorted(parts, key=popcount, reverse=True)
        while len(parts) > 4:
            parts = sorted(parts[:-2] + [parts[-2] | parts[-1]], key=popcount, reverse=True)
        return CompleteOrAnticompleteBlockade(Blockade(tuple(parts)), kind)

    return finder


def test_layout_invariants(report):
    rng = random.Random(46)
    violations = refine_runs = block_runs = substitutions = 0
    for i in range(60):
        g = generate(corpus_spec(i, rng.randint(32, 512), 100 + i))
        refine = RefineReport()
        try:
            epsone_blockade(g, Fraction(1, 4), PROFILE, report=refine)
            refine_runs += 1
        except (ScaleShortfall, DegenerateInput):
            pass
        except InternalInvariantViolated:
            violations += 1
        violations += len(refine.violations)
        substitutions += sum(s["action"] == "substitute" for s in refine.steps)
        runs = [lambda r: polynomial_rodl(g, Fraction(1, 4), PROFILE, seed=i, report=r)]
        if i % len(HOUSE_FREE) == 0:
            runs.append(lambda r: blocks_extract(g, Fraction(1, 4), PROFILE.a, cotree_finder(g),
                                                 PROFILE, report=r))
        for run in runs:
            blocks = BlocksReport()
            try:
                run(blocks)
            except ScaleShortfall:
                pass
            except InternalInvariantViolated:
                violations += 1
            block_runs += bool(blocks.steps)
            violations += len(blocks.violations)
            substitutions += sum(s["action"] == "substitute" for s in blocks.steps)
    report("layout invariants", violations == 0 and substitutions > 0,
           f"{violations} violations over {refine_runs} layout refinements, "
           f"{block_runs} cograph-layout runs and {substitutions} substitution steps")


def test_restricted_quality(report):
    rng = random.Random(47)
    eps = Fraction(1, 4)
    hits = 0
    for i in range(200):
        g = generate(corpus_spec(i, rng.randint(4, 18), 200 + i))
        got = polynomial_rodl(g, eps, PROFILE, seed=i).size
        best = popcount(brute_best_restricted(g, eps))
        hits += 2 * got >= best
    share = Fraction(hits, 200)
    report("restricted subgraph quality", share >= Fraction(4, 5) and share >= QUALITY_BASELINE,
           f"{hits}/200 reach half the optimum (pinned baseline {QUALITY_BASELINE})")


def test_eh_exponent(report, capsys):
    cograph = {n: run_instance(0, GeneratorSpec(COGRAPH, n), "eh", PROFILE) for n in (64, 128, 256, 512)}
    subst = {n: run_instance(0, GeneratorSpec(SUBSTITUTION, n), "eh", PROFILE) for n in (64, 128, 256, 512)}
    with capsys.disabled():
        for n, row in subst.items():
            drift = row.exponent - SUBSTITUTION_BASELINE[n]
            print(f"\n  substitution n={n}: exponent {row.exponent:.6f} "
                  f"(baseline {SUBSTITUTION_BASELINE[n]:.6f}, drift {drift:+.6f})")
    ok = all(r.exponent >= 0.5 and r.certificate_ok == 1 for r in cograph.values())
    detail = ", ".join(f"n={n}: {r.exponent:.3f}" for n, r in cograph.items())
    report("eh exponent on cographs", ok, detail)


def test_bench_determinism(report, tmp_path):
    artifacts = []
    for tag in ("first", "second"):
        csv_path, json_path = tmp_path / f"{tag}.csv", tmp_path / f"{tag}.json"
        subprocess.run([sys.executable, "-m", "blockade.cli", "bench", "--seed", "0",
                        "--out", str(csv_path), "--json", str(json_path)], check=True)
        artifacts.append((csv_path.read_bytes(), json_path.read_bytes()))
    same = artifacts[0] == artifacts[1]
    report("bench determinism", same,
           f"CSV {len(artifacts[0][0])} bytes, JSON {len(artifacts[0][1])} bytes, "
           f"{'identical' if same else 'different'}")
