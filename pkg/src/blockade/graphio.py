"""Reading and writing graphs as edge lists or DIMACS files.

Edge lists hold one ``u v`` pair per line; labels are 0-based if the
smallest label is 0 and 1-based otherwise.  A ``# n N`` comment fixes the
vertex count so isolated vertices survive a round trip.  DIMACS files use
``p edge n m`` and ``e u v`` lines (always 1-based).
"""

from __future__ import annotations

from pathlib import Path

from .errors import GraphFormatError
from .graph import Graph

EDGELIST = "edgelist"
DIMACS = "dimacs"


def detect_format(text: str) -> str:
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith(("p ", "c ", "e ")) or s in ("c", "p"):
            return DIMACS
        return EDGELIST
    return EDGELIST


def parse_graph(text: str, fmt: str | None = None) -> tuple[Graph, str]:
    fmt = fmt or detect_format(text)
    if fmt == DIMACS:
        return _parse_dimacs(text), DIMACS
    if fmt == EDGELIST:
        return _parse_edgelist(text), EDGELIST
    raise GraphFormatError(f"unknown format {fmt!r}")


def _parse_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "p":
                if len(parts) < 4:
                    raise GraphFormatError(f"line {lineno}: bad problem line")
                n = int(parts[2])
            elif parts[0] == "e":
                u, v = int(parts[1]), int(parts[2])
                edges.append((u - 1, v - 1))
            else:
                raise GraphFormatError(f"line {lineno}: unexpected record {parts[0]!r}")
        except (ValueError, IndexError) as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise GraphFormatError("missing 'p edge n m' line")
    return _build(n, edges)


def _parse_edgelist(text: str) -> Graph:
    declared = None
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            parts = s[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                try:
                    declared = int(parts[1])
                except ValueError as exc:
                    raise GraphFormatError(f"line {lineno}: bad vertex count") from exc
            continue
        parts = s.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v'")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
    if not pairs:
        return Graph.empty(declared or 0)
    low = min(min(p) for p in pairs)
    if low < 0:
        raise GraphFormatError("negative vertex label")
    # a declared count means the file was written by us, which is 0-based
    offset = 0 if declared is not None or low == 0 else 1
    edges = [(u - offset, v - offset) for u, v in pairs]
    n = max(max(e) for e in edges) + 1
    if declared is not None:
        if declared < n:
            raise GraphFormatError(f"declared n={declared} but label {n - 1} appears")
        n = declared
    return _build(n, edges)


def _build(n: int, edges) -> Graph:
    seen = set()
    clean = []
    for u, v in edges:
        if u == v:
            raise GraphFormatError(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge {u}-{v} out of range")
        key = (min(u, v), max(u, v))
        if key not in seen:
            seen.add(key)
            clean.append(key)
    return Graph.from_edges(n, clean)


def format_graph(g: Graph, fmt: str = EDGELIST) -> str:
    edges = g.edges()
    if fmt == DIMACS:
        lines = [f"p edge {g.n} {len(edges)}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in edges]
    elif fmt == EDGELIST:
        lines = [f"# n {g.n}"]
        lines += [f"{u} {v}" for u, v in edges]
    else:
        raise GraphFormatError(f"unknown format {fmt!r}")
    return "\n".join(lines) + "\n"


def read_graph(path, fmt: str | None = None) -> tuple[Graph, str]:
    return parse_graph(Path(path).read_text(), fmt)


def write_graph(g: Graph, path, fmt: str = EDGELIST) -> None:
    Path(path).write_text(format_graph(g, fmt))
