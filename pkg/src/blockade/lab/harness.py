"""Batch runner producing the exponent tables.

Rows are deterministic given the specs and seeds.  ``millis`` is 0 unless
timing is requested, so default tables are byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from types import MappingProxyType

from ..certificates import verify_certificate
from ..profile import ConstantsProfile
from ..round2 import achieved_exponent, eh_extract, polynomial_rodl
from .generators import COGRAPH, SPARSE_RANDOM, SUBSTITUTION, GeneratorSpec, generate

COLUMNS = ("instance_id", "family", "n", "seed", "pipeline", "result_kind", "set_size",
           "exponent", "certificate_ok", "millis")

PIPELINES = ("eh", "rodl")

#: Restriction parameter used by the ``rodl`` pipeline.
RODL_EPS = Fraction(1, 4)


@dataclass(frozen=True)
class Row:
    instance_id: str
    family: str
    n: int | str
    seed: int | str
    pipeline: str
    result_kind: str
    set_size: int | str
    exponent: float
    certificate_ok: int | str
    millis: int | str

    def cells(self) -> list[str]:
        out = []
        for name in COLUMNS:
            value = getattr(self, name)
            out.append(f"{value:.6f}" if name == "exponent" else str(value))
        return out


def family_label(spec: GeneratorSpec) -> str:
    return f"co-{spec.family}" if spec.complement else spec.family


def run_instance(index: int, spec: GeneratorSpec, pipeline: str,
                 profile: ConstantsProfile, timing: bool = False) -> Row:
    g = generate(spec)
    start = time.perf_counter()
    if pipeline == "eh":
        out = eh_extract(g, profile, seed=spec.seed)
        kind, lemma = out.kind, "eh_extract"
    elif pipeline == "rodl":
        out = polynomial_rodl(g, RODL_EPS, profile, seed=spec.seed)
        kind, lemma = "restricted", "polynomial_rodl"
    else:
        raise ValueError(f"unknown pipeline {pipeline!r}")
    elapsed = time.perf_counter() - start
    ok = verify_certificate(out.certify(g, profile, lemma), g).accepted
    size = out.size
    return Row(
        instance_id=f"{index:05d}",
        family=family_label(spec),
        n=g.n,
        seed=spec.seed,
        pipeline=pipeline,
        result_kind=kind,
        set_size=size,
        exponent=achieved_exponent(size, g.n),
        certificate_ok=int(ok),
        millis=round(elapsed * 1000) if timing else 0,
    )


def _job(args) -> Row:
    index, spec, pipeline, (name, mode, entries), timing = args
    profile = ConstantsProfile(name, mode, MappingProxyType(entries))
    return run_instance(index, spec, pipeline, profile, timing)


def summary_rows(rows: list[Row]) -> list[Row]:
    out = []
    for pipeline in sorted({r.pipeline for r in rows}):
        exps = [r.exponent for r in rows if r.pipeline == pipeline]
        ok = sum(int(r.certificate_ok) for r in rows if r.pipeline == pipeline)
        for label, value in (("median", statistics.median(exps)), ("min", min(exps))):
            out.append(Row(f"summary-{label}", "*", len(exps), "", pipeline, label, "",
                           value, ok, ""))
    return out


def exponent_harness(specs: list[GeneratorSpec], pipeline: str, profile: ConstantsProfile,
                     workers: int = 1, timing: bool = False) -> list[Row]:
    """One row per spec, in spec order, followed by the summary rows."""
    if pipeline not in PIPELINES:
        raise ValueError(f"unknown pipeline {pipeline!r}; known: {PIPELINES}")
    if not specs:
        return []
    if workers > 1:
        # mapping proxies do not pickle, so profiles travel as plain parts
        parts = (profile.name, profile.mode, dict(profile.entries))
        jobs = [(i, s, pipeline, parts, timing) for i, s in enumerate(specs)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_job, jobs))
    else:
        rows = [run_instance(i, s, pipeline, profile, timing) for i, s in enumerate(specs)]
    return rows + summary_rows(rows)


def rows_to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(r.cells())
    return buf.getvalue()


def rows_to_json(rows: list[Row], profile: ConstantsProfile) -> str:
    body = {
        "profile": profile.serialised(),
        "columns": list(COLUMNS),
        "rows": [dict(zip(COLUMNS, r.cells())) for r in rows],
    }
    return json.dumps(body, indent=2) + "\n"


def default_suite(seed: int = 0, sizes=(64, 128, 256, 512)) -> list[GeneratorSpec]:
    """The standard bench batch: the house-free families at each size."""
    specs = []
    for n in sizes:
        specs.append(GeneratorSpec(COGRAPH, n, seed))
        specs.append(GeneratorSpec(SUBSTITUTION, n, seed, complement=True))
        specs.append(GeneratorSpec(SPARSE_RANDOM, n, seed))
    return specs


def row_dict(row: Row) -> dict:
    return asdict(row)
