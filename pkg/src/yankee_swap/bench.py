"""Valuation-query measurements over a size sweep."""

from __future__ import annotations

import csv
import io
import math
import random

from .corpus import FAMILIES, partition_instance, random_spec
from .criteria import Leximin
from .engine import Agent, Instance, run

COLUMNS = ("n", "m", "query_count", "normalized", "budget_ratio")


def bench_instance(family: str, n: int, m: int, seed: int) -> Instance:
    rng = random.Random(seed * 1_000_003 + n * 1009 + m)
    if family == "partition":
        return partition_instance(rng, n, m)
    if family not in FAMILIES or family == "explicit":
        raise ValueError(f"family {family!r} cannot be benchmarked")
    return Instance(m, tuple(Agent(random_spec(rng, m, family)) for _ in range(n)))


def budget(n: int, m: int) -> float:
    """(m + n) * m * (log2 m + 2): the per-run query scale."""
    return (m + n) * m * (math.log2(m) + 2) if m > 0 else 1.0


def run_bench(sizes, ns, family="partition", seed=0, criterion=None, naive=False) -> list[dict]:
    criterion = criterion or Leximin()
    rows = []
    for m in sizes:
        for n in ns:
            inst = bench_instance(family, n, m, seed)
            q = run(inst, criterion).query_count
            log_term = (m + n) * m * math.log2(m) if m > 1 else 1.0
            row = {
                "n": n,
                "m": m,
                "query_count": q,
                "normalized": round(q / log_term, 6),
                "budget_ratio": round(q / budget(n, m), 6),
            }
            if naive:
                nq = run(inst, criterion, path_finder="explicit").query_count
                row["naive_query_count"] = nq
                row["naive_ratio"] = round(nq / q, 6) if q else None
            rows.append(row)
    return rows


def fitted_constant(rows) -> float:
    """Smallest C with query_count <= C * budget for every row."""
    return max(r["budget_ratio"] for r in rows) if rows else 0.0


def to_csv(rows) -> str:
    if not rows:
        return ",".join(COLUMNS) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
