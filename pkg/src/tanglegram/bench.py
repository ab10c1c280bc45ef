"""Benchmark runner: every algorithm on every instance, rated against the exact optimum."""

from __future__ import annotations

import csv
import io
import logging
import os
import re
import time
from dataclasses import astuple, dataclass, fields
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import clone

from .core import Tanglegram, count_crossings
from .exact import BruteForce, ExactSolver, solve_exact
from .hierarchy import HierarchySort
from .io import load_tanglegram
from .recursive import RecSplit, RecSplitImproved, rec_split_bb

logger = logging.getLogger(__name__)

ALGORITHMS = {
    "rec-split": RecSplit(),
    "rec-split-improved": RecSplitImproved(),
    "rec-split-bb": RecSplitImproved(branch_and_bound=True),
    "hierarchy-sort": HierarchySort(),
    "exact": ExactSolver(),
    "brute": BruteForce(),
}
DEFAULT_ALGORITHMS = ("rec-split", "rec-split-improved", "rec-split-bb", "hierarchy-sort", "exact")


def make_solver(name: str, time_limit: float | None = None):
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    solver = clone(ALGORITHMS[name])
    if time_limit is not None and "time_limit" in solver.get_params():
        solver.set_params(time_limit=time_limit)
    return solver


def performance_ratio(c_i: int, c_opt: int) -> Fraction:
    """``(c_i + 1) / (c_opt + 1)``, defined for crossing-free optima too."""
    if c_i < 0 or c_opt < 0:
        raise ValueError("crossing numbers are non-negative")
    return Fraction(c_i + 1, c_opt + 1)


@dataclass
class BenchRecord:
    instance: str
    set: str
    n: int
    algorithm: str
    crossings: int
    c_opt: int
    proved_optimal: bool
    ratio: float
    time_ms: float
    seed: str


CSV_HEADER = [f.name for f in fields(BenchRecord)]


@dataclass
class Instance:
    name: str
    tanglegram: Tanglegram
    set: str = ""
    seed: str = ""

    @classmethod
    def from_file(cls, path) -> "Instance":
        t = load_tanglegram(path)
        meta = read_metadata(path)
        return cls(t.name, t, meta.get("set", ""), meta.get("seed", ""))


def read_metadata(path) -> dict[str, str]:
    """``key=value`` pairs from the comment lines of a ``.tgl`` file."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") and not re.match(r"#\s*map\s", line):
                meta.update(re.findall(r"(\w+)=(\S+)", line))
    return meta


def collect_instances(paths: Iterable) -> list[Instance]:
    """Instances from ``.tgl`` files and directories of them, sorted by name."""
    files = []
    for p in paths:
        p = os.fspath(p)
        if os.path.isdir(p):
            files.extend(os.path.join(p, f) for f in os.listdir(p) if f.endswith(".tgl"))
        else:
            files.append(p)
    return sorted((Instance.from_file(f) for f in files), key=lambda i: i.name)


def run_benchmark(
    instances: Sequence[Instance],
    algorithms: Sequence[str] = DEFAULT_ALGORITHMS,
    time_limit: float = 600.0,
) -> list[BenchRecord]:
    """Rows in instance order, then algorithm order.

    The reference optimum comes from the exact solver warm-started with the
    branch-and-bound heuristic.  If it is not proved within ``time_limit``
    the best crossing number seen on the instance is used instead and the
    rows are flagged ``proved_optimal=False``.
    """
    for name in algorithms:
        make_solver(name)
    records = []
    for inst in instances:
        t = inst.tanglegram
        start = time.perf_counter()
        ref = solve_exact(t, time_limit, rec_split_bb(t).orientation)
        ref_ms = (time.perf_counter() - start) * 1000
        rows = []
        for name in algorithms:
            if name == "exact":
                o, elapsed = ref.orientation, ref_ms
            else:
                solver = make_solver(name, time_limit)
                start = time.perf_counter()
                solver.fit(t)
                elapsed = (time.perf_counter() - start) * 1000
                o = solver.orientation_
            rows.append((name, count_crossings(t, o), elapsed))
        c_opt = ref.optimum
        if not ref.proved_optimal:
            c_opt = min([c_opt] + [c for _, c, _ in rows])
            logger.warning("%s: optimum not proved within %.0f s; using best found (%d)", inst.name, time_limit, c_opt)
        for name, c, elapsed in rows:
            records.append(
                BenchRecord(
                    inst.name, inst.set, t.n, name, c, c_opt, ref.proved_optimal,
                    float(performance_ratio(c, c_opt)), round(elapsed, 3), inst.seed,
                )
            )
    return records


def format_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        row = list(astuple(r))
        row[CSV_HEADER.index("ratio")] = f"{r.ratio:.6f}"
        row[CSV_HEADER.index("proved_optimal")] = str(r.proved_optimal).lower()
        writer.writerow(row)
    return buf.getvalue()


SUMMARY_HEADER = ["set", "n", "algorithm", "count", "mean", "median", "q1", "q3", "min", "max", "median_time_ms"]


def summarize(records: Iterable[BenchRecord]) -> list[dict]:
    """Ratio statistics per (set, n, algorithm): the numbers behind a boxplot."""
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.set, r.n, r.algorithm), []).append(r)
    out = []
    for (set_name, n, algo), rows in groups.items():
        ratios = np.array([r.ratio for r in rows])
        q1, med, q3 = np.percentile(ratios, [25, 50, 75])
        out.append(
            dict(
                set=set_name, n=n, algorithm=algo, count=len(rows),
                mean=float(ratios.mean()), median=float(med), q1=float(q1), q3=float(q3),
                min=float(ratios.min()), max=float(ratios.max()),
                median_time_ms=float(np.median([r.time_ms for r in rows])),
            )
        )
    return out


def format_summary(summary: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, SUMMARY_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in summary:
        writer.writerow({k: f"{v:.6f}" if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
