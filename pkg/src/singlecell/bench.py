"""Benchmark harness: one CSV row per (instance, heuristic)."""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .instance import Instance, InstanceError, corpus_instance, load_instance
from .scc import NullificationFailure, construct_cell
from .scc_projective import PD_HEURISTICS, construct_cell_pd
from .verify import verify_sign_invariance

HEURISTICS = ("bc", "ldb", "bc-pd", "ldb-pd")
COLUMNS = ("instance", "heuristic", "status", "resultants", "discriminants", "ldcfs", "coeffs",
           "ldcfs_omitted", "pd_blocked_unbounded", "pd_blocked_no_pairing", "roots_computed",
           "max_total_degree", "time_ms")
_STAT_COLUMNS = {
    "resultants": "resultants_added",
    "discriminants": "discriminants_added",
    "ldcfs": "ldcfs_added",
    "coeffs": "coeffs_added",
    "ldcfs_omitted": "ldcfs_omitted",
    "pd_blocked_unbounded": "pd_blocked_unbounded",
    "pd_blocked_no_pairing": "pd_blocked_no_pairing",
    "roots_computed": "roots_computed",
    "max_total_degree": "max_total_degree",
}


def build_cell(inst: Instance, heuristic: str, derivative_fallback: bool = False):
    if heuristic in PD_HEURISTICS:
        return construct_cell_pd(inst.polynomials, inst.sample, heuristic, inst.var_order,
                                 derivative_fallback)
    return construct_cell(inst.polynomials, inst.sample, heuristic, inst.var_order,
                          derivative_fallback)


@dataclass
class BrokenInstance:
    """A file that failed to parse; benchmarked as one error row per heuristic."""

    name: str
    error: str


def bench_row(inst: Instance, heuristic: str, verify: int = 0, seed: int = 0,
              derivative_fallback: bool = False) -> dict:
    row = {k: "" for k in COLUMNS}
    row["instance"] = inst.name
    row["heuristic"] = heuristic
    if isinstance(inst, BrokenInstance):
        row["status"] = "parse-error"
        return row
    start = time.perf_counter()
    try:
        cell = build_cell(inst, heuristic, derivative_fallback)
    except NullificationFailure:
        row["status"] = "nullified"
    except Exception as exc:  # recorded, the run continues
        row["status"] = f"error:{type(exc).__name__}"
    else:
        row["status"] = "ok"
        if verify:
            rep = verify_sign_invariance(inst.polynomials, cell, verify, seed)
            if not rep.passed:
                row["status"] = f"violations:{len(rep.violations)}"
        stats = cell.stats
        for col, attr in _STAT_COLUMNS.items():
            row[col] = getattr(stats, attr)
    row["time_ms"] = round((time.perf_counter() - start) * 1000)
    return row


def instances_from_dir(path: str) -> list:
    out = []
    for name in sorted(os.listdir(path)):
        if name.endswith(".json"):
            try:
                out.append(load_instance(os.path.join(path, name)))
            except (InstanceError, ValueError) as exc:
                out.append(BrokenInstance(name, str(exc)))
    return out


def corpus(count: int = 200, first: int = 1) -> list:
    return [corpus_instance(seed) for seed in range(first, first + count)]


def bench(instances: Iterable[Instance], heuristics: Sequence[str] = HEURISTICS,
          verify: int = 0, seed: int = 0, derivative_fallback: bool = False) -> list:
    """Rows sorted by instance id, then by heuristic in the given order."""
    rows = []
    for inst in sorted(instances, key=lambda x: x.name):
        for h in heuristics:
            rows.append(bench_row(inst, h, verify, seed, derivative_fallback))
    return rows


def to_csv(rows: Sequence[dict], path: Optional[str] = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def strip_time(csv_text: str) -> str:
    """The CSV without its time column, for determinism checks."""
    lines = []
    for line in csv_text.splitlines():
        lines.append(line.rsplit(",", 1)[0])
    return "\n".join(lines)
