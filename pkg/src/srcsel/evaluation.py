"""Precision / recall against a golden standard, and report serialization."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from .model import CatalogError, SourceCatalog

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "srcsel.report/1"
TIMING_KEYS = ("timings",)


@dataclass
class MetricResult:
    precision: Optional[float]
    recall: Optional[float]
    true_values: int
    returned_values: int
    golden_covered: int
    golden_size: int


def read_golden(path: str | Path) -> dict[str, str]:
    golden: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["item", "value"]:
            raise CatalogError(f"{path}: expected header item,value", 1)
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise CatalogError(f"expected 2 fields, got {len(row)}", reader.line_num)
            golden[row[0]] = row[1]
    return golden


def _returned_pairs(catalog: SourceCatalog, selected: Iterable[str], golden: Mapping[str, str]):
    """Distinct value codes asserted by ``selected`` for golden items, and which are true."""
    chosen = np.zeros(catalog.n_sources, dtype=bool)
    for s in selected:
        chosen[catalog.lookup_source(s)] = True
    golden_item = np.zeros(catalog.n_items, dtype=bool)
    true_code = np.zeros(len(catalog.value_labels), dtype=bool)
    for d, v in golden.items():
        if d in catalog.item_index:
            golden_item[catalog.item_index[d]] = True
    for c, (d, v) in enumerate(zip(catalog.value_item.tolist(), catalog.value_labels)):
        if golden_item[d] and golden[catalog.item_ids[d]] == v:
            true_code[c] = True
    codes = catalog.claim_value[chosen[catalog.claim_source]]
    codes = np.unique(codes[golden_item[catalog.value_item[codes]]])
    return codes, true_code


def evaluate(catalog: SourceCatalog, selected: Iterable[str], golden: Mapping[str, str]) -> MetricResult:
    if not golden:
        raise ValueError("golden standard is empty")
    selected = list(selected)
    codes, true_code = _returned_pairs(catalog, selected, golden)
    n_true = int(true_code[codes].sum())
    n_ret = len(codes)
    if not selected:
        logger.warning("precision undefined for an empty selection")
    return MetricResult(
        precision=n_true / n_ret if n_ret else None,
        recall=n_true / len(golden),
        true_values=n_true,
        returned_values=n_ret,
        golden_covered=n_true,
        golden_size=len(golden),
    )


def precision(catalog: SourceCatalog, selected: Iterable[str], golden: Mapping[str, str]) -> Optional[float]:
    """Share of distinct returned (golden item, value) pairs that are true; None if nothing returned."""
    return evaluate(catalog, selected, golden).precision


def recall(catalog: SourceCatalog, selected: Iterable[str], golden: Mapping[str, str]) -> float:
    """Share of golden items whose true value some selected source asserts."""
    return evaluate(catalog, selected, golden).recall


def attach_metrics(report, catalog: SourceCatalog, golden: Mapping[str, str]) -> MetricResult:
    result = evaluate(catalog, report.selected, golden)
    report.metrics = asdict(result)
    return result


def report_dict(report) -> dict:
    d = {"schema": REPORT_SCHEMA}
    d.update(report.to_dict())
    return d


def strip_timings(d: dict) -> dict:
    return {k: v for k, v in d.items() if k not in TIMING_KEYS}


def format_text(report) -> str:
    lines = [
        f"objective: {report.objective}   strategy: {report.strategy}",
        f"budget: {report.budget}   rho: {report.rho}",
        f"entries: {report.n_entries}   candidate sources: {report.n_candidates}",
        "",
        f"{'round':>5} {'source':>12} {'marginal':>10} {'ratio':>10} {'cum_cov':>10} "
        f"{'cum_cost':>10} {'scored':>8} {'skipped':>8}",
    ]
    for r in report.rounds:
        lines.append(
            f"{r.round:>5} {r.source:>12} {r.marginal:>10.4f} {r.ratio:>10.4f} {r.cum_cov:>10.4f} "
            f"{r.cum_cost:>10.4f} {r.scored:>8} {r.skipped:>8}"
        )
    lines += [
        "",
        f"selected: {len(report.selected)}   coverage: {report.coverage:.4f} of "
        f"{report.cov_omega:.4f}   cost: {report.total_cost:.4f}",
    ]
    if report.value_prune is not None:
        vp = report.value_prune
        lines.append(f"value pruning: rho={vp.rho} threshold={vp.threshold:.4f} pruned={vp.n_pruned}")
        for it in vp.items:
            if it.pruned:
                lines.append(f"  {it.item_id}: {','.join(it.pruned)} retention={it.retention:.4f}")
    if report.metrics is not None:
        m = report.metrics
        lines.append(f"precision: {m['precision']}   recall: {m['recall']}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    for name, secs in report.timings.items():
        lines.append(f"time {name}: {secs * 1000:.2f} ms")
    return "\n".join(lines) + "\n"


def emit_report(report, path: str | Path | None = None, fmt: str = "json") -> str:
    """Serialize a selection report as JSON or text; write it when ``path`` is given."""
    if fmt == "json":
        text = json.dumps(report_dict(report), indent=2, sort_keys=True) + "\n"
    elif fmt == "text":
        text = format_text(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
