"""Strategy x parameter sweeps producing plot-ready rows."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .evaluation import evaluate, read_golden
from .index import build_index
from .model import Query, SourceCatalog, ingest_claims
from .selection import Objective, SelectionConfig, run_selection
from .synth import SyntheticConfig, generate_dataset

logger = logging.getLogger(__name__)

STRATEGIES = {
    "Basic": (False, False),
    "Basic+S": (True, False),
    "Basic+V": (False, True),
    "Basic+S+V": (True, True),
}
SWEEPS = ("sources", "items", "rho", "error")

ROW_FIELDS = (
    "sweep", "value", "strategy", "objective", "sources", "entries", "rounds", "selected",
    "coverage", "cost", "scored", "skipped", "precision", "recall", "runtime_ms",
)


@dataclass(frozen=True)
class BenchSpec:
    sweep: str
    values: tuple
    objective: Objective = Objective.MIN_COST
    budget: Optional[float] = None
    rho: float = 0.8
    strategies: tuple[str, ...] = tuple(STRATEGIES)
    gen: Optional[SyntheticConfig] = None
    claims: Optional[str] = None
    costs: Optional[str] = None
    golden_path: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        if self.sweep not in SWEEPS:
            raise ValueError(f"unknown sweep {self.sweep!r}")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies {sorted(unknown)}")
        if self.gen is None and self.claims is None:
            raise ValueError("bench needs a generator config or a claims file")
        if self.sweep in ("sources", "error") and self.gen is None:
            raise ValueError(f"the {self.sweep} sweep regenerates data and needs a generator config")


def run_strategies(
    catalog: SourceCatalog,
    golden: Optional[dict],
    strategies: Sequence[str],
    objective: Objective,
    budget: Optional[float],
    rho: float,
    query: Optional[Query] = None,
) -> list[dict]:
    index = build_index(catalog, query)
    rows = []
    for name in strategies:
        source_prune, value_prune = STRATEGIES[name]
        cfg = SelectionConfig(
            objective=objective,
            budget=budget,
            rho=rho if value_prune else None,
            source_prune=source_prune,
        )
        report = run_selection(index, cfg)
        metrics = evaluate(catalog, report.selected, golden) if golden else None
        rows.append({
            "strategy": name,
            "objective": objective.value,
            "sources": catalog.n_sources,
            "entries": len(index),
            "rounds": len(report.rounds),
            "selected": list(report.selected),
            "coverage": report.coverage,
            "cost": report.total_cost,
            "scored": sum(report.scored_per_round),
            "skipped": report.skipped_total,
            "scored_per_round": report.scored_per_round,
            "precision": metrics.precision if metrics else None,
            "recall": metrics.recall if metrics else None,
            "runtime_ms": report.timings["total_s"] * 1000.0,
        })
    return rows


def _load_fixed(spec: BenchSpec):
    if spec.claims is not None:
        catalog = ingest_claims(spec.claims, spec.costs)
        golden = read_golden(spec.golden_path) if spec.golden_path else None
        return catalog, golden
    ds = generate_dataset(spec.gen)
    return ds.catalog, ds.golden


def _cell(spec: BenchSpec, value) -> list[dict]:
    rho = spec.rho
    query = None
    if spec.sweep == "sources":
        ds = generate_dataset(replace(spec.gen, n_sources=int(value)))
        catalog, golden = ds.catalog, ds.golden
    elif spec.sweep == "error":
        ds = generate_dataset(replace(spec.gen, error_mean_fraction=float(value)))
        catalog, golden = ds.catalog, ds.golden
    else:
        catalog, golden = _load_fixed(spec)
        if spec.sweep == "rho":
            rho = float(value)
        else:
            pool = sorted(d for d in (golden or catalog.item_ids) if d in catalog.item_index)
            rng = np.random.default_rng(spec.seed)
            n = min(int(value), len(pool))
            picked = sorted(rng.choice(len(pool), size=n, replace=False).tolist())
            query = Query(tuple(pool[i] for i in picked))
            if golden:
                golden = {d: golden[d] for d in query.item_ids if d in golden}
    rows = run_strategies(catalog, golden, spec.strategies, spec.objective, spec.budget, rho, query)
    for r in rows:
        r["sweep"] = spec.sweep
        r["value"] = value
    return rows


def run_bench(spec: BenchSpec, jobs: int = 1) -> list[dict]:
    """One row per (sweep value, strategy); cells run sequentially unless ``jobs > 1``."""
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_cell, [spec] * len(spec.values), spec.values))
    else:
        parts = [_cell(spec, v) for v in spec.values]
    return [row for part in parts for row in part]


def format_rows(rows: list[dict], sep: str = ",") -> str:
    out = [sep.join(ROW_FIELDS)]
    for r in rows:
        cells = []
        for f in ROW_FIELDS:
            v = r[f]
            if f == "selected":
                v = len(v)
            elif isinstance(v, float):
                v = f"{v:.6g}"
            elif v is None:
                v = ""
            cells.append(str(v))
        out.append(sep.join(cells))
    return "\n".join(out) + "\n"
