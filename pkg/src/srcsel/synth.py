"""Synthetic source datasets with a known golden standard.

Source sizes and per-source error counts are normal draws (sigma = mean/3),
rounded and clamped. Erroneous claims take a uniformly chosen wrong value;
truth probabilities are vote shares over the generated claims.
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .model import SourceCatalog, write_costs

logger = logging.getLogger(__name__)

DEFAULT_CLAIM_CAP = 200_000_000
CLAIM_CAP_ENV = "SRCSEL_CLAIM_CAP"


def claim_cap() -> int:
    return int(float(os.environ.get(CLAIM_CAP_ENV, DEFAULT_CLAIM_CAP)))


@dataclass(frozen=True)
class SyntheticConfig:
    n_sources: int
    mean_source_size: float
    n_items: Optional[int] = None  # default 2 * mean_source_size
    values_per_item: int = 4  # wrong values available per item
    size_sigma: Optional[float] = None  # default mean / 3
    error_mean_fraction: float = 0.2
    golden_fraction: float = 1.0
    max_cost: float = 1.0  # costs uniform in [1, max_cost]
    seed: int = 0

    @property
    def items(self) -> int:
        return self.n_items if self.n_items is not None else max(1, round(2 * self.mean_source_size))

    @property
    def sigma(self) -> float:
        return self.size_sigma if self.size_sigma is not None else self.mean_source_size / 3

    def validate(self) -> None:
        if self.n_sources < 1:
            raise ValueError("need at least one source")
        if not self.mean_source_size > 0:
            raise ValueError("mean source size must be positive")
        if self.values_per_item < 2:
            raise ValueError("values_per_item must be at least 2")
        if not 0.0 <= self.error_mean_fraction < 1.0:
            raise ValueError("error_mean_fraction must lie in [0, 1)")
        if not 0.0 < self.golden_fraction <= 1.0:
            raise ValueError("golden_fraction must lie in (0, 1]")
        if self.max_cost < 1.0:
            raise ValueError("max_cost must be at least 1")
        expected = self.n_sources * min(self.mean_source_size, self.items)
        cap = claim_cap()
        if expected > cap:
            raise ValueError(
                f"about {expected:.3g} claims expected, above the cap of {cap:.3g} "
                f"(set {CLAIM_CAP_ENV} to raise it)"
            )


@dataclass
class SyntheticDataset:
    config: SyntheticConfig
    catalog: SourceCatalog
    truth: dict[str, str]  # every item's true value
    golden: dict[str, str]  # the sampled golden standard
    erroneous_claims: int
    clamped_sizes: int

    @property
    def error_rate(self) -> float:
        return self.erroneous_claims / max(1, self.catalog.n_claims)

    def summary(self) -> dict:
        sizes = np.bincount(self.catalog.claim_source, minlength=self.catalog.n_sources)
        return {
            "sources": self.catalog.n_sources,
            "items": self.catalog.n_items,
            "claims": self.catalog.n_claims,
            "mean_source_size": float(sizes.mean()),
            "error_rate": self.error_rate,
            "clamped_sizes": self.clamped_sizes,
            "golden_items": len(self.golden),
        }


def _distinct_items(rng: np.random.Generator, sizes: np.ndarray, n_items: int) -> np.ndarray:
    """Per source, ``sizes[s]`` distinct items in random order, concatenated."""
    owner = np.repeat(np.arange(len(sizes)), sizes)
    total = len(owner)
    big = sizes * 2 > n_items
    items = rng.integers(0, n_items, size=total)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    # dense sources: a permutation prefix is cheaper than rejection
    for s in np.flatnonzero(big).tolist():
        a = starts[s]
        items[a:a + sizes[s]] = rng.permutation(n_items)[: sizes[s]]
    while True:
        order = np.lexsort((np.arange(total), items, owner))
        so, si = owner[order], items[order]
        dup = np.zeros(total, dtype=bool)
        dup[order[1:]] = (so[1:] == so[:-1]) & (si[1:] == si[:-1])
        n_dup = int(dup.sum())
        if n_dup == 0:
            return items
        items[dup] = rng.integers(0, n_items, size=n_dup)


def generate_dataset(config: SyntheticConfig) -> SyntheticDataset:
    config.validate()
    rng = np.random.default_rng(config.seed)
    n, n_items, k_wrong = config.n_sources, config.items, config.values_per_item
    mu, sigma = config.mean_source_size, config.sigma

    raw = np.rint(rng.normal(mu, sigma, size=n)).astype(np.int64)
    sizes = np.clip(raw, 1, n_items)
    clamped = int(np.count_nonzero(sizes != raw))
    # one standard normal per source so error counts grow monotonically with the fraction
    z = rng.normal(size=n)
    err_mu = config.error_mean_fraction * mu
    errors = np.clip(np.rint(err_mu + (err_mu / 3) * z).astype(np.int64), 0, sizes)

    truth_code = rng.integers(0, k_wrong + 1, size=n_items)
    items = _distinct_items(rng, sizes, n_items)
    owner = np.repeat(np.arange(n), sizes)
    pos = np.arange(len(items)) - np.repeat(np.cumsum(sizes) - sizes, sizes)
    wrong = pos < errors[owner]
    shift = rng.integers(1, k_wrong + 1, size=len(items))
    codes = truth_code[items]
    codes = np.where(wrong, (codes + shift) % (k_wrong + 1), codes)

    costs = np.ones(n) if config.max_cost == 1.0 else rng.uniform(1.0, config.max_cost, size=n)
    golden_n = max(1, round(config.golden_fraction * n_items))
    golden_idx = np.sort(rng.choice(n_items, size=golden_n, replace=False))

    catalog = _catalog_from_codes(owner, items, codes, costs, n_items, k_wrong)
    width = len(str(n_items - 1))
    truth = {f"d{d:0{width}d}": f"v{c}" for d, c in enumerate(truth_code.tolist())}
    golden = {f"d{d:0{width}d}": f"v{truth_code[d]}" for d in golden_idx.tolist()}
    return SyntheticDataset(
        config=config,
        catalog=catalog,
        truth=truth,
        golden=golden,
        erroneous_claims=int(wrong.sum()),
        clamped_sizes=clamped,
    )


def _catalog_from_codes(owner, items, codes, costs, n_items, k_wrong) -> SourceCatalog:
    n = len(costs)
    n_vals = k_wrong + 1
    width_s = len(str(n - 1))
    width_d = len(str(n_items - 1))
    source_ids = [f"s{i:0{width_s}d}" for i in range(n)]

    # catalog items in index order; values numbered densely per (item, code) pair used
    pair = items * n_vals + codes
    used = np.unique(pair)
    value_code = np.searchsorted(used, pair)
    used_items = used // n_vals
    present = np.unique(used_items)
    item_pos = np.full(n_items, -1, dtype=np.int64)
    item_pos[present] = np.arange(len(present))

    counts = np.bincount(value_code, minlength=len(used)).astype(np.float64)
    totals = np.bincount(used_items, weights=counts, minlength=n_items)
    prob = counts / totals[used_items]

    order = np.lexsort((value_code, owner))
    return SourceCatalog(
        source_ids=source_ids,
        costs=np.asarray(costs, dtype=np.float64),
        item_ids=[f"d{d:0{width_d}d}" for d in present.tolist()],
        value_item=item_pos[used_items],
        value_labels=[f"v{c}" for c in (used % n_vals).tolist()],
        value_prob=prob,
        claim_source=owner[order].astype(np.int64),
        claim_value=value_code[order].astype(np.int64),
    )


def write_dataset(dataset: SyntheticDataset, outdir: str | Path) -> dict[str, Path]:
    """Write claims.csv, costs.csv and golden.csv into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cat = dataset.catalog
    paths = {
        "claims": outdir / "claims.csv",
        "costs": outdir / "costs.csv",
        "golden": outdir / "golden.csv",
    }
    src = np.array(cat.source_ids, dtype=object)
    item = np.array(cat.item_ids, dtype=object)[cat.value_item]
    label = np.array(cat.value_labels, dtype=object)
    prob = np.array([repr(p) for p in cat.value_prob.tolist()], dtype=object)
    with open(paths["claims"], "w", encoding="utf-8", newline="") as fh:
        fh.write("source,item,value,prob\n")
        step = 1_000_000
        for a in range(0, cat.n_claims, step):
            cs = cat.claim_source[a:a + step]
            cv = cat.claim_value[a:a + step]
            lines = src[cs] + "," + item[cv] + "," + label[cv] + "," + prob[cv]
            fh.write("\n".join(lines.tolist()))
            fh.write("\n")
    write_costs(cat, paths["costs"])
    write_golden(dataset.golden, paths["golden"])
    return paths


def write_golden(golden: dict[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["item", "value"])
        for d in sorted(golden):
            w.writerow([d, golden[d]])
