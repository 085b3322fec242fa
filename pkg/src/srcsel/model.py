"""Claims, source catalogs and their file formats.

A claim is a flat ``(source, item, value, prob)`` record. The catalog keeps
claims in columnar numpy arrays so that multi-million claim datasets stay
cheap to hold and to index.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

PROB_SUM_SLACK = 1e-9


class CatalogError(ValueError):
    """Invalid claim, cost or query input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Claim:
    source_id: str
    item_id: str
    value: str
    prob: Optional[float] = None


@dataclass(frozen=True)
class Query:
    item_ids: tuple[str, ...]

    def __post_init__(self):
        if not self.item_ids:
            raise CatalogError("query must name at least one item")


def vote_share(values: Sequence[str]) -> dict[str, float]:
    """Fallback truth probabilities: fraction of claims asserting each value.

    Fractions are exact, so the returned floats are the correctly rounded
    shares and are independent of claim order.
    """
    if not values:
        raise CatalogError("cannot estimate probabilities for an item without claims")
    counts = Counter(values)
    total = len(values)
    return {v: float(Fraction(n, total)) for v, n in sorted(counts.items())}


@dataclass
class SourceCatalog:
    """All sources with their costs plus the claim universe.

    ``source_ids`` is sorted, so a source's integer index orders the same way
    as its id. ``item_ids`` keeps first-appearance order of the claim input.
    Each distinct (item, value) pair gets a value code; claims reference
    sources and value codes.
    """

    source_ids: list[str]
    costs: np.ndarray
    item_ids: list[str]
    value_item: np.ndarray
    value_labels: list[str]
    value_prob: np.ndarray
    claim_source: np.ndarray
    claim_value: np.ndarray

    def __post_init__(self):
        self.source_index = {s: i for i, s in enumerate(self.source_ids)}
        self.item_index = {d: i for i, d in enumerate(self.item_ids)}
        if len(self.costs) != len(self.source_ids):
            raise CatalogError("one cost per source is required")
        if len(self.costs) and not np.all(self.costs > 0):
            bad = self.source_ids[int(np.argmin(self.costs > 0))]
            raise CatalogError(f"nonpositive cost for source {bad!r}")

    @property
    def n_sources(self) -> int:
        return len(self.source_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    @property
    def n_claims(self) -> int:
        return len(self.claim_source)

    @property
    def claim_item(self) -> np.ndarray:
        return self.value_item[self.claim_value]

    def claims(self) -> Iterator[Claim]:
        for s, v in zip(self.claim_source.tolist(), self.claim_value.tolist()):
            yield Claim(
                self.source_ids[s],
                self.item_ids[self.value_item[v]],
                self.value_labels[v],
                float(self.value_prob[v]),
            )

    def cost(self, source_id: str) -> float:
        return float(self.costs[self.lookup_source(source_id)])

    def total_cost(self, source_ids: Iterable[str]) -> float:
        return float(sum(self.cost(s) for s in source_ids))

    def lookup_source(self, source_id: str) -> int:
        try:
            return self.source_index[source_id]
        except KeyError:
            raise KeyError(f"unknown source {source_id!r}") from None

    def item_values(self, item_id: str) -> dict[str, float]:
        """Value -> truth probability for one item."""
        d = self.item_index[item_id]
        codes = np.flatnonzero(self.value_item == d)
        return {self.value_labels[c]: float(self.value_prob[c]) for c in codes}

    def scaled_costs(self, factor: float) -> "SourceCatalog":
        """Copy of the catalog with every cost multiplied by ``factor``."""
        return SourceCatalog(
            list(self.source_ids), self.costs * factor, list(self.item_ids),
            self.value_item, list(self.value_labels), self.value_prob,
            self.claim_source, self.claim_value,
        )

    @classmethod
    def from_claims(
        cls,
        claims: Iterable[Claim | tuple],
        costs: Optional[Mapping[str, float]] = None,
    ) -> "SourceCatalog":
        """Validate raw claims and build a catalog.

        Claims may omit ``prob``. An item whose claims carry no probability
        at all gets vote-share estimates; an item with only some values
        scored is rejected.
        """
        records: list[tuple[int | None, Claim]] = []
        for c in claims:
            line = None
            if isinstance(c, tuple) and not isinstance(c, Claim):
                if len(c) == 5:
                    line, *c = c
                c = Claim(*c)
            records.append((line, c))
        return cls._from_records(records, costs or {})

    @classmethod
    def _from_records(cls, records, costs) -> "SourceCatalog":
        assertion: dict[tuple[str, str], str] = {}
        stated: dict[tuple[str, str], float] = {}
        items: dict[str, None] = {}
        rows: list[tuple[str, str, str]] = []
        for line, c in records:
            if c.prob is not None and not 0.0 <= c.prob <= 1.0:
                raise CatalogError(f"probability {c.prob} outside [0, 1]", line)
            key = (c.source_id, c.item_id)
            seen = assertion.get(key)
            if seen is not None:
                if seen != c.value:
                    raise CatalogError(
                        f"conflicting value for ({c.source_id}, {c.item_id})", line)
                logger.debug("duplicate claim %s collapsed", key)
            else:
                assertion[key] = c.value
                rows.append((c.source_id, c.item_id, c.value))
            items.setdefault(c.item_id, None)
            if c.prob is not None:
                vkey = (c.item_id, c.value)
                prev = stated.get(vkey)
                if prev is not None and prev != c.prob:
                    raise CatalogError(
                        f"value {c.value!r} of item {c.item_id!r} has probabilities "
                        f"{prev} and {c.prob}", line)
                stated[vkey] = c.prob

        by_item: dict[str, list[str]] = defaultdict(list)
        for _, d, v in rows:
            by_item[d].append(v)
        item_ids = list(items)
        value_codes: dict[tuple[str, str], int] = {}
        value_item, value_labels, value_prob = [], [], []
        for di, d in enumerate(item_ids):
            vals = by_item[d]
            distinct = list(dict.fromkeys(vals))
            scored = [v for v in distinct if (d, v) in stated]
            if not scored:
                probs = vote_share(vals)
            elif len(scored) < len(distinct):
                missing = sorted(set(distinct) - set(scored))
                raise CatalogError(f"item {d!r} lacks probabilities for values {missing}")
            else:
                probs = {v: stated[(d, v)] for v in distinct}
            if sum(probs.values()) > 1 + PROB_SUM_SLACK:
                logger.warning("probabilities of item %r sum to %.6f > 1", d, sum(probs.values()))
            for v in distinct:
                value_codes[(d, v)] = len(value_labels)
                value_item.append(di)
                value_labels.append(v)
                value_prob.append(probs[v])

        source_ids = sorted({s for s, _, _ in rows} | set(costs))
        sindex = {s: i for i, s in enumerate(source_ids)}
        cost_arr = np.array([float(costs.get(s, 1.0)) for s in source_ids], dtype=np.float64)
        return cls(
            source_ids=source_ids,
            costs=cost_arr,
            item_ids=item_ids,
            value_item=np.array(value_item, dtype=np.int64),
            value_labels=value_labels,
            value_prob=np.array(value_prob, dtype=np.float64),
            claim_source=np.array([sindex[s] for s, _, _ in rows], dtype=np.int64),
            claim_value=np.array([value_codes[(d, v)] for _, d, v in rows], dtype=np.int64),
        )


def estimate_truth_probabilities(catalog: SourceCatalog, item_id: str) -> dict[str, float]:
    """Vote-share probabilities for ``item_id`` recomputed from its claims."""
    if item_id not in catalog.item_index:
        raise CatalogError(f"unknown item {item_id!r}")
    d = catalog.item_index[item_id]
    mask = catalog.claim_item == d
    labels = [catalog.value_labels[v] for v in catalog.claim_value[mask].tolist()]
    return vote_share(labels)


def _open_csv(path: Path, header: Sequence[str]):
    fh = open(path, newline="", encoding="utf-8")
    reader = csv.reader(fh)
    first = next(reader, None)
    if first is None:
        return fh, iter(())
    if [h.strip() for h in first] != list(header):
        fh.close()
        raise CatalogError(f"{path}: expected header {','.join(header)}", 1)
    return fh, reader


def read_claims(path: str | Path) -> list[tuple]:
    """Parse a claims file into ``(line, source, item, value, prob)`` tuples."""
    path = Path(path)
    fh, reader = _open_csv(path, ("source", "item", "value", "prob"))
    out = []
    with fh:
        for row in reader:
            line = reader.line_num
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 4:
                raise CatalogError(f"expected 4 fields, got {len(row)}", line)
            source, item, value, prob = row
            if not source or not item:
                raise CatalogError("empty source or item id", line)
            if prob.strip():
                try:
                    p = float(prob)
                except ValueError:
                    raise CatalogError(f"bad probability {prob!r}", line) from None
            else:
                p = None
            out.append((line, source, item, value, p))
    return out


def read_costs(path: str | Path) -> dict[str, float]:
    path = Path(path)
    fh, reader = _open_csv(path, ("source", "cost"))
    costs: dict[str, float] = {}
    with fh:
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 2:
                raise CatalogError(f"expected 2 fields, got {len(row)}", line)
            try:
                c = float(row[1])
            except ValueError:
                raise CatalogError(f"bad cost {row[1]!r}", line) from None
            if not c > 0:
                raise CatalogError(f"nonpositive cost {c} for source {row[0]!r}", line)
            costs[row[0]] = c
    return costs


def read_query(path: str | Path) -> Query:
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and line not in items:
                items.append(line)
    return Query(tuple(items))


def ingest_claims(records: str | Path, costs: str | Path | None = None) -> SourceCatalog:
    """Load a claims file (and optional cost file) into a catalog."""
    cost_map = read_costs(costs) if costs is not None else {}
    return SourceCatalog.from_claims(read_claims(records), cost_map)


def write_claims(catalog: SourceCatalog, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "item", "value", "prob"])
        for c in catalog.claims():
            w.writerow([c.source_id, c.item_id, c.value, repr(c.prob)])


def write_costs(catalog: SourceCatalog, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "cost"])
        for s, c in zip(catalog.source_ids, catalog.costs.tolist()):
            w.writerow([s, repr(c)])
