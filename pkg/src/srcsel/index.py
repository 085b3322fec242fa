"""Inverted index over queried (item, value) entries.

Each entry owns a posting list of the sources asserting that value, a truth
probability, and two flags: ``covered`` (some selected source asserts the
value) and ``pruned`` (dropped by value-level pruning). Postings are stored
CSR-style, both entry -> sources and source -> entries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .model import Query, SourceCatalog

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexEntry:
    item_id: str
    value: str
    prob: float
    sources: tuple[str, ...]
    covered: bool = False
    pruned: bool = False

    @property
    def key(self) -> str:
        return f"{self.item_id}.{self.value}"


def _csr(keys: np.ndarray, n: int) -> np.ndarray:
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr


@dataclass
class CoverageIndex:
    catalog: SourceCatalog
    query_items: list[str]
    entry_item: np.ndarray  # catalog item index per entry
    entry_value: list[str]
    prob: np.ndarray
    ptr: np.ndarray  # entry -> postings offsets
    postings: np.ndarray  # source indices, sorted within each entry
    src_ptr: np.ndarray  # source -> src_entries offsets
    src_entries: np.ndarray  # entry indices, ascending within each source
    missing_items: list[str] = field(default_factory=list)
    empty_items: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.prob)
        self.covered = np.zeros(n, dtype=bool)
        self.pruned = np.zeros(n, dtype=bool)
        self.by_item: dict[str, list[int]] = {}
        for e, d in enumerate(self.entry_item.tolist()):
            self.by_item.setdefault(self.catalog.item_ids[d], []).append(e)
        self.entry_posting = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.ptr))

    def __len__(self) -> int:
        return len(self.prob)

    @property
    def n_sources(self) -> int:
        return self.catalog.n_sources

    @property
    def candidates(self) -> np.ndarray:
        """Sources appearing in at least one entry."""
        return np.flatnonzero(np.diff(self.src_ptr) > 0)

    @property
    def active(self) -> np.ndarray:
        """Entries that are neither covered nor pruned."""
        return ~(self.covered | self.pruned)

    def entry(self, e: int) -> IndexEntry:
        ids = self.catalog.source_ids
        return IndexEntry(
            item_id=self.catalog.item_ids[self.entry_item[e]],
            value=self.entry_value[e],
            prob=float(self.prob[e]),
            sources=tuple(ids[s] for s in self.postings[self.ptr[e]:self.ptr[e + 1]].tolist()),
            covered=bool(self.covered[e]),
            pruned=bool(self.pruned[e]),
        )

    @property
    def entries(self) -> list[IndexEntry]:
        return [self.entry(e) for e in range(len(self))]

    def entry_key(self, e: int) -> str:
        return f"{self.catalog.item_ids[self.entry_item[e]]}.{self.entry_value[e]}"

    def find(self, item_id: str, value: str) -> int:
        for e in self.by_item.get(item_id, ()):
            if self.entry_value[e] == value:
                return e
        raise KeyError(f"no entry {item_id}.{value}")

    def sources_of(self, e: int) -> np.ndarray:
        return self.postings[self.ptr[e]:self.ptr[e + 1]]

    def entries_of(self, s: int) -> np.ndarray:
        return self.src_entries[self.src_ptr[s]:self.src_ptr[s + 1]]

    def source_idx(self, source_id: str | int) -> int:
        if isinstance(source_id, (int, np.integer)):
            if not 0 <= source_id < self.n_sources:
                raise KeyError(f"unknown source index {source_id}")
            return int(source_id)
        return self.catalog.lookup_source(source_id)

    def reset(self) -> None:
        """Clear both flag columns, ready for a fresh selection run."""
        self.covered[:] = False
        self.pruned[:] = False

    def cover(self, sources: Iterable[str | int]) -> None:
        """Set ``covered`` on every entry asserted by one of ``sources``."""
        for s in sources:
            self.covered[self.entries_of(self.source_idx(s))] = True

    def to_rows(self) -> list[tuple[str, str, float, tuple[str, ...]]]:
        return [(e.item_id, e.value, e.prob, e.sources) for e in self.entries]


def build_index(catalog: SourceCatalog, query: Optional[Query] = None) -> CoverageIndex:
    """Load the entries of the queried items.

    Entries are grouped by item in catalog order; within an item they run by
    descending probability, ties by value string. Sources that assert no
    queried value get no postings and never become candidates.
    """
    if query is None:
        query = Query(tuple(catalog.item_ids))
    wanted = np.zeros(catalog.n_items, dtype=bool)
    missing = []
    for d in query.item_ids:
        if d in catalog.item_index:
            wanted[catalog.item_index[d]] = True
        else:
            missing.append(d)
    if missing:
        logger.warning("query items absent from catalog: %s", ", ".join(missing))

    codes = np.flatnonzero(wanted[catalog.value_item])
    probs = catalog.value_prob
    order = sorted(
        codes.tolist(),
        key=lambda c: (catalog.value_item[c], -probs[c], catalog.value_labels[c]),
    )
    order = np.array(order, dtype=np.int64)
    n_entries = len(order)
    code_to_entry = np.full(len(catalog.value_labels), -1, dtype=np.int64)
    code_to_entry[order] = np.arange(n_entries)

    claim_entry = code_to_entry[catalog.claim_value]
    keep = claim_entry >= 0
    c_entry = claim_entry[keep]
    c_source = catalog.claim_source[keep]

    by_entry = np.lexsort((c_source, c_entry))
    postings = c_source[by_entry]
    ptr = _csr(c_entry, n_entries)

    by_source = np.lexsort((c_entry, c_source))
    src_entries = c_entry[by_source]
    src_ptr = _csr(c_source, catalog.n_sources)

    query_items = [d for d in catalog.item_ids if wanted[catalog.item_index[d]]]
    present = set(catalog.value_item[order].tolist())
    empty = [d for d in query_items if catalog.item_index[d] not in present]
    return CoverageIndex(
        catalog=catalog,
        query_items=query_items,
        entry_item=catalog.value_item[order],
        entry_value=[catalog.value_labels[c] for c in order.tolist()],
        prob=probs[order].astype(np.float64),
        ptr=ptr,
        postings=postings,
        src_ptr=src_ptr,
        src_entries=src_entries,
        missing_items=missing,
        empty_items=empty,
    )
