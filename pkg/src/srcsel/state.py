"""Mutable per-run selection state and the shared ranking rule."""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .index import CoverageIndex

RATIO_DECIMALS = 9
BUDGET_SLACK = 1e-9


def ratio_key(ratio):
    """Ratios are ranked after rounding, so sums that differ only by float
    ordering noise tie and fall through to the cost / id tie-breaks."""
    return np.round(ratio, RATIO_DECIMALS)


def skip_margin(r_star: float) -> float:
    # Wide enough that a skipped source can never share the winner's rounded key.
    return 2 * 10.0 ** -RATIO_DECIMALS + 1e-12 * abs(r_star)


class Pick(NamedTuple):
    source: int
    marginal: float
    ratio: float
    scored: int
    skipped: int


class RoundState:
    """Selected set, running cost/coverage, and per-source open-value counts.

    ``open_values[s]`` counts the entries of ``s`` that are neither covered
    nor pruned. A source is a candidate while that count is positive, which
    is exactly the MinCost continue-condition restricted to ``s``.
    """

    def __init__(self, index: CoverageIndex, budget: Optional[float] = None):
        self.index = index
        self.costs = index.catalog.costs
        self.budget = budget
        self.selected: list[int] = []
        self.total_cost = 0.0
        self.coverage = 0.0
        self.round = 0
        self.gains: Optional[np.ndarray] = None
        active = index.active
        self.remaining = int(np.count_nonzero(active))
        self.covered_count = 0
        live = active[index.entry_posting]
        self.open_values = np.bincount(index.postings[live], minlength=index.n_sources)
        self.n_open = int(np.count_nonzero(self.open_values))
        self._live_entry = index.entry_posting[live]
        self._live_src = index.postings[live]

    @property
    def budget_left(self) -> float:
        if self.budget is None:
            return float("inf")
        return self.budget - self.total_cost

    def fits(self, cost: float) -> bool:
        return cost <= self.budget_left + BUDGET_SLACK

    def candidate_mask(self) -> np.ndarray:
        mask = self.open_values > 0
        if self.budget is not None:
            mask &= self.costs <= self.budget_left + BUDGET_SLACK
        return mask

    def n_candidates(self) -> int:
        if self.budget is None:
            return self.n_open
        return int(np.count_nonzero(self.candidate_mask()))

    def is_candidate(self, sources: np.ndarray) -> np.ndarray:
        ok = self.open_values[sources] > 0
        if self.budget is not None:
            ok &= self.costs[sources] <= self.budget_left + BUDGET_SLACK
        return ok

    def live_gains(self) -> np.ndarray:
        """Per-source sum over open entries, accumulated in entry order."""
        index = self.index
        keep = index.active[self._live_entry]
        if not keep.all():
            self._live_entry = self._live_entry[keep]
            self._live_src = self._live_src[keep]
        self.gains = np.bincount(
            self._live_src, weights=index.prob[self._live_entry], minlength=index.n_sources
        )
        return self.gains

    def commit(self, s: int, marginal: float) -> None:
        """Add ``s`` to the selection and flag every entry it asserts."""
        index = self.index
        ents = index.entries_of(s)
        fresh = ents[~(index.covered[ents] | index.pruned[ents])]
        index.covered[ents] = True
        if len(fresh):
            hit = np.concatenate([index.sources_of(e) for e in fresh.tolist()])
            self.open_values -= np.bincount(hit, minlength=index.n_sources)
            touched = np.unique(hit)
            self.n_open -= int(np.count_nonzero(self.open_values[touched] == 0))
        self.remaining -= len(fresh)
        self.covered_count += len(fresh)
        self.selected.append(s)
        self.total_cost += float(self.costs[s])
        self.coverage += marginal
        self.round += 1
