"""Expected-true-answer coverage of sources and source sets.

All sums run sequentially in index entry order. The greedy driver and the
lazy evaluator both rely on this to produce bit-identical marginals.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

import numpy as np

from .index import CoverageIndex

MAX_ENUMERATION = 20


def seqsum(values: np.ndarray) -> float:
    """Left-to-right float sum starting from 0.0 (matches ``np.bincount``)."""
    total = 0.0
    for x in values.tolist():
        total += x
    return total


def _marginal(index: CoverageIndex, s: int) -> float:
    ents = index.entries_of(s)
    live = ents[~(index.covered[ents] | index.pruned[ents])]
    return seqsum(index.prob[live])


def batch_marginals(index: CoverageIndex, sources: np.ndarray) -> np.ndarray:
    """Marginals of many sources at once; same float result as ``_marginal`` per source."""
    starts = index.src_ptr[sources]
    lens = index.src_ptr[sources + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.zeros(len(sources))
    owner = np.repeat(np.arange(len(sources)), lens)
    offsets = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens)
    ents = index.src_entries[np.repeat(starts, lens) + offsets]
    live = ~(index.covered[ents] | index.pruned[ents])
    return np.bincount(owner[live], weights=index.prob[ents[live]], minlength=len(sources))


def cov_source(index: CoverageIndex, source_id: str | int) -> float:
    """Sum of probabilities over the unpruned values asserted by one source."""
    ents = index.entries_of(index.source_idx(source_id))
    return seqsum(index.prob[ents[~index.pruned[ents]]])


def cov_set(index: CoverageIndex, sources: Iterable[str | int]) -> float:
    """Coverage of a source set; each distinct value counts once."""
    hit = np.zeros(len(index), dtype=bool)
    for s in sources:
        hit[index.entries_of(index.source_idx(s))] = True
    return seqsum(index.prob[hit & ~index.pruned])


def cov_omega(index: CoverageIndex) -> float:
    """Coverage of every candidate source: total unpruned probability mass."""
    return seqsum(index.prob[~index.pruned])


def marginal_index(index: CoverageIndex, source_id: str | int) -> float:
    """Irreplaceable contribution of a source given the current covered flags.

    Only the values of the source that no selected source asserts (flag not
    set) and that survived value pruning are accumulated.
    """
    return _marginal(index, index.source_idx(source_id))


def marginal_inclusion_exclusion(
    index: CoverageIndex, selected: Iterable[str | int], source_id: str | int
) -> float:
    """Irreplaceable contribution by inclusion-exclusion over subsets of ``selected``.

    Exponential in ``len(selected)``; kept as a test oracle and independent of
    the covered flags.
    """
    s = index.source_idx(source_id)
    chosen = sorted({index.source_idx(t) for t in selected})
    if s in chosen:
        raise ValueError("the probed source must not be in the selected set")
    if len(chosen) > MAX_ENUMERATION:
        raise ValueError(f"inclusion-exclusion is capped at {MAX_ENUMERATION} selected sources")

    def values(t: int) -> set[int]:
        ents = index.entries_of(t)
        return set(ents[~index.pruned[ents]].tolist())

    own = values(s)
    others = [values(t) for t in chosen]
    prob = index.prob.tolist()
    result = sum(prob[e] for e in own)
    for k in range(1, len(chosen) + 1):
        sign = 1.0 if k % 2 else -1.0
        for group in combinations(others, k):
            common = own.intersection(*group)
            result -= sign * sum(prob[e] for e in common)
    return result
