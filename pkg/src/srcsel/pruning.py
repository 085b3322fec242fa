"""Value-level and source-level pruning.

Value-level pruning drops, per item, the ascending-probability prefix whose
mass stays within ``ln(1/rho)``. Source-level pruning keeps the last exact
marginal of every source as an upper bound (coverage is submodular) and
skips sources whose bound cannot beat the best ratio seen in the round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coverage import batch_marginals, cov_omega
from .index import CoverageIndex
from .state import Pick, RoundState, ratio_key, skip_margin

CHUNK = 256


def derive_value_threshold(rho: float) -> float:
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    return math.log(1.0 / rho)


@dataclass
class ItemPrune:
    item_id: str
    pruned: list[str]
    pruned_mass: float
    retained_mass: float
    retention: float


@dataclass
class ValuePruneReport:
    rho: float
    threshold: float
    items: list[ItemPrune] = field(default_factory=list)

    @property
    def n_pruned(self) -> int:
        return sum(len(it.pruned) for it in self.items)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "threshold": self.threshold,
            "n_pruned": self.n_pruned,
            "items": [
                {
                    "item": it.item_id,
                    "pruned": it.pruned,
                    "pruned_mass": it.pruned_mass,
                    "retained_mass": it.retained_mass,
                    "retention": it.retention,
                }
                for it in self.items
            ],
        }


def prune_values(index: CoverageIndex, rho: float) -> ValuePruneReport:
    """Flag low-probability values of every queried item as pruned.

    The last remaining value of an item is never pruned.
    """
    p = derive_value_threshold(rho)
    report = ValuePruneReport(rho=rho, threshold=p)
    prob = index.prob
    for item_id, ents in index.by_item.items():
        order = sorted(ents, key=lambda e: (prob[e], index.entry_value[e]))
        cum = 0.0
        cut = 0
        for e in order[:-1]:
            # rho = 1 keeps everything, zero-mass values included
            if p == 0.0 or cum + prob[e] > p:
                break
            cum += float(prob[e])
            cut += 1
        dropped = order[:cut]
        index.pruned[dropped] = True
        retention = 1.0
        for e in dropped:
            retention *= 1.0 - float(prob[e])
        kept = sum(float(prob[e]) for e in order[cut:])
        report.items.append(ItemPrune(
            item_id=item_id,
            pruned=[index.entry_value[e] for e in dropped],
            pruned_mass=cum,
            retained_mass=kept,
            retention=retention,
        ))
    return report


@dataclass
class LazyState:
    """Cached marginals ``con`` (valid upper bounds) and the round they date from.

    ``order`` lists live sources by descending ``okey``, the cached ratio at
    the time the source was last placed; ``okey`` never understates the
    current cached ratio, so a walk down ``order`` can stop early.
    """

    con: np.ndarray
    stamp: np.ndarray
    cov_omega: float
    order: np.ndarray
    okey: np.ndarray
    cov_selected: float = 0.0


def seed_lazy(index: CoverageIndex, state: RoundState) -> LazyState:
    """One full scoring pass: with nothing selected the marginal is Cov(S)."""
    gains = state.live_gains().copy()
    stamp = np.zeros(index.n_sources, dtype=np.int64)
    cand = np.flatnonzero(state.open_values > 0)
    stamp[cand] = state.round + 1
    key = gains[cand] / state.costs[cand]
    srt = np.argsort(-key, kind="stable")
    return LazyState(
        con=gains, stamp=stamp, cov_omega=cov_omega(index), order=cand[srt], okey=key[srt]
    )


def upper_bound(s: int, lazy: LazyState, cost: float) -> float:
    """Bound on the selection ratio of ``s`` from cached values only."""
    return min(lazy.cov_omega - lazy.cov_selected, float(lazy.con[s])) / cost


def select_max_round_lazy(
    index: CoverageIndex,
    state: RoundState,
    lazy: LazyState,
    positive_only: bool = False,
    chunk: int = CHUNK,
) -> Pick | None:
    """Pick the same source as the eager round while scoring fewer sources.

    Candidates are visited in descending cached ratio, in blocks that double
    from 1 up to ``chunk``. A candidate whose bound is below the running best
    ratio is skipped; once the cached ratio itself drops below it, every
    later candidate is skipped too.
    """
    cur = state.round + 1
    n_cand = state.n_candidates()
    if n_cand == 0:
        return None
    costs = state.costs
    con = lazy.con
    remaining = lazy.cov_omega - lazy.cov_selected
    order, okey = lazy.order, lazy.okey

    best_key = None
    r_star = -math.inf
    scored = 0
    pos = 0
    size = 1
    while pos < len(order):
        if best_key is not None:
            margin = skip_margin(r_star)
            if okey[pos] < r_star - margin:
                break
        block = order[pos:pos + size]
        pos += len(block)
        size = min(2 * size, chunk)
        block = block[state.is_candidate(block)]
        if best_key is not None:
            block = block[np.minimum(remaining, con[block]) / costs[block] >= r_star - margin]
        if block.size == 0:
            continue
        scored += _refresh(index, lazy, block, cur)
        ratio = con[block] / costs[block]
        q = ratio_key(ratio)
        tie = q == q.max()
        tie &= costs[block] == costs[block][tie].min()
        tied = np.flatnonzero(tie)
        i = int(tied[np.argmin(block[tied])])
        key = (q[i], -float(costs[block[i]]), -int(block[i]))
        if best_key is None or key > best_key:
            best_key, r_star = key, float(ratio[i])

    if cur == 1:
        scored = n_cand  # the seeding pass scored every candidate
    if best_key is None:
        return None
    best = -best_key[2]
    m = float(con[best])
    if positive_only and not m > 0:
        _reinsert(state, lazy, pos)
        return None
    state.commit(best, m)
    lazy.cov_selected += m
    _reinsert(state, lazy, pos)
    return Pick(best, m, r_star, scored, n_cand - scored)


def _refresh(index: CoverageIndex, lazy: LazyState, srcs: np.ndarray, cur: int) -> int:
    """Recompute stale cached marginals among ``srcs``; returns how many were scored."""
    stale = srcs[lazy.stamp[srcs] != cur]
    if stale.size:
        lazy.con[stale] = batch_marginals(index, stale)
        lazy.stamp[stale] = cur
    return int(stale.size)


def _reinsert(state: RoundState, lazy: LazyState, walked: int) -> None:
    """Merge the visited prefix back into ``order`` under refreshed keys.

    Sources that stopped being candidates are dropped; neither open values
    nor budget headroom ever grow back within a run.
    """
    head = lazy.order[:walked]
    head = head[state.is_candidate(head)]
    key = lazy.con[head] / state.costs[head]
    srt = np.argsort(-key, kind="stable")
    head, key = head[srt], key[srt]
    rest, rest_key = lazy.order[walked:], lazy.okey[walked:]
    at = np.searchsorted(-rest_key, -key, side="right")
    lazy.order = np.insert(rest, at, head)
    lazy.okey = np.insert(rest_key, at, key)
