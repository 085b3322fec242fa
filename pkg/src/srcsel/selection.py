"""Greedy source selection for the MinCost and MaxContribution objectives."""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .coverage import MAX_ENUMERATION, cov_omega
from .index import CoverageIndex
from .pruning import ValuePruneReport, prune_values, seed_lazy, select_max_round_lazy
from .state import Pick, RoundState, ratio_key

logger = logging.getLogger(__name__)


class Objective(str, enum.Enum):
    MIN_COST = "mincost"
    MAX_CONTRIBUTION = "maxcontrib"


@dataclass(frozen=True)
class SelectionConfig:
    objective: Objective = Objective.MIN_COST
    budget: Optional[float] = None
    rho: Optional[float] = None
    source_prune: bool = False

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        if self.budget is not None and not self.budget > 0:
            raise ValueError("budget must be positive")
        if self.objective is Objective.MAX_CONTRIBUTION and self.budget is None:
            raise ValueError("MaxContribution needs a budget")
        if self.objective is Objective.MIN_COST and self.budget is not None:
            raise ValueError("a budget only applies to MaxContribution")
        if self.rho is not None and not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")

    @property
    def strategy(self) -> str:
        name = "Basic"
        if self.source_prune:
            name += "+S"
        if self.rho is not None:
            name += "+V"
        return name


@dataclass
class RoundRecord:
    round: int
    source: str
    marginal: float
    ratio: float
    cum_cov: float
    cum_cost: float
    scored: int
    skipped: int


@dataclass
class SelectionReport:
    objective: str
    strategy: str
    budget: Optional[float]
    rho: Optional[float]
    selected: list[str]
    rounds: list[RoundRecord]
    coverage: float
    total_cost: float
    cov_omega: float
    n_entries: int
    n_candidates: int
    value_prune: Optional[ValuePruneReport] = None
    metrics: Optional[dict] = None
    missing_items: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def scored_per_round(self) -> list[int]:
        return [r.scored for r in self.rounds]

    @property
    def skipped_total(self) -> int:
        return sum(r.skipped for r in self.rounds)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["value_prune"] = self.value_prune.to_dict() if self.value_prune else None
        return d


def select_max_round(
    index: CoverageIndex, state: RoundState, positive_only: bool = False
) -> Pick | None:
    """One eager round: score every open entry, take the best ratio, flag its entries.

    Ranking is by rounded ratio, then lower cost, then smaller source id.
    """
    gains = state.live_gains()
    costs = state.costs
    cand = state.candidate_mask()
    n_cand = int(np.count_nonzero(cand))
    if n_cand == 0:
        return None
    ratio = gains / costs
    q = ratio_key(ratio)
    tie = cand & (q == q[cand].max())
    tie &= costs == costs[tie].min()
    best = int(np.argmax(tie))
    m = float(gains[best])
    if positive_only and not m > 0:
        return None
    state.commit(best, m)
    return Pick(best, m, float(ratio[best]), n_cand, 0)


def run_selection(index: CoverageIndex, config: SelectionConfig) -> SelectionReport:
    """Run greedy rounds until the objective's continue-condition fails.

    The index flags are reset first, so one index can serve many runs.
    """
    t0 = time.perf_counter()
    index.reset()
    prune = prune_values(index, config.rho) if config.rho is not None else None
    t_prune = time.perf_counter()

    maxc = config.objective is Objective.MAX_CONTRIBUTION
    state = RoundState(index, config.budget if maxc else None)
    warnings = []
    n_candidates = int(np.count_nonzero(state.open_values > 0))
    if maxc and n_candidates and not state.candidate_mask().any():
        msg = f"budget {config.budget} is below every candidate's cost"
        logger.warning(msg)
        warnings.append(msg)
    lazy = seed_lazy(index, state) if config.source_prune else None

    ids = index.catalog.source_ids
    rounds: list[RoundRecord] = []
    while state.remaining > 0:
        if lazy is not None:
            pick = select_max_round_lazy(index, state, lazy, positive_only=maxc)
        else:
            pick = select_max_round(index, state, positive_only=maxc)
        if pick is None:
            break
        rounds.append(RoundRecord(
            round=state.round,
            source=ids[pick.source],
            marginal=pick.marginal,
            ratio=pick.ratio,
            cum_cov=state.coverage,
            cum_cost=state.total_cost,
            scored=pick.scored,
            skipped=pick.skipped,
        ))
    t_end = time.perf_counter()

    return SelectionReport(
        objective=config.objective.value,
        strategy=config.strategy,
        budget=config.budget,
        rho=config.rho,
        selected=[ids[s] for s in state.selected],
        rounds=rounds,
        coverage=state.coverage,
        total_cost=state.total_cost,
        cov_omega=cov_omega(index),
        n_entries=len(index),
        n_candidates=n_candidates,
        value_prune=prune,
        missing_items=list(index.missing_items),
        warnings=warnings,
        timings={
            "prune_s": t_prune - t0,
            "select_s": t_end - t_prune,
            "total_s": t_end - t0,
        },
    )


def run_min_cost(index: CoverageIndex, config: Optional[SelectionConfig] = None) -> SelectionReport:
    config = config or SelectionConfig()
    if config.objective is not Objective.MIN_COST:
        raise ValueError("run_min_cost needs objective mincost")
    return run_selection(index, config)


def run_max_contribution(index: CoverageIndex, config: SelectionConfig) -> SelectionReport:
    if config.objective is not Objective.MAX_CONTRIBUTION:
        raise ValueError("run_max_contribution needs objective maxcontrib")
    return run_selection(index, config)


def brute_force_optimal(
    index: CoverageIndex, config: SelectionConfig
) -> tuple[float, list[str]]:
    """Exact optimum by enumerating every subset of candidate sources.

    MaxContribution: largest coverage with cost within budget.
    MinCost: cheapest set covering every unpruned value.
    Uses the index's current pruned flags and ignores covered flags.
    """
    cand = index.candidates.tolist()
    if len(cand) > MAX_ENUMERATION:
        raise ValueError(f"brute force is capped at {MAX_ENUMERATION} candidate sources")
    keep = ~index.pruned
    cand = [s for s in cand if keep[index.entries_of(s)].any()]
    prob = index.prob.tolist()
    masks = []
    for s in cand:
        m = 0
        for e in index.entries_of(s).tolist():
            if keep[e]:
                m |= 1 << e
        masks.append(m)
    costs = [float(index.catalog.costs[s]) for s in cand]
    ids = index.catalog.source_ids

    def mass(mask: int) -> float:
        total = 0.0
        while mask:
            low = mask & -mask
            total += prob[low.bit_length() - 1]
            mask ^= low
        return total

    n = len(cand)
    full = 0
    for m in masks:
        full |= m
    cover = [0] * (1 << n)
    cost = [0.0] * (1 << n)
    maxc = config.objective is Objective.MAX_CONTRIBUTION
    best_val = 0.0 if maxc else (0.0 if full == 0 else math.inf)
    best_sub = 0
    for sub in range(1, 1 << n):
        low = sub & -sub
        i = low.bit_length() - 1
        rest = sub ^ low
        cover[sub] = cover[rest] | masks[i]
        cost[sub] = cost[rest] + costs[i]
        if maxc:
            if cost[sub] <= config.budget + 1e-9:
                v = mass(cover[sub])
                if v > best_val + 1e-12:
                    best_val, best_sub = v, sub
        elif cover[sub] == full and cost[sub] < best_val - 1e-12:
            best_val, best_sub = cost[sub], sub
    witness = [ids[cand[i]] for i in range(n) if best_sub >> i & 1]
    return best_val, witness
