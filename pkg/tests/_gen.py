"""Random small catalogs shared by property and acceptance tests."""

from __future__ import annotations

import logging

import numpy as np

from srcsel.model import Claim, SourceCatalog

COST_REGIMES = ("unit", "int", "real")


def random_catalog(
    rng: np.random.Generator,
    n_sources: int | None = None,
    n_items: int | None = None,
    costs: str = "unit",
    density: float = 0.7,
    max_values: int = 4,
) -> SourceCatalog:
    """Each item gets a Dirichlet distribution over up to ``max_values`` values,
    rounded to two decimals; each source claims an item with ``density``."""
    n_sources = n_sources or int(rng.integers(2, 9))
    n_items = n_items or int(rng.integers(1, 7))
    dists = []
    for _ in range(n_items):
        k = int(rng.integers(1, max_values + 1))
        dists.append(np.round(rng.dirichlet(np.ones(k)), 2))
    claims = []
    for s in range(n_sources):
        for d, p in enumerate(dists):
            if rng.random() < density:
                v = int(rng.integers(0, len(p)))
                claims.append(Claim(f"S{s:02d}", f"D{d}", f"v{v}", float(p[v])))
    if not claims:
        claims.append(Claim("S00", "D0", "v0", 1.0))
    if costs == "unit":
        cost = {f"S{s:02d}": 1.0 for s in range(n_sources)}
    elif costs == "int":
        cost = {f"S{s:02d}": float(rng.integers(1, 6)) for s in range(n_sources)}
    elif costs == "real":
        cost = {f"S{s:02d}": float(np.round(rng.uniform(0.5, 4.0), 3)) for s in range(n_sources)}
    else:
        raise ValueError(costs)
    # two-decimal rounding can push a distribution's sum a hair past 1
    logger = logging.getLogger("srcsel.model")
    level = logger.level
    logger.setLevel(logging.ERROR)
    try:
        return SourceCatalog.from_claims(claims, cost)
    finally:
        logger.setLevel(level)
