from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srcsel import build_index, cov_set, cov_source, marginal_inclusion_exclusion, marginal_index
from srcsel.coverage import MAX_ENUMERATION, batch_marginals, cov_omega

from _gen import random_catalog

TOL = 1e-9


@pytest.mark.parametrize("src,expected", [
    ("S_1", 3.64), ("S_2", 3.40), ("S_3", 2.15), ("S_4", 2.49),
    ("S_5", 1.35), ("S_6", 1.97), ("S_7", 2.49),
])
def test_first_round_contributions(index, src, expected):
    assert cov_source(index, src) == pytest.approx(expected, abs=TOL)
    assert marginal_index(index, src) == pytest.approx(expected, abs=TOL)


def test_set_coverage(index):
    assert cov_set(index, ["S_1", "S_2"]) == pytest.approx(4.48, abs=TOL)
    assert cov_set(index, []) == 0.0
    assert cov_omega(index) == pytest.approx(5.00, abs=TOL)
    assert cov_set(index, index.catalog.source_ids) == pytest.approx(5.00, abs=TOL)


def test_second_round_marginals(index):
    index.cover(["S_1"])
    got = {s: marginal_index(index, s) for s in ["S_2", "S_3", "S_4", "S_5", "S_6", "S_7"]}
    expected = {"S_2": 0.84, "S_3": 0.58, "S_4": 0.57, "S_5": 0.61, "S_6": 0.59, "S_7": 0.76}
    assert got == pytest.approx(expected, abs=TOL)


def test_marginals_after_two(index):
    index.cover(["S_1", "S_2"])
    assert marginal_index(index, "S_4") == pytest.approx(0.31, abs=TOL)
    assert marginal_index(index, "S_6") == pytest.approx(0.01, abs=TOL)


def test_inclusion_exclusion_example(index):
    assert marginal_inclusion_exclusion(index, ["S_1", "S_2"], "S_6") == pytest.approx(0.01, abs=TOL)
    assert marginal_inclusion_exclusion(index, [], "S_1") == pytest.approx(3.64, abs=TOL)


def test_inclusion_exclusion_guards(index):
    with pytest.raises(ValueError, match="must not be in"):
        marginal_inclusion_exclusion(index, ["S_1"], "S_1")
    wide = build_index(random_catalog(np.random.default_rng(0), n_sources=MAX_ENUMERATION + 2))
    with pytest.raises(ValueError, match="capped"):
        marginal_inclusion_exclusion(wide, range(1, MAX_ENUMERATION + 2), 0)


def test_batch_marginals_match_scalar(index):
    index.cover(["S_1"])
    srcs = np.arange(index.n_sources)
    batch = batch_marginals(index, srcs)
    for s in srcs.tolist():
        assert batch[s] == marginal_index(index, s)  # bit-identical


def test_pruned_entries_excluded(index):
    index.pruned[index.find("IBM", "WA")] = True
    assert cov_source(index, "S_1") == pytest.approx(3.30, abs=TOL)
    assert cov_omega(index) == pytest.approx(4.66, abs=TOL)


def _instance(seed):
    rng = np.random.default_rng(seed)
    cat = random_catalog(rng, n_sources=int(rng.integers(2, 9)))
    return rng, build_index(cat)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_index_marginal_equals_oracle(seed):
    rng, ix = _instance(seed)
    n = ix.n_sources
    for _ in range(4):
        k = int(rng.integers(0, min(6, n - 1) + 1))
        chosen = rng.choice(n, size=k, replace=False).tolist()
        ix.reset()
        ix.cover(chosen)
        for s in set(range(n)) - set(chosen):
            assert marginal_index(ix, s) == pytest.approx(
                marginal_inclusion_exclusion(ix, chosen, s), abs=TOL)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_monotone_and_submodular(seed):
    rng, ix = _instance(seed)
    n = ix.n_sources
    b = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist()
    a = b[: int(rng.integers(0, len(b) + 1))]
    assert cov_set(ix, a) <= cov_set(ix, b) + TOL
    for s in set(range(n)) - set(b):
        gain_a = cov_set(ix, a + [s]) - cov_set(ix, a)
        gain_b = cov_set(ix, b + [s]) - cov_set(ix, b)
        assert gain_b <= gain_a + TOL


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_coverage_decomposes_into_marginals(seed):
    rng, ix = _instance(seed)
    order = rng.permutation(ix.n_sources).tolist()
    total = 0.0
    for k, s in enumerate(order):
        ix.reset()
        ix.cover(order[:k])
        total += marginal_index(ix, s)
        ix.reset()
        assert total == pytest.approx(cov_set(ix, order[: k + 1]), abs=TOL)


def test_bounds_on_hq(index):
    ids = index.catalog.source_ids
    for k in range(len(ids) + 1):
        for group in combinations(ids, k):
            c = cov_set(index, group)
            assert 0.0 <= c <= cov_omega(index) + TOL
