import logging

import numpy as np
from hypothesis import given, settings, strategies as st

from srcsel import Query, build_index

from _gen import random_catalog

REFERENCE_INDEX = [
    ("AT&T", "DA", ("S_1", "S_2", "S_3", "S_6"), 0.64),
    ("AT&T", "TE", ("S_4",), 0.23),
    ("AT&T", "NY", ("S_7",), 0.13),
    ("Google", "CA", ("S_1", "S_5", "S_6", "S_7"), 0.74),
    ("Google", "LA", ("S_2", "S_4"), 0.26),
    ("MS", "WA", ("S_1", "S_2", "S_4", "S_7"), 0.99),
    ("MS", "BJ", ("S_5", "S_6"), 0.01),
    ("MS", "TX", ("S_3",), 0.0),
    ("IBM", "NY", ("S_2", "S_3", "S_5", "S_6", "S_7"), 0.58),
    ("IBM", "WA", ("S_1",), 0.34),
    ("IBM", "BS", ("S_4",), 0.08),
    ("Apple", "CA", ("S_1", "S_2", "S_3", "S_4"), 0.93),
    ("Apple", "WA", ("S_7",), 0.05),
    ("Apple", "NY", ("S_5",), 0.02),
]


def test_hq_index_matches_reference(index):
    assert len(index) == 14
    assert [(d, v, s, p) for d, v, p, s in index.to_rows()] == REFERENCE_INDEX
    assert not index.covered.any() and not index.pruned.any()


def test_entry_lookup(index):
    e = index.find("IBM", "NY")
    assert index.entry_key(e) == "IBM.NY"
    assert index.entry(e).sources == ("S_2", "S_3", "S_5", "S_6", "S_7")


def test_query_restricts_entries(hq):
    ix = build_index(hq, Query(("Google",)))
    assert [e.key for e in ix.entries] == ["Google.CA", "Google.LA"]
    # S_3 asserts nothing about Google
    assert "S_3" not in {hq.source_ids[s] for s in ix.candidates}


def test_missing_item_warns(hq, caplog):
    with caplog.at_level(logging.WARNING, logger="srcsel.index"):
        ix = build_index(hq, Query(("Google", "Oracle")))
    assert ix.missing_items == ["Oracle"]
    assert "Oracle" in caplog.text
    assert len(ix) == 2


def test_cover_and_reset(index):
    index.cover(["S_1"])
    assert index.covered.sum() == 5
    index.reset()
    assert not index.covered.any()


def test_deterministic(hq):
    a, b = build_index(hq), build_index(hq)
    assert a.to_rows() == b.to_rows()
    assert np.array_equal(a.postings, b.postings)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_claim_is_posted_once(seed):
    cat = random_catalog(np.random.default_rng(seed))
    ix = build_index(cat)
    posted = sorted(
        (cat.source_ids[s], ix.entry(e).item_id, ix.entry(e).value)
        for e in range(len(ix)) for s in ix.sources_of(e).tolist()
    )
    claims = sorted((c.source_id, c.item_id, c.value) for c in cat.claims())
    assert posted == claims
    # both CSR directions agree
    for s in range(cat.n_sources):
        for e in ix.entries_of(s).tolist():
            assert s in ix.sources_of(e)
