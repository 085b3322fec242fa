import logging

import numpy as np
import pytest
from hypothesis import given, strategies as st

from srcsel import CatalogError, Claim, Query, SourceCatalog, estimate_truth_probabilities, ingest_claims
from srcsel.model import read_claims, read_costs, read_query, vote_share, write_claims, write_costs

from conftest import HQ, HQ_QUERY


def test_hq_shape(hq):
    assert hq.n_claims == 32
    assert hq.n_sources == 7
    assert hq.item_ids == ["AT&T", "Google", "MS", "IBM", "Apple"]
    assert hq.source_ids == [f"S_{i}" for i in range(1, 8)]
    assert np.all(hq.costs == 1.0)


def test_hq_probabilities(hq):
    assert hq.item_values("MS") == {"WA": 0.99, "TX": 0.0, "BJ": 0.01}
    assert hq.item_values("Apple") == {"CA": 0.93, "NY": 0.02, "WA": 0.05}


def test_claim_roundtrip(hq, tmp_path):
    write_claims(hq, tmp_path / "c.csv")
    write_costs(hq, tmp_path / "k.csv")
    again = ingest_claims(tmp_path / "c.csv", tmp_path / "k.csv")
    assert list(again.claims()) == list(hq.claims())
    assert np.array_equal(again.costs, hq.costs)


def test_costs_default_and_cost_only_sources():
    cat = SourceCatalog.from_claims(
        [Claim("A", "d", "x", 1.0)], {"A": 2.5, "B": 3.0}
    )
    assert cat.cost("A") == 2.5
    assert cat.cost("B") == 3.0
    cat = SourceCatalog.from_claims([Claim("A", "d", "x", 1.0)])
    assert cat.cost("A") == 1.0


def test_nonpositive_cost_rejected():
    with pytest.raises(CatalogError, match="nonpositive"):
        SourceCatalog.from_claims([Claim("A", "d", "x", 1.0)], {"A": 0.0})


def test_conflicting_value_rejected():
    with pytest.raises(CatalogError, match="conflicting value"):
        SourceCatalog.from_claims([Claim("A", "d", "x", 0.5), Claim("A", "d", "y", 0.5)])


def test_exact_duplicate_collapsed():
    cat = SourceCatalog.from_claims([Claim("A", "d", "x", 0.5), Claim("A", "d", "x", 0.5)])
    assert cat.n_claims == 1


def test_inconsistent_probability_rejected():
    with pytest.raises(CatalogError, match="probabilities"):
        SourceCatalog.from_claims([Claim("A", "d", "x", 0.5), Claim("B", "d", "x", 0.6)])


def test_partial_probabilities_rejected():
    with pytest.raises(CatalogError, match="lacks probabilities"):
        SourceCatalog.from_claims([Claim("A", "d", "x", 0.5), Claim("B", "d", "y")])


def test_probability_out_of_range():
    with pytest.raises(CatalogError, match="outside"):
        SourceCatalog.from_claims([Claim("A", "d", "x", 1.5)])


def test_sum_above_one_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="srcsel.model"):
        SourceCatalog.from_claims([Claim("A", "d", "x", 0.7), Claim("B", "d", "y", 0.7)])
    assert "sum to" in caplog.text


def test_vote_share_attt(hq):
    shares = estimate_truth_probabilities(hq, "AT&T")
    assert shares == pytest.approx({"DA": 4 / 6, "TE": 1 / 6, "NY": 1 / 6}, abs=1e-12)


def test_missing_probabilities_fall_back_to_votes():
    cat = SourceCatalog.from_claims([("A", "d", "x"), ("B", "d", "x"), ("C", "d", "y")])
    assert cat.item_values("d") == {"x": 2 / 3, "y": 1 / 3}


@given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=40))
def test_vote_share_sums_to_one(values):
    shares = vote_share(values)
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-12)
    assert set(shares) == set(values)


def test_read_claims_line_numbers(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("source,item,value,prob\nA,d,x,0.5\nA,d,y\n")
    with pytest.raises(CatalogError, match="line 3"):
        read_claims(p)
    p.write_text("source,item,value,prob\nA,d,x,zero\n")
    with pytest.raises(CatalogError, match="line 2: bad probability"):
        read_claims(p)
    p.write_text("src,item,value,prob\n")
    with pytest.raises(CatalogError, match="line 1"):
        read_claims(p)


def test_conflict_reports_line(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("source,item,value,prob\nA,d,x,0.5\nB,d,y,0.5\nA,d,y,0.5\n")
    with pytest.raises(CatalogError, match="line 4: conflicting"):
        ingest_claims(p)


def test_read_costs_errors(tmp_path):
    p = tmp_path / "k.csv"
    p.write_text("source,cost\nA,-1\n")
    with pytest.raises(CatalogError, match="line 2: nonpositive"):
        read_costs(p)
    p.write_text("source,cost\nA,cheap\n")
    with pytest.raises(CatalogError, match="bad cost"):
        read_costs(p)


def test_query():
    q = read_query(HQ_QUERY)
    assert q.item_ids == ("AT&T", "Google", "MS", "IBM", "Apple")
    with pytest.raises(CatalogError):
        Query(())


def test_unknown_source_lookup(hq):
    with pytest.raises(KeyError, match="unknown source"):
        hq.lookup_source("S_9")


def test_scaled_costs(hq):
    assert np.all(hq.scaled_costs(3.0).costs == 3.0)
    assert np.all(hq.costs == 1.0)


def test_ingest_path():
    assert ingest_claims(HQ).n_claims == 32
