from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import dow_tables
from oracles import dense_rank_by_sort
from ternrank.codec import CompressionStats
from ternrank.ranking import (
    CompressionScore,
    RankingError,
    cashflow_rms,
    compression_score,
    rank_cashflow,
    rank_compression,
    rank_volatility,
    total_ranking,
    volatility,
)


def test_compression_score_identity():
    stats = CompressionStats(l_src=100, l_cod=60, l_abc=40)
    assert compression_score(stats, 1, 1257, 1257).value == pytest.approx(100)


def test_compression_score_short_history():
    score = compression_score(18.5990, 1, 648, 1257)
    assert score.value == pytest.approx(36.0779, abs=1e-3)


def test_compression_score_minus_one_mode():
    assert compression_score(10.0, 1, 648, 1257, "minus-one").value == pytest.approx(10 * 1256 / 647)


def test_compression_score_negative_passthrough():
    assert compression_score(16.53397028, -1, 1257, 1257).value == -16.53397028


def test_compression_score_errors():
    with pytest.raises(RankingError, match="n_max"):
        compression_score(10.0, 1, 100, 50)
    with pytest.raises(RankingError):
        compression_score(10.0, 0, 100, 100)
    with pytest.raises(RankingError):
        compression_score(10.0, 1, 100, 100, "weird")


def test_rank_compression_two_phase():
    ranks = rank_compression({"a": 10.0, "b": 20.0, "c": -5.0, "d": -7.0})
    assert ranks == {"a": 1, "b": 2, "c": 3, "d": 4}


def test_rank_compression_ties():
    scores = [CompressionScore("DIS", 16.85244, 1257), CompressionScore("HON", 16.86571, 1257),
              CompressionScore("JPM", 16.86571, 1257), CompressionScore("PG", 16.98514, 1257)]
    assert rank_compression(scores) == {"DIS": 1, "HON": 2, "JPM": 2, "PG": 3}


def test_rank_compression_rejects_zero():
    with pytest.raises(RankingError, match="zero"):
        rank_compression({"a": 0.0, "b": 1.0})


def test_rank_compression_listing_column():
    """The eight-decimal variety column of the listing reproduces its rank column."""
    values = {row[0]: row[3] for row in dow_tables.LISTING}
    expected = {row[0]: row[5] for row in dow_tables.LISTING}
    assert rank_compression(values) == expected


non_zero = st.floats(min_value=-100, max_value=100, allow_nan=False).filter(lambda x: x != 0)
score_maps = st.dictionaries(st.text("ABCDEFGH", min_size=1, max_size=3), st.one_of(non_zero, st.sampled_from([1.5, -1.5, 2.5])), min_size=1, max_size=20)


@given(score_maps, st.randoms(use_true_random=False))
def test_rank_compression_dense_and_permutation_invariant(values, rnd):
    ranks = rank_compression(values)
    assert set(ranks.values()) == set(range(1, len(set(values.values())) + 1))
    items = list(values.items())
    rnd.shuffle(items)
    assert rank_compression(dict(items)) == ranks


@given(score_maps)
def test_rank_compression_matches_sort_oracle(values):
    pos = {t: v for t, v in values.items() if v > 0}
    neg = {t: v for t, v in values.items() if v < 0}
    if pos:
        assert rank_compression(pos) == dense_rank_by_sort(pos, key=lambda v: v)
    if neg:
        assert rank_compression(neg) == dense_rank_by_sort(neg, key=abs)
    oracle = dense_rank_by_sort(values, key=lambda v: (v < 0, abs(v)))
    assert rank_compression(values) == oracle


def test_cashflow_rms_examples():
    assert cashflow_rms([5.0] * 7) == pytest.approx(5.0)
    assert cashflow_rms([3, 4]) == pytest.approx(math.sqrt(12.5))
    assert cashflow_rms([0, 0, 0]) == 0
    with pytest.raises(RankingError):
        cashflow_rms([])


def test_rank_cashflow_examples():
    assert rank_cashflow({"a": 10, "b": 5, "c": 1}) == {"a": 1, "b": 2, "c": 3}
    assert rank_cashflow({"a": 3, "b": 3}) == {"a": 1, "b": 1}
    assert rank_cashflow({"AAPL": 6_931_222_546, "MSFT": 4_924_657_291}) == {"AAPL": 1, "MSFT": 2}


@given(st.dictionaries(st.text("XYZ", min_size=1, max_size=3), st.floats(0, 1e12), min_size=1, max_size=15),
       st.floats(1e-3, 1e3))
def test_rank_cashflow_scale_invariant(values, k):
    scaled = {t: v * k for t, v in values.items()}
    # distinct values must stay distinct after scaling for the property to hold
    if len(set(scaled.values())) == len(set(values.values())):
        assert rank_cashflow(scaled) == rank_cashflow(values)


def test_total_ranking_tie_break_on_variety():
    comp = {"MSFT": 1, "AAPL": 2}
    cash = {"MSFT": 2, "AAPL": 1}
    rows = total_ranking(comp, cash, {"MSFT": 16.00318471, "AAPL": 16.17569002})
    assert [r.ticker for r in rows] == ["MSFT", "AAPL"]
    assert [r.total_rank for r in rows] == [3, 3]


def test_total_ranking_negative_variety_uses_magnitude():
    comp = {"BA": 24, "CSCO": 17, "INTC": 21}
    cash = {"BA": 3, "CSCO": 10, "INTC": 6}
    variety = {"BA": -16.53397028, "CSCO": 21.32430998, "INTC": 21.70912951}
    assert [r.ticker for r in total_ranking(comp, cash, variety)] == ["BA", "CSCO", "INTC"]


def test_total_ranking_single_and_mismatch():
    (row,) = total_ranking({"X": 1}, {"X": 1}, {"X": 5.0})
    assert row.total_rank == 2
    with pytest.raises(RankingError, match="mismatch"):
        total_ranking({"X": 1}, {"Y": 1}, {"X": 5.0})


def test_volatility_examples():
    assert volatility([0.003] * 20, 21) == 0
    assert volatility([0.01, -0.01], 3) == pytest.approx(0.01 * math.sqrt(2) * 100, abs=1e-12)
    assert volatility([0.05], 2) == 0
    with pytest.raises(RankingError):
        volatility([], 10)


returns = st.lists(st.floats(-0.5, 0.5, allow_nan=False, allow_subnormal=False), min_size=1, max_size=80)


@given(returns, st.floats(0.01, 100), st.integers(2, 2000))
@settings(max_examples=200)
def test_volatility_scale_homogeneous(r, k, n_max):
    a = volatility(np.asarray(r) * k, n_max)
    b = k * volatility(r, n_max)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@given(returns, st.integers(2, 2000))
def test_volatility_nonnegative_zero_iff_constant(r, n_max):
    v = volatility(r, n_max)
    assert v >= 0
    assert (v == 0) == (len(set(r)) == 1)


def test_volatility_against_numpy_population_std():
    rng = np.random.default_rng(0)
    r = rng.normal(0, 0.02, 500)
    assert volatility(r, 1257) == pytest.approx(np.std(r) * math.sqrt(1256) * 100, rel=1e-12)


def test_rank_volatility_examples():
    assert rank_volatility({"a": 1.0, "b": 2.0}) == {"a": 1, "b": 2}
    assert rank_volatility({"a": 2.0, "b": 2.0}) == {"a": 1, "b": 1}


def test_rank_cashflow_on_listing_values_follows_sort_order():
    values = {row[0]: row[8] for row in dow_tables.LISTING}
    ranks = rank_cashflow(values)
    assert ranks == dense_rank_by_sort(values, key=lambda v: -v)
    # the leading four and the tail agree with the printed rank column
    printed = {row[0]: row[7] for row in dow_tables.LISTING}
    for t in ("AAPL", "MSFT", "BA", "JPM", "WMT", "PG", "AXP", "WBA", "DOW", "TRV"):
        assert ranks[t] == printed[t]
