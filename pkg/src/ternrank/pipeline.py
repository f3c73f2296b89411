"""End-to-end assembly of the ranking listing and the volatility table from loaded series."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Mapping, Optional

from ternrank import codec, ranking, transform
from ternrank.market_data import InstrumentSeries, Universe
from ternrank.ranking import LengthAdjust, Listing, ListingRow, VolatilityRow
from ternrank.report import sparkline


@dataclass(frozen=True)
class TickerAnalysis:
    ticker: str
    n: int
    stats: codec.CompressionStats
    sgn: int
    score: ranking.CompressionScore
    growth: int
    cashflow_rms: float


def analyze(series: InstrumentSeries, n_max: int, mode: LengthAdjust = "plain") -> TickerAnalysis:
    stats = codec.compression_stats(transform.symbol_string(series))
    sgn = transform.sign_factor(series)
    n = len(series)
    return TickerAnalysis(
        ticker=series.ticker,
        n=n,
        stats=stats,
        sgn=sgn,
        score=ranking.compression_score(stats, sgn, n, n_max, mode, ticker=series.ticker),
        growth=transform.growth_percent(series),
        cashflow_rms=ranking.cashflow_rms(transform.cash_flow(series)),
    )


def build_listing(
    universe: Universe,
    series: Mapping[str, InstrumentSeries],
    mode: LengthAdjust = "plain",
    sparkline_width: int = 20,
    start: Optional[date] = None,
    end: Optional[date] = None,
) -> Listing:
    n_max = max(len(series[t]) for t in universe.tickers)
    results = {t: analyze(series[t], n_max, mode) for t in universe.tickers}
    comp = ranking.rank_compression([r.score for r in results.values()])
    cash = ranking.rank_cashflow({t: r.cashflow_rms for t, r in results.items()})
    variety = {t: r.score.value for t, r in results.items()}
    rows = []
    for tr in ranking.total_ranking(comp, cash, variety):
        r = results[tr.ticker]
        rows.append(ListingRow(
            ticker=tr.ticker,
            company=universe.company(tr.ticker),
            points=r.n,
            variety=r.score.value,
            growth=r.growth,
            compression_rank=tr.compression_rank,
            cashflow_rank=tr.cashflow_rank,
            total_rank=tr.total_rank,
            cashflow_rms=r.cashflow_rms,
            sparkline=sparkline(series[tr.ticker].close, sparkline_width),
        ))
    return Listing(tuple(rows), start=start, end=end, n_max=n_max)


def build_volatility_table(
    universe: Universe,
    series: Mapping[str, InstrumentSeries],
    sparkline_width: int = 20,
) -> list[VolatilityRow]:
    n_max = max(len(series[t]) for t in universe.tickers)
    values = {
        t: ranking.volatility(transform.daily_returns(series[t]), n_max) for t in universe.tickers
    }
    ranks = ranking.rank_volatility(values)
    order = sorted(values, key=lambda t: (ranks[t], values[t], t))
    return [
        VolatilityRow(
            ticker=t,
            company=universe.company(t),
            points=len(series[t]),
            volatility=values[t],
            growth=transform.growth_percent(series[t]),
            rank=ranks[t],
            sparkline=sparkline(series[t].close, sparkline_width),
        )
        for t in order
    ]
