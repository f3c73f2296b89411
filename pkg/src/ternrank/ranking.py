"""Scores and rank assignments: compression, cash-flow RMS, volatility, total rank."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from ternrank.codec import CompressionStats

LengthAdjust = Literal["plain", "minus-one"]
LENGTH_ADJUST_MODES = ("plain", "minus-one")

# Both component ranks count equally in the total.
COMPRESSION_WEIGHT = 1
CASHFLOW_WEIGHT = 1


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class CompressionScore:
    ticker: str
    value: float
    n: int


@dataclass(frozen=True)
class ListingRow:
    ticker: str
    company: str
    points: int
    variety: float
    growth: int
    compression_rank: int
    cashflow_rank: int
    total_rank: int
    cashflow_rms: float
    sparkline: str = ""


@dataclass(frozen=True)
class Listing:
    """Ranked rows plus the analysis window they were computed over."""

    rows: tuple[ListingRow, ...]
    start: date | None = None
    end: date | None = None
    n_max: int | None = None

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class VolatilityRow:
    ticker: str
    company: str
    points: int
    volatility: float
    growth: int
    rank: int
    sparkline: str = ""


@dataclass(frozen=True)
class TotalRank:
    ticker: str
    compression_rank: int
    cashflow_rank: int
    total_rank: int


def length_factor(n: int, n_max: int, mode: LengthAdjust = "plain") -> float:
    if n < 2:
        raise RankingError(f"series length {n} < 2")
    if n_max < n:
        raise RankingError(f"n_max {n_max} < n {n}")
    if mode == "plain":
        return n_max / n
    if mode == "minus-one":
        return (n_max - 1) / (n - 1)
    raise RankingError(f"unknown length-adjust mode {mode!r}")


def compression_score(
    stats: CompressionStats | float,
    sgn: int,
    n: int,
    n_max: int,
    mode: LengthAdjust = "plain",
    ticker: str = "",
) -> CompressionScore:
    """Signed, length-adjusted compression percentage.

    ``stats`` may also be a bare ratio percentage.
    """
    if sgn not in (-1, 1):
        raise RankingError(f"sign factor must be -1 or +1, got {sgn}")
    ratio = stats.ratio_percent if isinstance(stats, CompressionStats) else float(stats)
    return CompressionScore(ticker, sgn * ratio * length_factor(n, n_max, mode), n)


def dense_rank(values: Mapping[str, float], descending: bool = False) -> dict[str, int]:
    """Dense 1-based ranks; equal values share a rank."""
    distinct = sorted(set(values.values()), reverse=descending)
    position = {v: i for i, v in enumerate(distinct, start=1)}
    return {k: position[v] for k, v in values.items()}


def rank_compression(scores: Iterable[CompressionScore] | Mapping[str, float]) -> dict[str, int]:
    """Positive scores ascending from 1, then negative scores by ascending magnitude.

    Both phases use dense numbering; the negative phase continues after the
    highest positive rank.
    """
    values = dict(scores) if isinstance(scores, Mapping) else {s.ticker: s.value for s in scores}
    zero = [t for t, v in values.items() if v == 0]
    if zero:
        raise RankingError(f"zero compression score for {', '.join(sorted(zero))}")
    positive = dense_rank({t: v for t, v in values.items() if v > 0})
    offset = max(positive.values(), default=0)
    negative = dense_rank({t: v for t, v in values.items() if v < 0}, descending=True)
    ranks = dict(positive)
    ranks.update({t: r + offset for t, r in negative.items()})
    return ranks


def cashflow_rms(cash: Sequence[float] | np.ndarray) -> float:
    c = np.asarray(cash, dtype=float)
    if c.size == 0:
        raise RankingError("empty cash-flow series")
    return float(np.sqrt(np.mean(c * c)))


def rank_cashflow(values: Mapping[str, float]) -> dict[str, int]:
    if not values:
        raise RankingError("no cash-flow values")
    return dense_rank(values, descending=True)


def total_ranking(
    compression_ranks: Mapping[str, int],
    cashflow_ranks: Mapping[str, int],
    variety: Mapping[str, float],
) -> list[TotalRank]:
    """Sum the two ranks and order by total, then by |variety|, then ticker."""
    tickers = set(compression_ranks)
    if tickers != set(cashflow_ranks) or tickers != set(variety):
        diff = tickers.symmetric_difference(cashflow_ranks) | tickers.symmetric_difference(variety)
        raise RankingError(f"ticker set mismatch: {', '.join(sorted(diff))}")
    rows = [
        TotalRank(
            t,
            compression_ranks[t],
            cashflow_ranks[t],
            COMPRESSION_WEIGHT * compression_ranks[t] + CASHFLOW_WEIGHT * cashflow_ranks[t],
        )
        for t in tickers
    ]
    rows.sort(key=lambda r: (r.total_rank, abs(variety[r.ticker]), r.ticker))
    return rows


def volatility(returns: Sequence[float] | np.ndarray, n_max: int) -> float:
    """Population deviation of daily returns scaled to the longest window, in percent."""
    r = np.asarray(returns, dtype=float)
    if r.size == 0:
        raise RankingError("empty returns")
    if n_max < 2:
        raise RankingError(f"n_max {n_max} < 2")
    if np.all(r == r[0]):
        return 0.0
    mean = math.fsum(r) / r.size
    centered = r - mean
    scale = float(np.max(np.abs(centered)))  # guards the squares against underflow
    dev = scale * math.sqrt(math.fsum((centered / scale) ** 2) / r.size)
    return dev * math.sqrt(n_max - 1) * 100


def rank_volatility(values: Mapping[str, float]) -> dict[str, int]:
    if not values:
        raise RankingError("no volatility values")
    return dense_rank(values)
