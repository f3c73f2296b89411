"""Numeric transformations of a price/volume history.

Integer-valued outputs (relative price, deltas, growth, trend sign) are computed
with exact rational arithmetic on the stored floats, so rounding at .5 boundaries
does not depend on the order of floating-point operations.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

import numpy as np

from ternrank.market_data import InstrumentSeries

SIGN_CHARS = {-1: "-", 0: "~", 1: "+"}
LETTER_RE = re.compile(r"[-~+][0-9]{2}")


def round_half_away(x: Fraction | float) -> int:
    """Round to the nearest integer, ties away from zero."""
    q = Fraction(x)
    mag = int(abs(q) + Fraction(1, 2))  # floor for non-negative values
    return mag if q >= 0 else -mag


def relative_price(series: InstrumentSeries) -> list[int]:
    closes = [Fraction(p) for p in series.close]
    p_max = max(closes)
    return [round_half_away(p / p_max * 100) for p in closes]


def delta_series(rel: Sequence[int]) -> list[int]:
    if len(rel) < 2:
        raise ValueError("series too short: need at least 2 relative prices")
    return [b - a for a, b in zip(rel, rel[1:])]


def letter_for(delta: int) -> str:
    if abs(delta) > 100:
        raise ValueError(f"delta out of range: {delta}")
    sign = SIGN_CHARS[(delta > 0) - (delta < 0)]
    # two leading digits; 100 truncates to "10"
    return sign + f"{abs(delta):02d}"[:2]


def symbolize(deltas: Sequence[int]) -> list[str]:
    return [letter_for(d) for d in deltas]


def delta_for(letter: str) -> int:
    """Inverse of :func:`letter_for` on deltas in [-99, 99]."""
    if not LETTER_RE.fullmatch(letter) or (letter[0] == "~" and letter[1:] != "00"):
        raise ValueError(f"malformed letter: {letter!r}")
    mag = int(letter[1:])
    return -mag if letter[0] == "-" else mag


def sign_factor(series: InstrumentSeries) -> int:
    """-1 when the first close exceeds the last or the mean, or the mean exceeds the last."""
    closes = [Fraction(p) for p in series.close]
    first, last = closes[0], closes[-1]
    avg = sum(closes) / len(closes)
    if first > last or first > avg or avg > last:
        return -1
    return 1


def growth_percent(series: InstrumentSeries) -> int:
    first, last = Fraction(series.close[0]), Fraction(series.close[-1])
    return round_half_away((last / first - 1) * 100)


def daily_returns(series: InstrumentSeries) -> np.ndarray:
    p = np.asarray(series.close, dtype=float)
    if p.size < 2:
        raise ValueError("series too short: need at least 2 closes")
    return p[1:] / p[:-1] - 1.0


def cash_flow(series: InstrumentSeries) -> np.ndarray:
    return np.asarray(series.volume, dtype=float) * np.asarray(series.close, dtype=float)


def symbol_string(series: InstrumentSeries) -> str:
    """The concatenated letter string for a price history, ready for the codec."""
    return "".join(symbolize(delta_series(relative_price(series))))
