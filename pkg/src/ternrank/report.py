"""Text rendering of ranked listings and volatility tables."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from ternrank.ranking import Listing, ListingRow, VolatilityRow
from ternrank.transform import round_half_away

Format = Literal["tsv", "csv", "markdown"]
FORMATS = ("tsv", "csv", "markdown")
GLYPHS = "▁▂▃▄▅▆▇█"

LISTING_COLUMNS = (
    "sticker", "company", "points", "variety", "microchart", "growth",
    "rank", "total_rank", "cashflow_rank", "cashflow_rms",
)
VOLATILITY_COLUMNS = ("sticker", "company", "points", "volatility", "microchart", "growth", "rank")


@dataclass(frozen=True)
class RenderOptions:
    format: Format = "tsv"
    decimal_places: int = 8
    sparkline_width: int = 20
    locale_comma: bool = False

    def __post_init__(self) -> None:
        if self.format == "md":
            object.__setattr__(self, "format", "markdown")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if self.decimal_places < 0:
            raise ValueError("decimal_places must be >= 0")
        if self.sparkline_width < 2:
            raise ValueError("sparkline_width must be >= 2")


def sparkline(close: Sequence[float], width: int = 20) -> str:
    """Bucket-mean downsample to ``width`` points, min-max scaled onto block glyphs."""
    p = np.asarray(close, dtype=float)
    if p.size < 2:
        raise ValueError("series too short for a sparkline")
    if width < 2:
        raise ValueError("width must be >= 2")
    buckets = min(width, p.size)
    edges = (np.arange(buckets + 1) * p.size) // buckets
    means = np.array([p[a:b].mean() for a, b in zip(edges[:-1], edges[1:])])
    lo, hi = means.min(), means.max()
    if hi == lo:
        return GLYPHS[0] * buckets
    levels = np.minimum(((means - lo) / (hi - lo) * len(GLYPHS)).astype(int), len(GLYPHS) - 1)
    return "".join(GLYPHS[i] for i in levels)


def _decimal(value: float, places: int, comma: bool) -> str:
    text = f"{value:.{places}f}"
    return text.replace(".", ",") if comma else text


def format_variety(value: float, places: int = 8, comma: bool = False) -> str:
    """Negative scores are written as their magnitude in braces."""
    text = _decimal(abs(value), places, comma)
    return f"{{{text}}}" if value < 0 else text


def format_amount(value: float, comma: bool = False) -> str:
    whole = round_half_away(value)
    if comma:
        return f"{whole:,}".replace(",", " ")
    return str(whole)


def _listing_cells(row: ListingRow, opts: RenderOptions) -> list[str]:
    return [
        row.ticker,
        row.company,
        str(row.points),
        format_variety(row.variety, opts.decimal_places, opts.locale_comma),
        row.sparkline,
        str(row.growth),
        str(row.compression_rank),
        str(row.total_rank),
        str(row.cashflow_rank),
        format_amount(row.cashflow_rms, opts.locale_comma),
    ]


def _volatility_cells(row: VolatilityRow, opts: RenderOptions) -> list[str]:
    return [
        row.ticker,
        row.company,
        str(row.points),
        _decimal(row.volatility, opts.decimal_places, opts.locale_comma),
        row.sparkline,
        str(row.growth),
        str(row.rank),
    ]


def _render(header: Sequence[str], rows: list[list[str]], opts: RenderOptions, title: str = "") -> str:
    if opts.format == "markdown":
        def esc(cell: str) -> str:
            return cell.replace("|", "\\|")

        lines = [f"### {title}", ""] if title else []
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join("---" for _ in header) + "|")
        lines.extend("| " + " | ".join(esc(c) for c in r) + " |" for r in rows)
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    if opts.format == "tsv":
        writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    else:
        writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _title(kind: str, start, end) -> str:
    if start and end:
        return f"{kind}, {start.isoformat()} .. {end.isoformat()}, daily closes"
    return kind


def render_listing(listing: Listing | Sequence[ListingRow], opts: RenderOptions = RenderOptions()) -> str:
    rows = list(listing)
    if not rows:
        raise ValueError("empty listing")
    start = getattr(listing, "start", None)
    end = getattr(listing, "end", None)
    body = [_listing_cells(r, opts) for r in rows]
    return _render(LISTING_COLUMNS, body, opts, _title("Ranking listing", start, end))


def render_volatility(
    rows: Sequence[VolatilityRow],
    opts: RenderOptions = RenderOptions(),
    start=None,
    end=None,
) -> str:
    if not rows:
        raise ValueError("empty volatility table")
    body = [_volatility_cells(r, opts) for r in rows]
    return _render(VOLATILITY_COLUMNS, body, opts, _title("Volatility ranking", start, end))


def parse_table(text: str, format: Format = "tsv") -> list[dict[str, str]]:
    """Read a rendered tsv/csv table back into one dict per row."""
    if format not in ("tsv", "csv"):
        raise ValueError("only tsv and csv output can be parsed back")
    reader = csv.DictReader(io.StringIO(text), delimiter="\t" if format == "tsv" else ",")
    return list(reader)


def parse_variety(cell: str) -> float:
    negative = cell.startswith("{") and cell.endswith("}")
    text = cell[1:-1] if negative else cell
    value = float(text.replace(",", "."))
    return -value if negative else value
