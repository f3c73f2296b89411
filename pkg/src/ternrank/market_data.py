"""Universe and per-ticker daily history loading, plus an optional CSV provider cache.

Price files live at ``<data_dir>/<TICKER>.csv`` with the header ``date,close,volume``.
The universe file has the header ``ticker,company``.
"""

from __future__ import annotations

import configparser
import csv
import io
import os
import tempfile
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

PathLike = Union[str, "os.PathLike[str]"]

UNIVERSE_HEADER = ("ticker", "company")
SERIES_HEADER = ("date", "close", "volume")
PROVIDER_ENV = "TERNRANK_PROVIDER_URL"


class MarketDataError(ValueError):
    """Raised when a universe or price file is missing or fails validation."""


class ProviderError(RuntimeError):
    """Raised when fetching a CSV from the remote provider fails."""


@dataclass(frozen=True)
class UniverseEntry:
    ticker: str
    company: str = ""


@dataclass(frozen=True)
class Universe:
    entries: tuple[UniverseEntry, ...]

    def __post_init__(self) -> None:
        seen = set()
        for entry in self.entries:
            if not entry.ticker:
                raise MarketDataError("empty ticker field")
            if entry.ticker in seen:
                raise MarketDataError(f"duplicate ticker {entry.ticker}")
            seen.add(entry.ticker)

    @property
    def tickers(self) -> list[str]:
        return [e.ticker for e in self.entries]

    def company(self, ticker: str) -> str:
        for e in self.entries:
            if e.ticker == ticker:
                return e.company
        raise KeyError(ticker)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class InstrumentSeries:
    """Date-aligned close prices and traded volumes for one ticker."""

    ticker: str
    dates: tuple[date, ...]
    close: tuple[float, ...]
    volume: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.dates)
        if len(self.close) != n or len(self.volume) != n:
            raise MarketDataError(f"{self.ticker}: column lengths differ")
        if n < 2:
            raise MarketDataError(f"{self.ticker}: fewer than 2 rows")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise MarketDataError(f"{self.ticker}: non-monotonic dates at {cur.isoformat()}")
        for d, p in zip(self.dates, self.close):
            if not p > 0:
                raise MarketDataError(f"{self.ticker}: non-positive price on {d.isoformat()}")
        for d, v in zip(self.dates, self.volume):
            if v < 0:
                raise MarketDataError(f"{self.ticker}: negative volume on {d.isoformat()}")

    def __len__(self) -> int:
        return len(self.dates)

    def scaled(self, factor: float) -> "InstrumentSeries":
        return InstrumentSeries(self.ticker, self.dates, tuple(p * factor for p in self.close), self.volume)


def load_universe(path: PathLike) -> Universe:
    path = Path(path)
    if not path.is_file():
        raise MarketDataError(f"universe file not found: {path}")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != UNIVERSE_HEADER:
            raise MarketDataError(f"{path}: expected header 'ticker,company'")
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise MarketDataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            ticker, company = row[0].strip(), row[1].strip()
            if not ticker:
                raise MarketDataError(f"{path}:{lineno}: empty ticker field")
            entries.append(UniverseEntry(ticker, company))
    if not entries:
        raise MarketDataError("empty universe")
    return Universe(tuple(entries))


def parse_series_csv(
    text: str,
    ticker: str,
    start: Optional[date] = None,
    end: Optional[date] = None,
) -> InstrumentSeries:
    """Parse ``date,close,volume`` text, keep rows inside ``[start, end]`` and validate."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip().lower() for h in header) != SERIES_HEADER:
        raise MarketDataError(f"{ticker}: expected header 'date,close,volume'")

    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise MarketDataError(f"{ticker}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            d = date.fromisoformat(row[0].strip())
            p = float(row[1])
            v = int(row[2])
        except ValueError as exc:
            raise MarketDataError(f"{ticker}:{lineno}: parse failure ({exc})") from None
        if start is not None and d < start:
            continue
        if end is not None and d > end:
            continue
        rows.append((d, p, v))

    for i, (d, p, v) in enumerate(rows):
        if i and d <= rows[i - 1][0]:
            raise MarketDataError(f"{ticker}: non-monotonic dates at {d.isoformat()}")
        if not p > 0:
            raise MarketDataError(f"{ticker}: non-positive price on {d.isoformat()}")
    if len(rows) < 2:
        raise MarketDataError(f"{ticker}: fewer than 2 rows in window")
    dates, close, volume = zip(*rows)
    return InstrumentSeries(ticker, dates, close, volume)


def load_series(
    ticker: str,
    data_dir: PathLike,
    start: Optional[date] = None,
    end: Optional[date] = None,
) -> InstrumentSeries:
    path = Path(data_dir) / f"{ticker}.csv"
    if not path.is_file():
        raise MarketDataError(f"{ticker}: price file not found: {path}")
    return parse_series_csv(path.read_text(encoding="utf-8-sig"), ticker, start, end)


def format_series_csv(series: InstrumentSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SERIES_HEADER)
    for d, p, v in zip(series.dates, series.close, series.volume):
        writer.writerow((d.isoformat(), repr(float(p)), int(v)))
    return buf.getvalue()


def save_series(series: InstrumentSeries, data_dir: PathLike) -> Path:
    path = Path(data_dir) / f"{series.ticker}.csv"
    path.write_text(format_series_csv(series), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# provider

def resolve_provider_url(explicit: Optional[str] = None, config_path: Optional[PathLike] = None) -> Optional[str]:
    """Pick the provider URL template: explicit value, then config file, then environment.

    The config file is INI style::

        [provider]
        url = https://example.test/{ticker}.csv?from={from}&to={to}
    """
    if explicit:
        return explicit
    if config_path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        if not parser.read(config_path, encoding="utf-8"):
            raise MarketDataError(f"config file not found: {config_path}")
        url = parser.get("provider", "url", fallback="").strip()
        if url:
            return url
    return os.environ.get(PROVIDER_ENV) or None


def provider_url(template: str, ticker: str, start: Optional[date] = None, end: Optional[date] = None) -> str:
    return (
        template.replace("{ticker}", ticker)
        .replace("{from}", start.isoformat() if start else "")
        .replace("{to}", end.isoformat() if end else "")
    )


_fetch_locks: dict[str, threading.Lock] = {}
_fetch_locks_guard = threading.Lock()


def _lock_for(key: str) -> threading.Lock:
    with _fetch_locks_guard:
        return _fetch_locks.setdefault(key, threading.Lock())


def _check_body_schema(body: bytes) -> None:
    try:
        text = body.decode("utf-8-sig")
    except UnicodeDecodeError:
        raise ProviderError("provider: bad schema (body is not UTF-8 text)") from None
    first = text.splitlines()[0] if text else ""
    if tuple(h.strip().lower() for h in first.split(",")) != SERIES_HEADER:
        raise ProviderError("provider: bad schema")


def fetch_series(
    ticker: str,
    template: str,
    data_dir: PathLike,
    start: Optional[date] = None,
    end: Optional[date] = None,
    timeout: float = 30.0,
) -> Path:
    """Download one ticker's CSV into the cache directory, byte-for-byte.

    Nothing is written unless the response is a 2xx with a valid header row.
    """
    url = provider_url(template, ticker, start, end)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            body = resp.read()
    except urllib.error.HTTPError as exc:
        if exc.code == 404:
            raise ProviderError(f"provider: not found ({ticker})") from None
        raise ProviderError(f"provider: HTTP {exc.code} ({ticker})") from None
    except (urllib.error.URLError, OSError) as exc:
        raise ProviderError(f"provider: network failure ({ticker}): {exc}") from None

    _check_body_schema(body)

    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    target = data_dir / f"{ticker}.csv"
    with _lock_for(str(target.resolve())):
        fd, tmp = tempfile.mkstemp(prefix=f".{ticker}.", suffix=".part", dir=data_dir)
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(body)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    return target


def load_many(tickers: Iterable[str], data_dir: PathLike, start: Optional[date], end: Optional[date]) -> tuple[dict[str, InstrumentSeries], dict[str, str]]:
    """Load every ticker, returning ``(series, errors)`` so callers can report all failures at once."""
    loaded: dict[str, InstrumentSeries] = {}
    errors: dict[str, str] = {}
    for t in tickers:
        try:
            loaded[t] = load_series(t, data_dir, start, end)
        except MarketDataError as exc:
            errors[t] = str(exc)
    return loaded, errors


def longest(series: Sequence[InstrumentSeries]) -> int:
    return max(len(s) for s in series)
