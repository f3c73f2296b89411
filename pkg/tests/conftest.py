from __future__ import annotations

import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ternrank.market_data import InstrumentSeries, UniverseEntry, Universe, save_series


def make_series(close, volume=None, ticker="TST", start=date(2020, 1, 1)) -> InstrumentSeries:
    close = tuple(float(p) for p in close)
    if volume is None:
        volume = (1000,) * len(close)
    dates = tuple(start + timedelta(days=i) for i in range(len(close)))
    return InstrumentSeries(ticker, dates, close, tuple(int(v) for v in volume))


def random_walk(n: int, seed: int, sigma: float = 0.017, drift: float = 0.0004, p0: float = 100.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    steps = rng.normal(drift, sigma, size=n - 1)
    return p0 * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))


def write_universe(path: Path, entries) -> Path:
    lines = ["ticker,company"] + [f"{t},{c}" for t, c in entries]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def synthetic_universe(tmp_path):
    """Five random-walk tickers on weekday dates, one of them with a shorter history."""
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    entries = [("AAA", "Alpha Corp"), ("BBB", "Beta Inc"), ("CCC", "Gamma & Sons"),
               ("DDD", "Delta Co"), ("EEE", "Epsilon plc")]
    start = date(2016, 10, 14)
    days = []
    d = start
    while len(days) < 1257:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    rng = np.random.default_rng(7)
    for i, (t, _) in enumerate(entries):
        n = 648 if t == "DDD" else 1257
        close = np.round(random_walk(n, seed=100 + i, drift=0.0006 * (2 - i)), 4)
        volume = rng.integers(1_000_000, 50_000_000, size=n)
        s = InstrumentSeries(t, tuple(days[-n:]), tuple(float(x) for x in close), tuple(int(v) for v in volume))
        save_series(s, data_dir)
    universe = write_universe(tmp_path / "universe.csv", entries)
    return universe, data_dir, entries, days[0], days[-1]


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion

_criteria: dict[int, tuple[str, list[str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None and (rep.when == "call" or rep.failed):
        number, title = m.args
        _criteria.setdefault(number, (title, []))[1].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        status = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
