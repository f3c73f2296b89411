"""Command-line entry point: ``ternrank {rank,volatility,compress,fetch}``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Optional, Sequence

from ternrank import codec, market_data, pipeline, ranking, report, transform
from ternrank.market_data import MarketDataError, ProviderError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PROVIDER = 2


def five_years_before(d: date) -> date:
    try:
        return d.replace(year=d.year - 5)
    except ValueError:  # 29 February
        return d.replace(year=d.year - 5, day=28)


@dataclass(frozen=True)
class RunConfig:
    universe: Optional[Path]
    data_dir: Path
    start: date
    end: date
    length_adjust: ranking.LengthAdjust = "plain"
    format: str = "tsv"
    out: Optional[Path] = None
    locale_comma: bool = False
    provider_url: Optional[str] = None
    decimal_places: int = 8
    sparkline_width: int = 20

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise MarketDataError(f"--from {self.start} must be before --to {self.end}")

    @property
    def render_options(self) -> report.RenderOptions:
        return report.RenderOptions(
            format=self.format,
            decimal_places=self.decimal_places,
            sparkline_width=self.sparkline_width,
            locale_comma=self.locale_comma,
        )


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out.write_text(text, encoding="utf-8")


def _load_all(config: RunConfig):
    if config.universe is None:
        raise MarketDataError("--universe is required")
    universe = market_data.load_universe(config.universe)
    series, errors = market_data.load_many(universe.tickers, config.data_dir, config.start, config.end)
    if errors:
        for ticker, msg in errors.items():
            print(f"error: {ticker}: {msg}", file=sys.stderr)
        raise MarketDataError(f"{len(errors)} of {len(universe)} tickers failed to load; run aborted")
    return universe, series


def cmd_rank(config: RunConfig) -> int:
    universe, series = _load_all(config)
    listing = pipeline.build_listing(
        universe, series, config.length_adjust, config.sparkline_width, config.start, config.end
    )
    _emit(report.render_listing(listing, config.render_options), config.out)
    return EXIT_OK


def cmd_volatility(config: RunConfig) -> int:
    universe, series = _load_all(config)
    rows = pipeline.build_volatility_table(universe, series, config.sparkline_width)
    _emit(report.render_volatility(rows, config.render_options, config.start, config.end), config.out)
    return EXIT_OK


def cmd_compress(ticker: str, config: RunConfig) -> int:
    s = market_data.load_series(ticker, config.data_dir, config.start, config.end)
    n_max = len(s)
    if config.universe is not None:
        _, series = _load_all(config)
        n_max = max([n_max] + [len(x) for x in series.values()])
    stats = codec.compression_stats(transform.symbol_string(s))
    sgn = transform.sign_factor(s)
    score = ranking.compression_score(stats, sgn, len(s), n_max, config.length_adjust, ticker=ticker)
    lines = [
        f"ticker\t{ticker}",
        f"n\t{len(s)}",
        f"n_max\t{n_max}",
        f"l_src\t{stats.l_src}",
        f"l_cod\t{stats.l_cod}",
        f"l_abc\t{stats.l_abc}",
        f"ratio_percent\t{stats.ratio_percent:.{config.decimal_places}f}",
        f"sgn\t{sgn:+d}",
        f"score\t{score.value:.{config.decimal_places}f}",
    ]
    _emit("\n".join(lines) + "\n", config.out)
    return EXIT_OK


def cmd_fetch(config: RunConfig) -> int:
    if not config.provider_url:
        print("error: provider not configured (set --provider-url, --config or "
              f"{market_data.PROVIDER_ENV})", file=sys.stderr)
        return EXIT_PROVIDER
    if config.universe is None:
        raise MarketDataError("--universe is required")
    universe = market_data.load_universe(config.universe)

    def one(ticker: str):
        try:
            market_data.fetch_series(ticker, config.provider_url, config.data_dir, config.start, config.end)
            return ticker, None
        except ProviderError as exc:
            return ticker, str(exc)

    with ThreadPoolExecutor(max_workers=min(8, len(universe))) as pool:
        results = list(pool.map(one, universe.tickers))
    failed = [(t, e) for t, e in results if e]
    for t, e in failed:
        print(f"error: {t}: {e}", file=sys.stderr)
    print(f"fetched {len(results) - len(failed)} of {len(results)} tickers into {config.data_dir}")
    return EXIT_PROVIDER if failed else EXIT_OK


def _date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--universe", type=Path, help="CSV with header ticker,company")
    common.add_argument("--data-dir", type=Path, default=Path("data"), help="directory of <TICKER>.csv files")
    common.add_argument("--from", dest="start", type=_date, help="first date (default: five years before --to)")
    common.add_argument("--to", dest="end", type=_date, help="last date (default: today)")
    common.add_argument("--length-adjust", choices=ranking.LENGTH_ADJUST_MODES, default="plain")
    common.add_argument("--format", choices=("tsv", "csv", "md"), default="tsv")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--locale-comma", action="store_true", help="comma decimal separator")
    common.add_argument("--decimals", type=int, default=8)
    common.add_argument("--sparkline-width", type=int, default=20)
    common.add_argument("--provider-url", help=f"URL template; falls back to --config, then ${market_data.PROVIDER_ENV}")
    common.add_argument("--config", type=Path, help="INI file with [provider] url = ...")

    parser = argparse.ArgumentParser(prog="ternrank", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rank", parents=[common], help="compression + cash-flow listing")
    sub.add_parser("volatility", parents=[common], help="volatility ranking table")
    p = sub.add_parser("compress", parents=[common], help="bit-length diagnostics for one ticker")
    p.add_argument("ticker")
    sub.add_parser("fetch", parents=[common], help="download ticker CSVs into --data-dir")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    end = args.end or date.today()
    start = args.start or five_years_before(end)
    provider = None
    if args.command == "fetch":
        provider = market_data.resolve_provider_url(args.provider_url, args.config)
    return RunConfig(
        universe=args.universe,
        data_dir=args.data_dir,
        start=start,
        end=end,
        length_adjust=args.length_adjust,
        format="markdown" if args.format == "md" else args.format,
        out=args.out,
        locale_comma=args.locale_comma,
        provider_url=provider,
        decimal_places=args.decimals,
        sparkline_width=args.sparkline_width,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "rank":
            return cmd_rank(config)
        if args.command == "volatility":
            return cmd_volatility(config)
        if args.command == "compress":
            return cmd_compress(args.ticker, config)
        return cmd_fetch(config)
    except ProviderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (MarketDataError, codec.CodecError, ranking.RankingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
