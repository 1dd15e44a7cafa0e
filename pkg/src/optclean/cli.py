"""Command-line front end.

Exit status: 0 on success, 1 when the input fails validation or cannot be
read or written, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from optclean.errors import CleaningError
from optclean.ingest import (
    compute_log_returns,
    read_context,
    read_price_series,
    read_quotes,
    write_clean,
    write_plot_data,
    write_report,
    write_returns,
)
from optclean.model import CleaningConfig, MarketContext, OptionType
from optclean.pipeline import STEPS, run_pipeline

log = logging.getLogger("optclean")

_STEPS_FOR = {"clean": STEPS, "bounds": ("bounds",), "outliers": ("outliers",), "dedup": ("dedup",)}


def _add_io(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="quote table (type,strike,maturity_days,price,open_interest)")
    p.add_argument("--output", required=True, help="where to write the kept quotes")
    p.add_argument("--report", help="write a JSON removal report here")
    p.add_argument("--delimiter", default=",", help="field delimiter (default ',')")
    p.add_argument("--skip-invalid", action="store_true",
                   help="drop malformed rows with a warning instead of failing")


def _add_market(p: argparse.ArgumentParser):
    p.add_argument("--spot", type=float, help="spot price of the underlying")
    p.add_argument("--rate", type=float, help="continuously compounded risk-free rate, e.g. 0.0015")
    p.add_argument("--context", help="JSON file with spot and rate; flags override it")


def _add_config(p: argparse.ArgumentParser, outliers: bool):
    p.add_argument("--day-count", type=float, default=365.0, help="days per year (default 365)")
    if outliers:
        p.add_argument("--alpha", type=float, default=0.01,
                       help="probability of flagging a clean group (default 0.01)")
        p.add_argument("--min-group-size", type=int, default=5,
                       help="smallest maturity group that is tested (default 5)")
        p.add_argument("--plot-data", metavar="DIR",
                       help="write per-group strike/price/fitted/residual/c_hat files here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optclean", description="Clean recorded European option prices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text, market, outliers in (
        ("clean", "run all three stages", True, True),
        ("bounds", "drop prices outside the no-arbitrage interval", True, False),
        ("outliers", "drop residual outliers of the per-maturity smile fit", False, True),
        ("dedup", "resolve duplicated (type, strike, maturity) quotes", False, False),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_io(p)
        if market:
            _add_market(p)
        _add_config(p, outliers)

    p = sub.add_parser("returns", help="log-returns of a price history")
    p.add_argument("--input", required=True, help="CSV with a price/close column (and optional date)")
    p.add_argument("--output", required=True)
    p.add_argument("--delimiter", default=",")
    return parser


def _market(args, parser) -> MarketContext:
    spot, rate = None, None
    if args.context:
        ctx = read_context(args.context)
        spot, rate = ctx.spot, ctx.rate
    if args.spot is not None:
        spot = args.spot
    if args.rate is not None:
        rate = args.rate
    if spot is None:
        parser.error(f"{args.command}: --spot (or --context) is required")
    if rate is None:
        parser.error(f"{args.command}: --rate (or --context) is required")
    return MarketContext(spot=spot, rate=rate)


def _run_returns(args) -> int:
    labels, prices = read_price_series(args.input, args.delimiter)
    write_returns(args.output, compute_log_returns(prices), labels)
    print(f"wrote {len(prices) - 1} log-returns to {args.output}")
    return 0


def _run_stages(args, parser) -> int:
    ctx = _market(args, parser) if "bounds" in _STEPS_FOR[args.command] else None
    config = CleaningConfig(
        alpha=getattr(args, "alpha", 0.01),
        min_group_size=getattr(args, "min_group_size", 5),
        day_count=args.day_count,
    )
    quotes = read_quotes(args.input, args.delimiter, skip_invalid=args.skip_invalid)
    result = run_pipeline(quotes, ctx, config, _STEPS_FOR[args.command])

    write_clean(args.output, result.clean, args.delimiter)
    if args.report:
        write_report(args.report, result.report, result.removals, config, ctx)
    if getattr(args, "plot_data", None):
        write_plot_data(args.plot_data, result.diagnostics)
    for w in result.report.warnings:
        log.warning(w)
    for t in OptionType:
        n_in = result.report.input_count(t)
        if n_in:
            print(f"{t.value}: {n_in} in, {result.report.output_count(t)} out, "
                  f"{result.report.removed_fraction(t):.1%} removed")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "returns":
            return _run_returns(args)
        return _run_stages(args, parser)
    except (CleaningError, OSError) as exc:
        print(f"optclean: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
