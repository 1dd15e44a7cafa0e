"""Reading and writing quote tables, reports, plot data and price series."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from optclean.errors import NonPositivePrice, ParseError, TooShort, ValidationError
from optclean.model import (
    CleaningConfig,
    CleaningReport,
    MarketContext,
    OptionQuote,
    OptionType,
    RemovalRecord,
    validate_quote,
)

log = logging.getLogger(__name__)

COLUMNS = ("type", "strike", "maturity_days", "price", "open_interest")
PLOT_COLUMNS = ("strike", "price", "fitted", "residual", "c_hat")


@dataclass(frozen=True)
class RowIssue:
    row: int
    column: str | None
    message: str
    kind: str  # "parse" or "validation"

    def __str__(self):
        col = f", column {self.column!r}" if self.column else ""
        return f"row {self.row}{col}: {self.message}"


def format_number(x) -> str:
    """Shortest text that reads back to the same value."""
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _parse_row(rowno: int, row: dict[str, str]) -> OptionQuote:
    values: dict[str, Any] = {}
    for col in COLUMNS:
        text = (row.get(col) or "").strip()
        if not text:
            raise ParseError("missing value", rowno, col)
        try:
            if col == "type":
                values[col] = OptionType.parse(text)
            elif col in ("maturity_days", "open_interest"):
                num = float(text)
                if not num.is_integer():
                    raise ValueError(f"{text!r} is not an integer")
                values[col] = int(num)
            else:
                values[col] = float(text)
        except ValueError as exc:
            raise ParseError(str(exc), rowno, col) from None
    return OptionQuote(
        id=rowno,
        option_type=values["type"],
        strike=values["strike"],
        maturity_days=values["maturity_days"],
        price=values["price"],
        open_interest=values["open_interest"],
    )


def read_quotes_with_rejects(
    path, delimiter: str = ","
) -> tuple[list[OptionQuote], list[RowIssue]]:
    """Parse every row, returning good quotes and one issue per bad row.

    Ids are 1-based data-row numbers (the header is not counted).
    """
    quotes: list[OptionQuote] = []
    issues: list[RowIssue] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty, expected a header") from None
        header = [h.strip().lower() for h in header]
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise ParseError(f"{path}: header lacks column(s) {', '.join(missing)}", row=0)
        rowno = 0
        for cells in reader:
            if not cells or all(not c.strip() for c in cells):
                continue
            rowno += 1
            row = dict(zip(header, cells))
            try:
                quotes.append(validate_quote(_parse_row(rowno, row)))
            except ParseError as exc:
                issues.append(RowIssue(rowno, exc.column, str(exc), "parse"))
            except ValidationError as exc:
                issues.append(RowIssue(rowno, None, str(exc), "validation"))
    return quotes, issues


def read_quotes(path, delimiter: str = ",", skip_invalid: bool = False) -> list[OptionQuote]:
    """Read a quote table.

    Bad rows raise (``ParseError`` for the first unparseable cell, otherwise
    a ``ValidationError`` listing every failing row) unless ``skip_invalid``
    is set, in which case they are logged and dropped.
    """
    quotes, issues = read_quotes_with_rejects(path, delimiter)
    if issues and not skip_invalid:
        for issue in issues:
            if issue.kind == "parse":
                raise ParseError(issue.message)
        raise ValidationError(
            f"{path}: {len(issues)} invalid row(s): " + "; ".join(str(i) for i in issues[:5]),
            issues,
        )
    for issue in issues:
        log.warning("%s: skipped %s", path, issue)
    return quotes


def write_clean(path, quotes: Iterable[OptionQuote], delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(COLUMNS)
        for q in quotes:
            w.writerow([
                q.option_type.value,
                format_number(q.strike),
                q.maturity_days,
                format_number(q.price),
                q.open_interest,
            ])


def report_to_dict(
    report: CleaningReport,
    removals: Sequence[RemovalRecord],
    config: CleaningConfig | None = None,
    ctx: MarketContext | None = None,
) -> dict[str, Any]:
    doc: dict[str, Any] = {"config": (config or CleaningConfig()).to_dict()}
    if ctx is not None:
        doc["market"] = {"spot": ctx.spot, "rate": ctx.rate, "dividend_yield": ctx.dividend_yield}
    doc["per_type_counts"] = report.per_type_counts()
    doc["stage_counts"] = [c.to_dict() for c in report.stage_counts]
    doc["warnings"] = list(report.warnings)
    doc["removals"] = [r.to_dict() for r in sorted(removals, key=lambda r: r.quote_id)]
    return doc


def write_report(path, report, removals, config=None, ctx=None) -> None:
    doc = report_to_dict(report, removals, config, ctx)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_plot_data(directory, diagnostics) -> list[Path]:
    """One CSV per fitted group: strike, price, fitted, residual, c_hat.

    Skipped groups have no fit and produce no file.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for d in diagnostics:
        if not hasattr(d, "c_hat"):
            continue
        p = out / f"{d.label}.csv"
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PLOT_COLUMNS)
            for row in zip(d.strikes, d.prices, d.fitted, d.residuals):
                w.writerow([format_number(v) for v in row] + [format_number(d.c_hat)])
        paths.append(p)
    return paths


def read_context(path) -> MarketContext:
    """Market context from a JSON object with ``spot``, ``rate`` and
    optionally ``dividend_yield``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return MarketContext(
            spot=float(doc["spot"]),
            rate=float(doc.get("rate", 0.0)),
            dividend_yield=float(doc.get("dividend_yield", 0.0)),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: bad market context ({exc})") from None


def compute_log_returns(prices: Sequence[float]) -> list[float]:
    """``ln(P_t / P_{t-1})`` for consecutive prices."""
    if len(prices) < 2:
        raise TooShort(f"need at least 2 prices, got {len(prices)}")
    for i, p in enumerate(prices):
        if not (p > 0 and math.isfinite(p)):
            raise NonPositivePrice(f"price at position {i} is not positive: {p}")
    return [math.log(b / a) for a, b in zip(prices, prices[1:])]


_PRICE_COLUMNS = ("price", "close", "adj close", "adj_close")


def read_price_series(path, delimiter: str = ",") -> tuple[list[str] | None, list[float]]:
    """Read a time-ordered price history.

    Uses the ``price``/``close`` column when present, otherwise the only
    column. A ``date`` column, if any, is carried along as labels.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: file is empty")
    header = [h.strip().lower() for h in rows[0]]
    col = next((header.index(c) for c in _PRICE_COLUMNS if c in header), None)
    if col is None:
        if len(header) != 1:
            raise ParseError(f"{path}: cannot tell which column holds prices", row=0)
        col = 0
    date_col = header.index("date") if "date" in header else None
    labels = [] if date_col is not None else None
    prices = []
    for i, r in enumerate(rows[1:], start=1):
        try:
            prices.append(float(r[col]))
        except (ValueError, IndexError):
            raise ParseError("not a number", i, header[col]) from None
        if labels is not None:
            labels.append(r[date_col].strip())
    return labels, prices


def write_returns(path, returns: Sequence[float], labels: Sequence[str] | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if labels is None:
            w.writerow(["log_return"])
            for r in returns:
                w.writerow([repr(float(r))])
        else:
            w.writerow(["date", "log_return"])
            for lab, r in zip(labels[1:], returns):
                w.writerow([lab, repr(float(r))])


def convert_export(src, dst, column_map: dict[str, str], option_type: str | None = None,
                   delimiter: str = ",") -> int:
    """Rewrite a CSV exported from a spreadsheet into the quote schema.

    ``column_map`` maps source header names to schema columns. Sheets that
    hold a single option type pass it as ``option_type`` instead of a
    column. Returns the number of rows written.
    """
    targets = set(column_map.values())
    bad = targets - set(COLUMNS)
    if bad:
        raise ValueError(f"unknown target column(s): {sorted(bad)}")
    need = set(COLUMNS) - targets - ({"type"} if option_type else set())
    if need:
        raise ValueError(f"column_map does not provide {sorted(need)}")
    n = 0
    with open(src, newline="", encoding="utf-8") as fin, \
            open(dst, "w", newline="", encoding="utf-8") as fout:
        reader = csv.DictReader(fin, delimiter=delimiter)
        w = csv.writer(fout, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in reader:
            out = {column_map[k]: (v or "").strip() for k, v in row.items() if k in column_map}
            if option_type:
                out.setdefault("type", option_type)
            if not any(out.get(c) for c in ("strike", "price")):
                continue
            w.writerow([out.get(c, "") for c in COLUMNS])
            n += 1
    return n
