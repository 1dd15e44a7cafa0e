"""Runs the three cleaning stages in order and builds the removal report."""

from __future__ import annotations

from collections import Counter
from typing import NamedTuple

from optclean.arbitrage import filter_arbitrage
from optclean.dedup import deduplicate
from optclean.model import (
    CleaningConfig,
    CleaningReport,
    MarketContext,
    OptionQuote,
    OptionType,
    RemovalRecord,
    Stage,
    validate_dataset,
)
from optclean.outliers import GroupDiagnostics, SkippedGroup, detect_outliers, group_by_maturity

__all__ = ["STEPS", "PipelineResult", "run_outlier_stage", "run_pipeline", "count_by_type"]


class PipelineResult(NamedTuple):
    clean: list[OptionQuote]
    report: CleaningReport
    removals: list[RemovalRecord]
    diagnostics: list[GroupDiagnostics | SkippedGroup]


def count_by_type(quotes) -> dict[OptionType, int]:
    c = Counter(q.option_type for q in quotes)
    return {t: c.get(t, 0) for t in OptionType}


def run_outlier_stage(
    quotes: list[OptionQuote], config: CleaningConfig
) -> tuple[list[OptionQuote], list[RemovalRecord], list[GroupDiagnostics | SkippedGroup]]:
    removed: list[RemovalRecord] = []
    diags: list[GroupDiagnostics | SkippedGroup] = []
    for group in group_by_maturity(quotes):
        _, rem, diag = detect_outliers(group, config)
        removed.extend(rem)
        diags.append(diag)
    gone = {r.quote_id for r in removed}
    return [q for q in quotes if q.id not in gone], removed, diags


STEPS = ("bounds", "outliers", "dedup")
_STEP_STAGES = {
    "bounds": (Stage.ARBITRAGE_BOUND,),
    "outliers": (Stage.OUTLIER,),
    "dedup": (Stage.DUPLICATE_MONOTONICITY, Stage.DUPLICATE_OPEN_INTEREST),
}


def run_pipeline(
    quotes: list[OptionQuote],
    ctx: MarketContext | None,
    config: CleaningConfig | None = None,
    steps: tuple[str, ...] = STEPS,
) -> PipelineResult:
    """Arbitrage bounds, then outliers per maturity group, then duplicates.

    ``steps`` restricts the run to a subset of ``STEPS``; the order is
    fixed regardless of how the subset is given. ``ctx`` is only needed
    when the bounds step runs. Kept quotes stay in input order.
    """
    unknown = set(steps) - set(STEPS)
    if unknown:
        raise ValueError(f"unknown steps: {sorted(unknown)}")
    if "bounds" in steps and ctx is None:
        raise ValueError("the bounds step needs a MarketContext")
    config = config or CleaningConfig()
    quotes = validate_dataset(quotes)
    inputs = count_by_type(quotes)

    removals: list[RemovalRecord] = []
    diags: list[GroupDiagnostics | SkippedGroup] = []
    current = quotes
    if "bounds" in steps:
        current, rem = filter_arbitrage(current, ctx, config)
        removals.extend(rem)
    if "outliers" in steps:
        current, rem, diags = run_outlier_stage(current, config)
        removals.extend(rem)
    if "dedup" in steps:
        current, rem = deduplicate(current)
        removals.extend(rem)

    stages = tuple(s for step in STEPS if step in steps for s in _STEP_STAGES[step])
    warnings = [d.message() for d in diags if isinstance(d, SkippedGroup)]
    report = CleaningReport.from_removals(inputs, removals, stages, warnings)
    return PipelineResult(current, report, removals, diags)
