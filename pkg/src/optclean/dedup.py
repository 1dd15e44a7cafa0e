"""Stage 3: resolve quotes sharing (type, strike, maturity).

Duplicated quotes are first checked against their strike neighbours for
monotonicity (calls fall and puts rise with strike). Whatever survives is
then reduced to the single member with the largest open interest.
"""

from __future__ import annotations

import bisect
from collections import defaultdict

from optclean.model import OptionQuote, OptionType, RemovalRecord, Stage

__all__ = [
    "find_duplicate_sets",
    "reference_quote",
    "monotonicity_prune",
    "open_interest_resolve",
    "deduplicate",
]


def _oi_rank(q: OptionQuote):
    # max open interest first, then earliest row
    return (-q.open_interest, q.id)


def find_duplicate_sets(quotes: list[OptionQuote]) -> list[list[OptionQuote]]:
    """Maximal sets (size >= 2) sharing type, strike and maturity, in first-seen order."""
    by_key: dict[tuple, list[OptionQuote]] = {}
    for q in quotes:
        by_key.setdefault(q.key, []).append(q)
    return [members for members in by_key.values() if len(members) > 1]


def reference_quote(members: list[OptionQuote]) -> OptionQuote:
    """The quote that stands for a strike when comparing against neighbours."""
    return min(members, key=_oi_rank)


def monotonicity_prune(
    group: list[OptionQuote],
    dup_sets: list[list[OptionQuote]],
) -> tuple[list[list[OptionQuote]], list[RemovalRecord]]:
    """Remove duplicated quotes that break strike monotonicity.

    ``group`` is every quote sharing one (type, maturity); ``dup_sets`` are
    the duplicate sets inside it. Neighbour reference prices come from the
    group as given, so the outcome does not depend on processing order.
    Returns the surviving members of each set (possibly empty) and the
    removal records.
    """
    if not dup_sets:
        return [], []
    by_strike: dict[float, list[OptionQuote]] = defaultdict(list)
    for q in group:
        by_strike[q.strike].append(q)
    strikes = sorted(by_strike)
    refs = {k: reference_quote(v) for k, v in by_strike.items()}

    survivors: list[list[OptionQuote]] = []
    removed: list[RemovalRecord] = []
    for members in dup_sets:
        k = members[0].strike
        i = bisect.bisect_left(strikes, k)
        below = refs[strikes[i - 1]] if i > 0 else None
        above = refs[strikes[i + 1]] if i + 1 < len(strikes) else None
        ids = [m.id for m in members]
        keep = []
        for q in members:
            hit = _violation(q, below, above)
            if hit is None:
                keep.append(q)
                continue
            side, ref = hit
            removed.append(
                RemovalRecord(
                    q.id, q.option_type, Stage.DUPLICATE_MONOTONICITY,
                    f"DuplicateMonotonicity({side})",
                    {"neighbor": side, "neighbor_id": ref.id, "neighbor_strike": ref.strike,
                     "neighbor_price": ref.price, "price": q.price, "competing_ids": ids},
                )
            )
        survivors.append(keep)
    return survivors, removed


def _violation(q: OptionQuote, below: OptionQuote | None, above: OptionQuote | None):
    # strict comparisons: equal prices at adjacent strikes are allowed
    if q.option_type is OptionType.CALL:
        if below is not None and q.price > below.price:
            return "lower", below
        if above is not None and q.price < above.price:
            return "upper", above
    else:
        if below is not None and q.price < below.price:
            return "lower", below
        if above is not None and q.price > above.price:
            return "upper", above
    return None


def open_interest_resolve(
    dup_sets: list[list[OptionQuote]],
) -> tuple[list[OptionQuote], list[RemovalRecord]]:
    """Keep the largest-open-interest member of each set (earliest row on ties)."""
    kept: list[OptionQuote] = []
    removed: list[RemovalRecord] = []
    for members in dup_sets:
        if not members:
            continue
        winner = reference_quote(members)
        kept.append(winner)
        ids = [m.id for m in members]
        for q in members:
            if q is winner:
                continue
            removed.append(
                RemovalRecord(
                    q.id, q.option_type, Stage.DUPLICATE_OPEN_INTEREST, "DuplicateOpenInterest",
                    {"kept_id": winner.id, "open_interest": q.open_interest,
                     "kept_open_interest": winner.open_interest, "competing_ids": ids},
                )
            )
    return kept, removed


def deduplicate(quotes: list[OptionQuote]) -> tuple[list[OptionQuote], list[RemovalRecord]]:
    """Run both substeps over all (type, maturity) groups; input order is kept."""
    dup_sets = find_duplicate_sets(quotes)
    if not dup_sets:
        return list(quotes), []

    groups: dict[tuple[OptionType, int], list[OptionQuote]] = defaultdict(list)
    for q in quotes:
        groups[(q.option_type, q.maturity_days)].append(q)
    sets_by_group: dict[tuple[OptionType, int], list[list[OptionQuote]]] = defaultdict(list)
    for members in dup_sets:
        sets_by_group[(members[0].option_type, members[0].maturity_days)].append(members)

    pruned_removed: list[RemovalRecord] = []
    remaining: list[list[OptionQuote]] = []
    for key, sets in sets_by_group.items():
        survivors, rem = monotonicity_prune(groups[key], sets)
        remaining.extend(survivors)
        pruned_removed.extend(rem)
    _, oi_removed = open_interest_resolve(remaining)

    removed = pruned_removed + oi_removed
    gone = {r.quote_id for r in removed}
    removed.sort(key=lambda r: r.quote_id)
    return [q for q in quotes if q.id not in gone], removed
