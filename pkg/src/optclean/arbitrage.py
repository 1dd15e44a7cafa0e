"""Stage 1: drop quotes priced outside the model-free no-arbitrage interval."""

from __future__ import annotations

import math
from dataclasses import dataclass

from optclean.model import (
    CleaningConfig,
    MarketContext,
    OptionQuote,
    OptionType,
    RemovalRecord,
    Stage,
    years_to_maturity,
)

__all__ = ["PriceBounds", "call_bounds", "put_bounds", "bounds_for", "filter_arbitrage"]


@dataclass(frozen=True, slots=True)
class PriceBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"invalid bounds [{self.lower}, {self.upper}]")

    def __contains__(self, price: float) -> bool:
        return self.lower <= price <= self.upper


def _check_t(T: float):
    if not T > 0:
        raise ValueError(f"time to maturity must be positive, got {T}")


def call_bounds(ctx: MarketContext, strike: float, T: float) -> PriceBounds:
    """``max(S0 - K exp(-rT), 0) <= C <= S0``."""
    _check_t(T)
    pv_strike = strike * math.exp(-ctx.rate * T)
    return PriceBounds(max(ctx.spot - pv_strike, 0.0), ctx.spot)


def put_bounds(ctx: MarketContext, strike: float, T: float) -> PriceBounds:
    """``max(K exp(-rT) - S0, 0) <= P <= K exp(-rT)``."""
    _check_t(T)
    pv_strike = strike * math.exp(-ctx.rate * T)
    return PriceBounds(max(pv_strike - ctx.spot, 0.0), pv_strike)


def bounds_for(q: OptionQuote, ctx: MarketContext, day_count: float = 365.0) -> PriceBounds:
    T = years_to_maturity(q.maturity_days, day_count)
    if q.option_type is OptionType.CALL:
        return call_bounds(ctx, q.strike, T)
    return put_bounds(ctx, q.strike, T)


def filter_arbitrage(
    quotes: list[OptionQuote],
    ctx: MarketContext,
    config: CleaningConfig | None = None,
) -> tuple[list[OptionQuote], list[RemovalRecord]]:
    """Split quotes into those inside their no-arbitrage interval and removals.

    Bounds are inclusive and compared without tolerance. Each quote is
    judged on its own; order of the kept quotes is preserved.
    """
    day_count = (config or CleaningConfig()).day_count
    kept: list[OptionQuote] = []
    removed: list[RemovalRecord] = []
    for q in quotes:
        b = bounds_for(q, ctx, day_count)
        if q.price < b.lower:
            side, bound = "lower", b.lower
        elif q.price > b.upper:
            side, bound = "upper", b.upper
        else:
            kept.append(q)
            continue
        removed.append(
            RemovalRecord(
                q.id,
                q.option_type,
                Stage.ARBITRAGE_BOUND,
                f"ArbitrageBound({side})",
                {"bound": side, "bound_value": bound, "price": q.price,
                 "lower": b.lower, "upper": b.upper},
            )
        )
    return kept, removed
