import math

import pytest
from hypothesis import given, strategies as st

from optclean.arbitrage import call_bounds, filter_arbitrage, put_bounds
from optclean.model import CleaningConfig, MarketContext, Stage

from conftest import make_quote
from oracles import in_call_interval, in_put_interval

SP500 = MarketContext(1353.39, 0.0015)
POWERSHARES = MarketContext(64.18, 0.0015)


def test_call_bounds_sp500_at_the_money():
    b = call_bounds(SP500, 1350, 0.5)
    assert b.lower == pytest.approx(4.402120407404027, abs=1e-9)
    assert b.upper == 1353.39


def test_call_bounds_zero_strike_pins_to_spot():
    b = call_bounds(SP500, 0.0, 0.7)
    assert b.lower == b.upper == 1353.39


def test_call_lower_bound_clamps_at_zero():
    b = call_bounds(MarketContext(100, 0.0), 200, 1.0)
    assert (b.lower, b.upper) == (0.0, 100.0)


def test_put_bounds_out_of_the_money():
    b = put_bounds(MarketContext(100, 0.05), 90, 0.5)
    assert b.lower == 0.0
    assert b.upper == pytest.approx(87.77789208254994, abs=1e-9)


def test_put_bounds_zero_strike():
    b = put_bounds(SP500, 0.0, 0.25)
    assert (b.lower, b.upper) == (0.0, 0.0)


def test_put_bounds_powershares_in_the_money():
    b = put_bounds(POWERSHARES, 80, 1.0)
    assert b.lower == pytest.approx(15.700089955016864, abs=1e-9)
    assert b.upper == pytest.approx(79.88008995501687, abs=1e-9)


def test_non_positive_maturity_rejected():
    with pytest.raises(ValueError):
        call_bounds(SP500, 100, 0.0)


def test_boundaries_are_inclusive():
    ctx = MarketContext(100.0, 0.0)
    kept, removed = filter_arbitrage([make_quote(1, "call", 50, 365, 100.0)], ctx)
    assert len(kept) == 1 and not removed


def test_call_above_spot_removed():
    ctx = MarketContext(100.0, 0.0)
    kept, removed = filter_arbitrage([make_quote(1, "call", 50, 365, 100.01)], ctx)
    assert not kept
    (r,) = removed
    assert r.stage is Stage.ARBITRAGE_BOUND
    assert r.reason == "ArbitrageBound(upper)"
    assert r.detail["bound_value"] == 100.0


def test_put_below_intrinsic_removed():
    ctx = MarketContext(100.0, 0.02)
    lower = 120 * math.exp(-0.02) - 100
    kept, removed = filter_arbitrage([make_quote(7, "put", 120, 365, lower - 1e-6)], ctx)
    assert not kept
    assert removed[0].reason == "ArbitrageBound(lower)"
    assert removed[0].detail["bound_value"] == pytest.approx(lower)


def test_order_preserved_and_day_count_used():
    ctx = MarketContext(100.0, 0.05)
    quotes = [make_quote(i, "put", 100, 252, p) for i, p in enumerate([1.0, 200.0, 3.0, 2.0])]
    kept, removed = filter_arbitrage(quotes, ctx, CleaningConfig(day_count=252))
    assert [q.id for q in kept] == [0, 2, 3]
    assert [r.quote_id for r in removed] == [1]


tuples = st.tuples(
    st.sampled_from(["call", "put"]),
    st.floats(1, 5000),
    st.floats(0, 8000),
    st.floats(-0.02, 0.2),
    st.integers(1, 1500),
    st.floats(0, 9000),
)


@given(st.lists(tuples, min_size=1, max_size=30))
def test_filter_idempotent_and_sound(rows):
    for kind, spot, strike, rate, days, price in rows:
        ctx = MarketContext(spot, rate)
        q = make_quote(1, kind, strike, days, price)
        kept, removed = filter_arbitrage([q], ctx)
        T = days / 365
        inside = (in_call_interval if kind == "call" else in_put_interval)(spot, strike, rate, T, price)
        assert bool(kept) == inside
        assert bool(removed) != inside
        assert filter_arbitrage(kept, ctx)[1] == []


@given(st.floats(1, 1000), st.floats(0, 2000), st.floats(0, 0.1), st.integers(1, 1000),
       st.floats(0, 1))
def test_monotone_in_price(spot, strike, rate, days, frac):
    ctx = MarketContext(spot, rate)
    b = call_bounds(ctx, strike, days / 365)
    p = b.upper
    lower_p = b.lower + frac * (p - b.lower)
    assert filter_arbitrage([make_quote(1, "call", strike, days, p)], ctx)[0]
    assert filter_arbitrage([make_quote(1, "call", strike, days, lower_p)], ctx)[0]
