"""Synthetic arbitrage-free option chains with labelled corruptions.

Random draws come from numpy's PCG64 generator (``numpy.random.Generator``),
whose algorithm and stream are documented and stable across platforms, so a
(spec, seed) pair always yields the same chain.
"""

from __future__ import annotations

import argparse
import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from optclean.arbitrage import bounds_for
from optclean.errors import SpecInfeasible, TooManyInjections
from optclean.ingest import write_clean
from optclean.model import MarketContext, OptionQuote, OptionType
from optclean.outliers import MaturityGroup

__all__ = [
    "SmileSpec",
    "Injection",
    "generate_group",
    "inject_errors",
    "build_fixture",
    "write_fixture",
    "read_labels",
]

BOUND_VIOLATION = "bound_violation"
OUTLIER = "outlier"
DUPLICATE = "duplicate"
CLEAN = "clean"


@dataclass(frozen=True)
class SmileSpec:
    """Price curve ``a + b K + c K^2`` for one (type, maturity) group."""

    a: float
    b: float
    c: float
    option_type: OptionType = OptionType.CALL
    maturity_days: int = 182

    def price(self, strikes):
        k = np.asarray(strikes, dtype=float)
        return self.a + self.b * k + self.c * k * k


@dataclass(frozen=True)
class Injection:
    quote_id: int
    kind: str
    target_id: int


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate_group(
    spec: SmileSpec,
    strikes: Sequence[float],
    noise_sigma: float,
    seed: int,
    ctx: MarketContext,
    day_count: float = 365.0,
    start_id: int = 1,
    oi_range: tuple[int, int] = (100, 5000),
) -> tuple[MaturityGroup, dict[int, str]]:
    """Quotes on the smile plus iid normal noise, every one inside its
    no-arbitrage interval. Labels are all ``"clean"``."""
    strikes = np.asarray(strikes, dtype=float)
    if len(strikes) == 0:
        raise SpecInfeasible("no strikes given")
    rng = _rng(seed)
    base = spec.price(strikes)
    prices = base + rng.normal(0.0, noise_sigma, len(strikes)) if noise_sigma > 0 else base
    ois = rng.integers(oi_range[0], oi_range[1], len(strikes), endpoint=True)

    quotes = []
    for i, (k, p0, p, oi) in enumerate(zip(strikes, base, prices, ois)):
        q = OptionQuote(start_id + i, spec.option_type, float(k), spec.maturity_days,
                        float(p), int(oi))
        b = bounds_for(q, ctx, day_count)
        if not b.lower <= p0 <= b.upper:
            raise SpecInfeasible(
                f"smile price {p0:.6g} at strike {k:g} is outside [{b.lower:.6g}, {b.upper:.6g}]"
            )
        if not b.lower <= p <= b.upper:
            raise SpecInfeasible(
                f"noisy price {p:.6g} at strike {k:g} leaves [{b.lower:.6g}, {b.upper:.6g}]; "
                "reduce the noise or move the strike range"
            )
        quotes.append(q)
    group = MaturityGroup(spec.option_type, spec.maturity_days, tuple(quotes))
    return group, {q.id: CLEAN for q in quotes}


def inject_errors(
    group: MaturityGroup,
    counts: dict[str, int],
    seed: int,
    ctx: MarketContext,
    noise_sigma: float,
    outlier_k: float = 10.0,
    day_count: float = 365.0,
) -> tuple[MaturityGroup, list[Injection]]:
    """Corrupt a clean group.

    ``counts`` maps ``"bound_violation"``, ``"outlier"`` and ``"duplicate"``
    to how many of each to inject. Bound violations and outliers rewrite the
    price of an existing quote; duplicates append a new row at the strike of
    an existing quote with a nearby price and a smaller open interest, so
    the original is the one that should survive. Targets are disjoint, and
    duplicate targets are never next to an outlier so that the neighbour
    check in deduplication sees clean prices.
    """
    n = len(group)
    want = {k: int(counts.get(k, 0)) for k in (BOUND_VIOLATION, OUTLIER, DUPLICATE)}
    unknown = set(counts) - set(want)
    if unknown:
        raise ValueError(f"unknown injection kinds: {sorted(unknown)}")
    if sum(want.values()) > n:
        raise TooManyInjections(f"{sum(want.values())} injections requested for {n} quotes")

    rng = _rng(seed)
    quotes = list(group.quotes)
    order = np.argsort([q.strike for q in quotes], kind="stable")
    rank = {int(i): r for r, i in enumerate(order)}
    used: set[int] = set()
    injections: list[Injection] = []
    candidates = [int(i) for i in rng.permutation(n)]

    def take(ok) -> int:
        for i in candidates:
            if i not in used and ok(i):
                used.add(i)
                return i
        raise TooManyInjections("not enough eligible quotes left for the requested injections")

    outlier_pos: set[int] = set()
    for _ in range(want[OUTLIER]):
        shift = outlier_k * noise_sigma

        def fits(i):
            b = bounds_for(quotes[i], ctx, day_count)
            return quotes[i].price - shift >= b.lower or quotes[i].price + shift <= b.upper

        i = take(fits)
        q = quotes[i]
        b = bounds_for(q, ctx, day_count)
        signs = [s for s in (1.0, -1.0) if b.lower <= q.price + s * shift <= b.upper]
        sign = signs[int(rng.integers(len(signs)))]
        quotes[i] = _with_price(q, q.price + sign * shift)
        injections.append(Injection(q.id, OUTLIER, q.id))
        outlier_pos.add(rank[i])

    for _ in range(want[BOUND_VIOLATION]):
        i = take(lambda i: True)
        q = quotes[i]
        b = bounds_for(q, ctx, day_count)
        sides = ["upper"] + (["lower"] if b.lower > 0 else [])
        side = sides[int(rng.integers(len(sides)))]
        if side == "upper":
            if b.upper == 0:
                price = float(rng.uniform(0.01, 1.0))
            else:
                price = b.upper * (1.0 + float(rng.uniform(0.01, 0.5)))
        else:
            price = b.lower * float(rng.uniform(0.0, 0.9))
        quotes[i] = _with_price(q, price)
        injections.append(Injection(q.id, BOUND_VIOLATION, q.id))

    next_id = max(q.id for q in quotes) + 1
    extra = []
    for _ in range(want[DUPLICATE]):
        i = take(lambda i: quotes[i].open_interest >= 2
                 and not ({rank[i] - 1, rank[i] + 1} & outlier_pos))
        q = quotes[i]
        dup = OptionQuote(
            next_id, q.option_type, q.strike, q.maturity_days,
            max(0.0, q.price + 0.5 * noise_sigma * float(rng.standard_normal())),
            int(rng.integers(0, q.open_interest)),
        )
        extra.append(dup)
        injections.append(Injection(dup.id, DUPLICATE, q.id))
        next_id += 1

    return MaturityGroup(group.option_type, group.maturity_days, tuple(quotes + extra)), injections


def _with_price(q: OptionQuote, price: float) -> OptionQuote:
    return OptionQuote(q.id, q.option_type, q.strike, q.maturity_days, float(price), q.open_interest)


# Acceptance fixture layout: one call and one put chain at the same maturity.
FIXTURE_CONTEXT = MarketContext(spot=100.0, rate=0.01)
FIXTURE_STRIKES = np.round(np.linspace(60.0, 140.0, 150), 2)
FIXTURE_NOISE = 0.01
FIXTURE_SMILES = (
    SmileSpec(1.0 + 0.004 * 160.0**2, -0.008 * 160.0, 0.004, OptionType.CALL, 182),
    SmileSpec(1.0 + 0.004 * 40.0**2, -0.008 * 40.0, 0.004, OptionType.PUT, 182),
)
FIXTURE_COUNTS = (
    {BOUND_VIOLATION: 3, OUTLIER: 2, DUPLICATE: 2},
    {BOUND_VIOLATION: 2, OUTLIER: 1, DUPLICATE: 2},
)


def build_fixture(seed: int) -> tuple[list[OptionQuote], list[Injection]]:
    """5 bound violations, 3 ten-sigma outliers and 4 duplicate sets over
    a call chain and a put chain of 150 strikes each."""
    quotes: list[OptionQuote] = []
    injections: list[Injection] = []
    next_id = 1
    for j, (spec, counts) in enumerate(zip(FIXTURE_SMILES, FIXTURE_COUNTS)):
        group, _ = generate_group(spec, FIXTURE_STRIKES, FIXTURE_NOISE, seed * 1000 + 2 * j,
                                  FIXTURE_CONTEXT, start_id=next_id)
        group, inj = inject_errors(group, counts, seed * 1000 + 2 * j + 1, FIXTURE_CONTEXT,
                                   FIXTURE_NOISE)
        quotes.extend(group.quotes)
        injections.extend(inj)
        next_id = max(q.id for q in quotes) + 1
    return quotes, injections


def write_fixture(directory, seed: int) -> tuple[Path, Path]:
    """Write ``fixture_<seed>.csv`` and its ``fixture_<seed>.labels.csv`` sidecar.

    Quotes are written in id order, so re-reading assigns the same ids.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    quotes, injections = build_fixture(seed)
    qpath = out / f"fixture_{seed:02d}.csv"
    lpath = out / f"fixture_{seed:02d}.labels.csv"
    write_clean(qpath, sorted(quotes, key=lambda q: q.id))
    with open(lpath, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "kind", "target_id"])
        for inj in sorted(injections, key=lambda i: i.quote_id):
            w.writerow([inj.quote_id, inj.kind, inj.target_id])
    return qpath, lpath


def read_labels(path) -> list[Injection]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [Injection(int(r["id"]), r["kind"], int(r["target_id"])) for r in csv.DictReader(fh)]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="python -m optclean.synthgen",
                                description="Write labelled synthetic fixtures.")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seeds", type=int, default=20, help="number of fixtures (seeds 0..N-1)")
    args = p.parse_args(argv)
    for seed in range(args.seeds):
        write_fixture(args.out, seed)
    ctx = {"spot": FIXTURE_CONTEXT.spot, "rate": FIXTURE_CONTEXT.rate}
    (Path(args.out) / "context.json").write_text(json.dumps(ctx) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
