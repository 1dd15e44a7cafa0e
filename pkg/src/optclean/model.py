"""Domain types shared by every cleaning stage."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

from optclean.errors import NegativeField, ValidationError, ZeroMaturity

__all__ = [
    "OptionType",
    "OptionQuote",
    "MarketContext",
    "CleaningConfig",
    "Stage",
    "RemovalRecord",
    "StageCount",
    "CleaningReport",
    "validate_quote",
    "years_to_maturity",
    "validate_dataset",
]


class OptionType(str, enum.Enum):
    CALL = "call"
    PUT = "put"

    @classmethod
    def parse(cls, text: str) -> "OptionType":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"option type must be 'call' or 'put', got {text!r}") from None


@dataclass(frozen=True, slots=True)
class OptionQuote:
    """One recorded option row.

    Construction does not check field ranges; run :func:`validate_quote`
    on anything coming from outside the package.
    """

    id: int
    option_type: OptionType
    strike: float
    maturity_days: int
    price: float
    open_interest: int

    @property
    def key(self) -> tuple[OptionType, float, int]:
        """Identity used for duplicate detection."""
        return (self.option_type, self.strike, self.maturity_days)


@dataclass(frozen=True, slots=True)
class MarketContext:
    """Spot and continuously compounded rate for one dataset snapshot."""

    spot: float
    rate: float
    dividend_yield: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.spot) and self.spot > 0):
            raise ValidationError(f"spot must be positive, got {self.spot}")
        if not math.isfinite(self.rate):
            raise ValidationError(f"rate must be finite, got {self.rate}")
        if self.dividend_yield != 0:
            # the bounds used by the arbitrage filter assume a non-paying underlying
            raise ValidationError(
                f"dividend-paying underlyings are not supported (dividend_yield={self.dividend_yield})"
            )


@dataclass(frozen=True, slots=True)
class CleaningConfig:
    alpha: float = 0.01
    poly_degree: int = 2
    min_group_size: int = 5
    day_count: float = 365.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.poly_degree < 1:
            raise ValidationError(f"poly_degree must be >= 1, got {self.poly_degree}")
        if self.min_group_size < self.poly_degree + 2:
            raise ValidationError(
                f"min_group_size must be >= poly_degree + 2 = {self.poly_degree + 2}, "
                f"got {self.min_group_size}"
            )
        if not self.day_count > 0:
            raise ValidationError(f"day_count must be positive, got {self.day_count}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "poly_degree": self.poly_degree,
            "min_group_size": self.min_group_size,
            "day_count": self.day_count,
        }


class Stage(str, enum.Enum):
    ARBITRAGE_BOUND = "ArbitrageBound"
    OUTLIER = "Outlier"
    DUPLICATE_MONOTONICITY = "DuplicateMonotonicity"
    DUPLICATE_OPEN_INTEREST = "DuplicateOpenInterest"


@dataclass(frozen=True)
class RemovalRecord:
    quote_id: int
    option_type: OptionType
    stage: Stage
    reason: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.quote_id,
            "type": self.option_type.value,
            "stage": self.stage.value,
            "reason": self.reason,
            "diagnostics": dict(self.detail),
        }


@dataclass(frozen=True)
class StageCount:
    option_type: OptionType
    stage: Stage
    input_count: int
    removed_count: int

    @property
    def output_count(self) -> int:
        return self.input_count - self.removed_count

    @property
    def removed_fraction(self) -> float:
        return self.removed_count / self.input_count if self.input_count else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": self.option_type.value,
            "stage": self.stage.value,
            "input_count": self.input_count,
            "removed_count": self.removed_count,
            "output_count": self.output_count,
            "removed_fraction": self.removed_fraction,
        }


@dataclass
class CleaningReport:
    """Per-type, per-stage removal accounting."""

    stage_counts: list[StageCount]
    warnings: list[str] = field(default_factory=list)

    @classmethod
    def from_removals(
        cls,
        inputs: dict[OptionType, int],
        removals: list[RemovalRecord],
        stages: tuple[Stage, ...] = tuple(Stage),
        warnings: list[str] | None = None,
    ) -> "CleaningReport":
        counts = []
        for otype in OptionType:
            remaining = inputs.get(otype, 0)
            for stage in stages:
                n = sum(1 for r in removals if r.option_type is otype and r.stage is stage)
                counts.append(StageCount(otype, stage, remaining, n))
                remaining -= n
        return cls(counts, list(warnings or []))

    def for_type(self, option_type: OptionType) -> list[StageCount]:
        return [c for c in self.stage_counts if c.option_type is option_type]

    def input_count(self, option_type: OptionType) -> int:
        rows = self.for_type(option_type)
        return rows[0].input_count if rows else 0

    def removed_count(self, option_type: OptionType) -> int:
        return sum(c.removed_count for c in self.for_type(option_type))

    def output_count(self, option_type: OptionType) -> int:
        return self.input_count(option_type) - self.removed_count(option_type)

    def removed_fraction(self, option_type: OptionType) -> float:
        n = self.input_count(option_type)
        return self.removed_count(option_type) / n if n else 0.0

    def per_type_counts(self) -> dict[str, dict[str, Any]]:
        return {
            t.value: {
                "input_count": self.input_count(t),
                "removed_count": self.removed_count(t),
                "output_count": self.output_count(t),
                "removed_fraction": self.removed_fraction(t),
            }
            for t in OptionType
        }


def validate_quote(q: OptionQuote) -> OptionQuote:
    """Return ``q`` unchanged if every field invariant holds.

    Raises
    ------
    ZeroMaturity
        If ``maturity_days`` is not strictly positive.
    NegativeField
        If strike, price or open interest is negative.
    ValidationError
        For non-finite or wrongly typed fields.
    """
    if not isinstance(q.option_type, OptionType):
        raise ValidationError(f"quote {q.id}: unknown option type {q.option_type!r}")
    for name in ("strike", "price"):
        value = getattr(q, name)
        if not math.isfinite(value):
            raise ValidationError(f"quote {q.id}: {name} is not finite ({value})")
        if value < 0:
            raise NegativeField(f"quote {q.id}: {name} must be >= 0, got {value}")
    if int(q.maturity_days) != q.maturity_days:
        raise ValidationError(f"quote {q.id}: maturity_days must be an integer, got {q.maturity_days}")
    if q.maturity_days <= 0:
        raise ZeroMaturity(f"quote {q.id}: maturity_days must be > 0, got {q.maturity_days}")
    if int(q.open_interest) != q.open_interest:
        raise ValidationError(f"quote {q.id}: open_interest must be an integer, got {q.open_interest}")
    if q.open_interest < 0:
        raise NegativeField(f"quote {q.id}: open_interest must be >= 0, got {q.open_interest}")
    return q


def years_to_maturity(maturity_days: int, day_count: float = 365.0) -> float:
    if maturity_days <= 0:
        raise ZeroMaturity(f"maturity_days must be > 0, got {maturity_days}")
    if day_count <= 0:
        raise ValidationError(f"day_count must be positive, got {day_count}")
    return maturity_days / day_count


def validate_dataset(quotes) -> list[OptionQuote]:
    """Validate every quote and check that ids are unique."""
    seen = set()
    out = []
    for q in quotes:
        validate_quote(q)
        if q.id in seen:
            raise ValidationError(f"duplicate quote id {q.id}")
        seen.add(q.id)
        out.append(q)
    return out
