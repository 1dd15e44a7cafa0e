"""Stage 2: per-maturity quadratic smile fit and simultaneous residual band."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from optclean.errors import DegenerateResiduals, InsufficientPoints, SingularDesign
from optclean.model import CleaningConfig, OptionQuote, OptionType, RemovalRecord, Stage
from optclean.numerics import PolyCoeffs, fit_polynomial, normal_quantile, residual_sigma

log = logging.getLogger(__name__)

__all__ = [
    "MaturityGroup",
    "GroupDiagnostics",
    "SkippedGroup",
    "group_by_maturity",
    "critical_value",
    "flag_outliers",
    "detect_outliers",
]


@dataclass(frozen=True)
class MaturityGroup:
    option_type: OptionType
    maturity_days: int
    quotes: tuple[OptionQuote, ...]

    def __post_init__(self):
        if not self.quotes:
            raise ValueError("a maturity group needs at least one quote")
        for q in self.quotes:
            if q.option_type is not self.option_type or q.maturity_days != self.maturity_days:
                raise ValueError(
                    f"quote {q.id} ({q.option_type.value}, {q.maturity_days}d) does not belong to "
                    f"group ({self.option_type.value}, {self.maturity_days}d)"
                )

    def __len__(self):
        return len(self.quotes)

    @property
    def label(self) -> str:
        return f"{self.option_type.value}_{self.maturity_days}d"

    def points(self) -> np.ndarray:
        return np.array([(q.strike, q.price) for q in self.quotes], dtype=float)


@dataclass(frozen=True)
class GroupDiagnostics:
    option_type: OptionType
    maturity_days: int
    coeffs: PolyCoeffs
    sigma_hat: float
    c_hat: float
    quote_ids: tuple[int, ...]
    strikes: tuple[float, ...]
    prices: tuple[float, ...]
    fitted: tuple[float, ...]
    residuals: tuple[float, ...]
    flagged_ids: tuple[int, ...]

    @property
    def label(self) -> str:
        return f"{self.option_type.value}_{self.maturity_days}d"


@dataclass(frozen=True)
class SkippedGroup:
    """A group passed through untouched, with the reason it was not tested."""

    option_type: OptionType
    maturity_days: int
    size: int
    reason: str
    detail: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.option_type.value}_{self.maturity_days}d"

    def message(self) -> str:
        return f"outlier test skipped for {self.label} (n={self.size}): {self.reason}"


def group_by_maturity(quotes: list[OptionQuote]) -> list[MaturityGroup]:
    """Partition by (type, maturity); groups sorted by maturity, calls first."""
    buckets: dict[tuple[OptionType, int], list[OptionQuote]] = {}
    for q in quotes:
        buckets.setdefault((q.option_type, q.maturity_days), []).append(q)
    order = {OptionType.CALL: 0, OptionType.PUT: 1}
    keys = sorted(buckets, key=lambda k: (k[1], order[k[0]]))
    return [MaturityGroup(t, m, tuple(buckets[(t, m)])) for t, m in keys]


def critical_value(sigma: float, n: int, alpha: float) -> float:
    """Half-width c of the band [-c, c] that holds all n iid N(0, sigma^2)
    residuals at once with probability 1 - alpha.

    From ``1 - alpha = (2 Phi(c / sigma) - 1) ** n``.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    p = 0.5 + 0.5 * (1.0 - alpha) ** (1.0 / n)
    return sigma * normal_quantile(p)


def flag_outliers(res, sigma: float, alpha: float) -> tuple[np.ndarray, float]:
    """Boolean mask of residuals strictly outside [-c, c], and c itself."""
    r = np.asarray(res, dtype=float)
    c = critical_value(sigma, r.shape[-1], alpha)
    return np.abs(r) > c, c


def detect_outliers(
    group: MaturityGroup,
    config: CleaningConfig | None = None,
) -> tuple[list[OptionQuote], list[RemovalRecord], GroupDiagnostics | SkippedGroup]:
    """Fit, flag and remove in a single pass (no refit after removal)."""
    config = config or CleaningConfig()
    n = len(group)
    quotes = list(group.quotes)
    if n < config.min_group_size:
        return quotes, [], SkippedGroup(
            group.option_type, group.maturity_days, n,
            f"fewer than min_group_size={config.min_group_size} quotes",
        )

    pts = group.points()
    try:
        coeffs = fit_polynomial(pts, config.poly_degree)
    except (SingularDesign, InsufficientPoints) as exc:
        log.warning("group %s: %s", group.label, exc)
        return quotes, [], SkippedGroup(
            group.option_type, group.maturity_days, n, f"singular design: {exc}"
        )
    fitted = coeffs(pts[:, 0])
    res = pts[:, 1] - fitted
    try:
        sigma = residual_sigma(res, scale=float(np.max(np.abs(pts[:, 1]))))
    except DegenerateResiduals as exc:
        return quotes, [], SkippedGroup(
            group.option_type, group.maturity_days, n, f"degenerate residuals: {exc}"
        )

    mask, c_hat = flag_outliers(res, sigma, config.alpha)
    kept: list[OptionQuote] = []
    removed: list[RemovalRecord] = []
    for q, r, fit, out in zip(quotes, res, fitted, mask):
        if out:
            removed.append(
                RemovalRecord(
                    q.id, q.option_type, Stage.OUTLIER, "Outlier",
                    {"residual": float(r), "c_hat": c_hat, "sigma_hat": sigma,
                     "fitted": float(fit), "group_size": n},
                )
            )
        else:
            kept.append(q)
    diag = GroupDiagnostics(
        option_type=group.option_type,
        maturity_days=group.maturity_days,
        coeffs=coeffs,
        sigma_hat=sigma,
        c_hat=c_hat,
        quote_ids=tuple(q.id for q in quotes),
        strikes=tuple(float(k) for k in pts[:, 0]),
        prices=tuple(float(p) for p in pts[:, 1]),
        fitted=tuple(float(f) for f in fitted),
        residuals=tuple(float(r) for r in res),
        flagged_ids=tuple(rec.quote_id for rec in removed),
    )
    return kept, removed, diag
