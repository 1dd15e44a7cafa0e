"""Model-free cleaning of recorded European option price datasets.

Three stages run in a fixed order: no-arbitrage bound filtering, per-maturity
smile regression with a simultaneous residual band, and duplicate resolution.
"""

from optclean.arbitrage import PriceBounds, call_bounds, filter_arbitrage, put_bounds
from optclean.dedup import deduplicate, find_duplicate_sets, monotonicity_prune, open_interest_resolve
from optclean.ingest import compute_log_returns, read_quotes, write_clean, write_report
from optclean.model import (
    CleaningConfig,
    CleaningReport,
    MarketContext,
    OptionQuote,
    OptionType,
    RemovalRecord,
    Stage,
    validate_quote,
    years_to_maturity,
)
from optclean.numerics import PolyCoeffs, fit_polynomial, normal_quantile, residual_sigma, residuals
from optclean.outliers import critical_value, detect_outliers, group_by_maturity
from optclean.pipeline import run_pipeline

__version__ = "0.1.0"
