"""Numerical kernels: low-degree polynomial least squares and the normal quantile."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from optclean.errors import DegenerateResiduals, InsufficientPoints, OutOfDomain, SingularDesign

__all__ = [
    "PolyCoeffs",
    "fit_polynomial",
    "residuals",
    "residual_sigma",
    "normal_quantile",
    "normal_cdf",
]

# residual spread below this fraction of the price scale counts as an exact fit
DEGENERATE_RTOL = 1e-10


@dataclass(frozen=True)
class PolyCoeffs:
    """Polynomial in strike, coefficients in ascending powers.

    ``center``/``scale`` and ``scaled`` hold the same polynomial expressed in
    the standardised variable ``(K - center) / scale``; evaluation goes
    through that form when available because it avoids cancellation between
    large powers of the strike.
    """

    coefficients: tuple[float, ...]
    center: float = 0.0
    scale: float = 1.0
    scaled: tuple[float, ...] | None = None

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __len__(self):
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def __getitem__(self, i):
        return self.coefficients[i]

    def __call__(self, strike):
        if self.scaled is not None:
            x = (np.asarray(strike, dtype=float) - self.center) / self.scale
            return np.polynomial.polynomial.polyval(x, self.scaled)
        return np.polynomial.polynomial.polyval(np.asarray(strike, dtype=float), self.coefficients)


def _as_xy(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.empty(0), np.empty(0)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("points must be a sequence of (strike, price) pairs")
    return arr[:, 0], arr[:, 1]


def fit_polynomial(points, degree: int = 2) -> PolyCoeffs:
    """Least-squares polynomial of price on strike.

    Strikes are centred and scaled to roughly [-1, 1] and the Vandermonde
    system is solved through a QR factorisation, so strikes in the
    thousands do not square the condition number the way the normal
    equations would.
    """
    x, y = _as_xy(points)
    n = len(x)
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if n < degree + 1:
        raise InsufficientPoints(f"need at least {degree + 1} points for degree {degree}, got {n}")
    if len(np.unique(x)) < degree + 1:
        raise SingularDesign(f"need {degree + 1} distinct strikes for degree {degree}")

    center = float(x.mean())
    scale = float(np.max(np.abs(x - center)))
    if scale == 0.0:
        raise SingularDesign("all strikes are equal")
    u = (x - center) / scale
    design = np.vander(u, degree + 1, increasing=True)
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-12 * diag.max():
        raise SingularDesign("design matrix is numerically rank deficient")
    a = np.linalg.solve(r, q.T @ y)

    # expand sum_j a_j ((K - m)/s)^j into ascending powers of K
    raw = [0.0] * (degree + 1)
    for j, aj in enumerate(a):
        sj = scale**j
        for k in range(j + 1):
            raw[k] += aj * comb(j, k) * (-center) ** (j - k) / sj
    return PolyCoeffs(
        coefficients=tuple(float(c) for c in raw),
        center=center,
        scale=scale,
        scaled=tuple(float(c) for c in a),
    )


def residuals(points, coeffs: PolyCoeffs | Sequence[float]) -> np.ndarray:
    """Observed price minus fitted price, in input order."""
    if not isinstance(coeffs, PolyCoeffs):
        coeffs = PolyCoeffs(tuple(float(c) for c in coeffs))
    x, y = _as_xy(points)
    return y - coeffs(x)


def residual_sigma(res, scale: float = 0.0) -> float:
    """Sample standard deviation (divisor n - 1) of the residuals.

    ``scale`` is the magnitude of the fitted prices; a spread below
    ``DEGENERATE_RTOL * scale`` is rounding noise from an exact fit and is
    reported as degenerate like an exactly zero spread.
    """
    r = np.asarray(res, dtype=float)
    if r.size < 2:
        raise DegenerateResiduals(f"need at least 2 residuals, got {r.size}")
    sigma = float(np.std(r, ddof=1))
    if sigma == 0.0 or sigma <= DEGENERATE_RTOL * scale:
        raise DegenerateResiduals(f"residual standard deviation is zero ({sigma:.3g})")
    return sigma


# Cephes ndtri (S. L. Moshier), relative error below 1e-15 on (0, 1).
_S2PI = 2.50662827463100050242
_EXP_M2 = 0.13533528323661269189  # exp(-2)

_P0 = (
    -5.99633501014107895267e1,
    9.80010754185999661536e1,
    -5.66762857469070293439e1,
    1.39312609387279679503e1,
    -1.23916583867381258016e0,
)
_Q0 = (
    1.95448858338141759834e0,
    4.67627912898881538453e0,
    8.63602421390890590575e1,
    -2.25462687854119370527e2,
    2.00260212380060660359e2,
    -8.20372256168333339912e1,
    1.59056225126211695515e1,
    -1.18331621121330003142e0,
)
_P1 = (
    4.05544892305962419923e0,
    3.15251094599893866154e1,
    5.71628192246421288162e1,
    4.40805073893200834700e1,
    1.46849561928858024014e1,
    2.18663306850790267539e0,
    -1.40256079171354495875e-1,
    -3.50424626827848203418e-2,
    -8.57456785154685413611e-4,
)
_Q1 = (
    1.57799883256466749731e1,
    4.53907635128879210584e1,
    4.13172038254672030440e1,
    1.50425385692907503408e1,
    2.50464946208309415979e0,
    -1.42182922854787788574e-1,
    -3.80806407691578277194e-2,
    -9.33259480895457427372e-4,
)
_P2 = (
    3.23774891776946035970e0,
    6.91522889068984211695e0,
    3.93881025292474443415e0,
    1.33303460815807542389e0,
    2.01485389549179081538e-1,
    1.23716634817820021358e-2,
    3.01581553508235416007e-4,
    2.65806974686737550832e-6,
    6.23974539184983293730e-9,
)
_Q2 = (
    6.02427039364742014255e0,
    3.67983563856160859403e0,
    1.37702099489081330271e0,
    2.16236993594496635890e-1,
    1.34204006088543189037e-2,
    3.28014464682127739104e-4,
    2.89247864745380683936e-6,
    6.79019408009981274425e-9,
)


def _polevl(x: float, coef) -> float:
    ans = 0.0
    for c in coef:
        ans = ans * x + c
    return ans


def _p1evl(x: float, coef) -> float:
    # leading coefficient is an implied 1
    ans = 1.0
    for c in coef:
        ans = ans * x + c
    return ans


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal distribution function.

    >>> round(normal_quantile(0.975), 6)
    1.959964
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise OutOfDomain(f"probability must lie in (0, 1), got {p}")
    negate = True
    y = p
    if y > 1.0 - _EXP_M2:
        y = 1.0 - y
        negate = False
    if y > _EXP_M2:
        y -= 0.5
        y2 = y * y
        x = y + y * (y2 * _polevl(y2, _P0) / _p1evl(y2, _Q0))
        return x * _S2PI
    x = math.sqrt(-2.0 * math.log(y))
    x0 = x - math.log(x) / x
    z = 1.0 / x
    if x < 8.0:
        x1 = z * _polevl(z, _P1) / _p1evl(z, _Q1)
    else:
        x1 = z * _polevl(z, _P2) / _p1evl(z, _Q2)
    x = x0 - x1
    return -x if negate else x


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))
