"""Gaussian forecasts and their exact two-way link to ternary values.

When forecast and climatology are both normal, the forecast is fully
described by its mean and standard deviation scaled against the
climatology's: mu_hat = (mu - mu_c)/sigma_c, sigma_hat = sigma/sigma_c.
The induced ternary forecast is

    pB       = Phi((zB - mu_hat)/sigma_hat)
    pB + pN  = Phi((zA - mu_hat)/sigma_hat)

with zB, zA the standard-normal quantiles of the climatology's category
probabilities.  On the open interior of the simplex this map inverts in
closed form, recovering (mu_hat, sigma_hat) from any ternary forecast.
"""

import math
from dataclasses import dataclass

from .errors import (
    DegenerateClimatology,
    NonPositiveSigma,
    NotInvertible,
    QuantileOutOfRange,
)
from .simplex import TernaryProb, make_ternary

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianScaled:
    """Forecast mean and standard deviation scaled by the climatology."""

    mu_hat: float
    sigma_hat: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_hat) and math.isfinite(self.sigma_hat)):
            raise NonPositiveSigma("scaled parameters must be finite")
        if self.sigma_hat <= 0.0:
            raise NonPositiveSigma(f"sigma_hat = {self.sigma_hat} <= 0")


def scale_params(mu: float, sigma: float, mu_c: float, sigma_c: float) -> GaussianScaled:
    """Normalise (mu, sigma) against the climatology (mu_c, sigma_c)."""
    if sigma <= 0.0:
        raise NonPositiveSigma(f"sigma = {sigma} <= 0")
    if sigma_c <= 0.0:
        raise NonPositiveSigma(f"sigma_c = {sigma_c} <= 0")
    return GaussianScaled((mu - mu_c) / sigma_c, sigma / sigma_c)


def std_normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-z / _SQRT2)


def _std_normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


# Acklam's rational approximation to the normal quantile: relative error
# below 1.2e-9 everywhere, then polished by one Newton step against the
# erfc-based CDF, which brings it to a few ulp.
_ACKLAM_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_ACKLAM_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00,
)
_ACKLAM_SPLIT = 0.02425


def _acklam(u: float) -> float:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if u < _ACKLAM_SPLIT:
        t = math.sqrt(-2.0 * math.log(u))
        return (
            ((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]
        ) / ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0)
    if u > 1.0 - _ACKLAM_SPLIT:
        t = math.sqrt(-2.0 * math.log(1.0 - u))
        return -(
            ((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]
        ) / ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0)
    s = u - 0.5
    r = s * s
    return (
        ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
    ) * s / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def std_normal_quantile(u: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    if not 0.0 < u < 1.0:
        raise QuantileOutOfRange(f"quantile argument {u} outside (0, 1)")
    z = _acklam(u)
    pdf = _std_normal_pdf(z)
    if pdf > 0.0:
        z -= (std_normal_cdf(z) - u) / pdf
    return z


def gaussian_to_ternary(g: GaussianScaled, q: TernaryProb) -> TernaryProb:
    """Project a scaled Gaussian forecast onto the climatology's categories.

    Tail categories are evaluated through the survival function, so
    probabilities stay relatively accurate (instead of rounding to 0)
    even when the forecast is many standard deviations from a
    threshold.
    """
    if q.pB <= 0.0 or q.pB + q.pN >= 1.0:
        raise DegenerateClimatology(
            f"climatology ({q.pB}, {q.pN}, {q.pA}) leaves no interior thresholds"
        )
    zB = std_normal_quantile(q.pB)
    zA = std_normal_quantile(q.pB + q.pN)
    aB = (zB - g.mu_hat) / g.sigma_hat
    aA = (zA - g.mu_hat) / g.sigma_hat
    pB = std_normal_cdf(aB)
    pA = std_normal_cdf(-aA)
    if aA <= 0.0:
        pN = max(0.0, std_normal_cdf(aA) - pB)
    elif aB >= 0.0:
        pN = max(0.0, std_normal_cdf(-aB) - pA)
    else:
        pN = max(0.0, 1.0 - pB - pA)
    return make_ternary(pB, pN, pA)


def ternary_to_gaussian(p: TernaryProb, q: TernaryProb) -> GaussianScaled:
    """Recover the scaled Gaussian parameters behind a ternary forecast.

    Defined for strictly interior forecasts: pB and pB+pN in (0, 1) and
    pN > 0.  With wB, wA, zB, zA the standard-normal quantiles of the
    forecast and climatology cumulative probabilities,

        sigma_hat = (zA - zB) / (wA - wB)
        mu_hat    = zB - sigma_hat * wB
    """
    if q.pB <= 0.0 or q.pB + q.pN >= 1.0:
        raise DegenerateClimatology(
            f"climatology ({q.pB}, {q.pN}, {q.pA}) leaves no interior thresholds"
        )
    # quantiles are taken on whichever of the cumulative probability and
    # its complement is smaller, so near-one values (stored to full
    # relative precision in the other two components) invert cleanly
    wB = _split_quantile(p.pB, p.pN + p.pA, "pB")
    wA = _split_quantile(p.pB + p.pN, p.pA, "pB + pN")
    if not wA > wB:
        raise NotInvertible("pN = 0: forecast carries no central mass")
    zB = std_normal_quantile(q.pB)
    zA = std_normal_quantile(q.pB + q.pN)
    sigma_hat = (zA - zB) / (wA - wB)
    mu_hat = zB - sigma_hat * wB
    return GaussianScaled(mu_hat, sigma_hat)


def _split_quantile(c: float, complement: float, name: str) -> float:
    if c <= 0.0:
        raise NotInvertible(f"{name} = 0 is on the boundary")
    if complement <= 0.0:
        raise NotInvertible(f"{name} = 1 is on the boundary")
    if c <= 0.5:
        return std_normal_quantile(c)
    return -std_normal_quantile(complement)
