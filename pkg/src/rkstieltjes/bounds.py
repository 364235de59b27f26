"""A-priori error bounds attached to the certified pole families.

All bounds are products (constant) * (rate)^steps with the constant built
from a function anchor (f(0+), f(a) or f(2a)), the interval condition
ratio and the seed norm.  They are exact consequences of the pole
construction, so the experiment layer may assert observed <= bound for the
certified strategies at every step.
"""

from __future__ import annotations

import math

from .operators import SpectralInterval
from .poles import gamma_const, rate_rho

__all__ = [
    "laplace_bound",
    "cauchy_bound",
    "kron_laplace_bound",
    "kron_cauchy_bound",
    "sylvester_residual_bound",
    "singular_value_bound",
    "strategy_bound",
]


def _iv(interval) -> SpectralInterval:
    if isinstance(interval, SpectralInterval):
        return interval.require_positive()
    return SpectralInterval(float(interval[0]), float(interval[1])).require_positive()


def laplace_bound(f, interval, ell: int, vnorm: float,
                  conjectured_gamma: bool = False) -> float:
    """8 * gamma_{l,kappa} * f(0+) * ||v|| * rho_{[a,b]}^(l/2).

    Valid for every completely monotonic f with finite f(0+) when the
    symmetric-interval poles of [a,b] are used; infinite when the anchor
    diverges (use a shifted function/operator pair to recover a finite
    constant).
    """
    iv = _iv(interval)
    anchor = f.limit_at_zero()
    if math.isinf(anchor):
        return math.inf
    g = gamma_const(ell, iv.kappa, conjectured=conjectured_gamma)
    return 8.0 * g * anchor * vnorm * rate_rho(iv.lower, iv.upper) ** (0.5 * ell)


def cauchy_bound(f, interval, ell: int, vnorm: float) -> float:
    """8 * f(a) * ||v|| * rho_{[a,4b]}^l for Cauchy-class f with the
    half-line pole family."""
    iv = _iv(interval)
    return 8.0 * f.at(iv.lower) * vnorm * rate_rho(iv.lower, 4.0 * iv.upper) ** ell


def kron_laplace_bound(f, interval, ell: int, fnorm: float,
                       conjectured_gamma: bool = False) -> float:
    """16 * gamma_{l,kappa} * f(0+) * rho_{[a,b]}^(l/2) * ||F||_2."""
    iv = _iv(interval)
    anchor = f.limit_at_zero()
    if math.isinf(anchor):
        return math.inf
    g = gamma_const(ell, iv.kappa, conjectured=conjectured_gamma)
    return 16.0 * g * anchor * fnorm * rate_rho(iv.lower, iv.upper) ** (0.5 * ell)


def kron_cauchy_bound(f, interval, ell: int, fnorm: float) -> float:
    """4 * f(2a) * (1 + kappa) * rho_{[a,2b]}^l * ||F||_2."""
    iv = _iv(interval)
    return (4.0 * f.at(2.0 * iv.lower) * (1.0 + iv.kappa) * fnorm
            * rate_rho(iv.lower, 2.0 * iv.upper) ** ell)


def sylvester_residual_bound(interval, ell: int, fnorm: float) -> float:
    """(1 + kappa) * 4 * rho_{[a,b]}^l * ||F||_2 for the mirrored
    Zolotarev pole pair (Psi, -Psi)."""
    iv = _iv(interval)
    return (1.0 + iv.kappa) * 4.0 * rate_rho(iv.lower, iv.upper) ** ell * fnorm


def singular_value_bound(f, interval, ell: int, fnorm: float,
                         variant: str, block_width: int = 1,
                         conjectured_gamma: bool = False) -> float:
    """Decay bound on sigma_{1 + l*k} of the exact solution X.

    ``variant="cauchy"``: 4 f(2a) rho_{[a,2b]}^l ||F||_2;
    ``variant="laplace"``: 16 gamma_{l,kappa} f(0+) rho_{[a,b]}^(l/2) ||F||_2.
    """
    iv = _iv(interval)
    if variant == "cauchy":
        return 4.0 * f.at(2.0 * iv.lower) * fnorm * rate_rho(
            iv.lower, 2.0 * iv.upper) ** ell
    if variant == "laplace":
        anchor = f.limit_at_zero()
        if math.isinf(anchor):
            return math.inf
        g = gamma_const(ell, iv.kappa, conjectured=conjectured_gamma)
        return 16.0 * g * anchor * fnorm * rate_rho(iv.lower, iv.upper) ** (0.5 * ell)
    raise ValueError(f"unknown singular-value bound variant {variant!r}")


def strategy_bound(strategy: str, f, interval, ell: int, vnorm: float,
                   conjectured_gamma: bool = False) -> float:
    """Bound column for a 1-D trace; nan when no certificate covers the
    strategy (extended/polynomial/custom), and the matching certified
    value as a reference curve for the EDS variants."""
    if strategy in ("zolotarev", "eds-laplace"):
        return laplace_bound(f, interval, ell, vnorm,
                             conjectured_gamma=conjectured_gamma)
    if strategy in ("cauchy", "eds-cauchy"):
        if not f.is_cauchy:
            return math.nan
        return cauchy_bound(f, interval, ell, vnorm)
    return math.nan
