#!/usr/bin/env python3
"""
Pekeris Expansion of the Centrifugal Term
Replaces 1/(1+r)^2 by C0 + C1 exp(-alpha r) + C2 exp(-2 alpha r) and measures
how far that replacement drifts from the exact term.

All lengths are the relative displacement r = (R - R0) / R0, so every
quantity in this module is dimensionless.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from logging_config import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

PEKERIS_APPROX = "pekeris_approx"
EXACT_CENTRIFUGAL = "exact_centrifugal"
VARIANTS = (PEKERIS_APPROX, EXACT_CENTRIFUGAL)


class DomainError(ValueError):
    """An input lies outside the domain where the formulas apply."""


def _require_positive_finite(name: str, value: float) -> float:
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PekerisCoefficients:
    c0: float
    c1: float
    c2: float
    alpha: float

    def __post_init__(self):
        _require_positive_finite("alpha", self.alpha)
        for name in ("c0", "c1", "c2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.c0, self.c1, self.c2)


@dataclass(frozen=True)
class DiscrepancyProfile:
    """Exact and approximated centrifugal term sampled on a uniform r grid."""

    alpha: float
    r_values: Tuple[float, ...]
    exact: Tuple[float, ...]
    approx: Tuple[float, ...]
    relative_error: Tuple[float, ...]

    def rows(self):
        return list(zip(self.r_values, self.exact, self.approx, self.relative_error))

    def max_relative_error(self) -> float:
        return max(self.relative_error)


def pekeris_coefficients(alpha: float) -> PekerisCoefficients:
    """C0, C1, C2 matching the Taylor series of 1/(1+r)^2 through order r^2."""
    alpha = _require_positive_finite("alpha", alpha)
    inv = 1.0 / alpha
    inv2 = inv * inv
    return PekerisCoefficients(
        c0=1.0 - 3.0 * inv + 3.0 * inv2,
        c1=4.0 * inv - 6.0 * inv2,
        c2=-inv + 3.0 * inv2,
        alpha=alpha,
    )


def centrifugal_exact(r: ArrayLike) -> ArrayLike:
    """1/(1+r)^2, defined for r > -1 only."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r_arr)) or np.any(r_arr <= -1.0):
        raise DomainError("centrifugal term needs r > -1 (physical separation R > 0)")
    value = 1.0 / (1.0 + r_arr) ** 2
    return float(value) if value.ndim == 0 else value


def centrifugal_pekeris(coeffs: PekerisCoefficients, r: ArrayLike) -> ArrayLike:
    r_arr = np.asarray(r, dtype=float)
    decay = np.exp(-coeffs.alpha * r_arr)
    value = coeffs.c0 + coeffs.c1 * decay + coeffs.c2 * decay * decay
    return float(value) if value.ndim == 0 else value


def centrifugal_taylor(r: ArrayLike, order: int = 3) -> ArrayLike:
    """Truncated series 1 - 2r + 3r^2 - 4r^3 + ... up to and including r**order."""
    if order < 0:
        raise DomainError("order must be non-negative")
    r_arr = np.asarray(r, dtype=float)
    value = np.zeros_like(r_arr)
    for k in range(order + 1):
        value = value + (-1) ** k * (k + 1) * r_arr ** k
    return float(value) if value.ndim == 0 else value


def discrepancy_profile(alpha: float, r_min: float, r_max: float, samples: int) -> DiscrepancyProfile:
    """
    Sample exact vs. Pekeris centrifugal term on a uniform grid.

    Args:
        alpha: Morse range parameter used to build the coefficients.
        r_min, r_max: grid limits, -1 < r_min < r_max.
        samples: number of grid points (at least 2).

    Returns:
        DiscrepancyProfile with |approx - exact| / |exact| per point.
    """
    coeffs = pekeris_coefficients(alpha)
    if not (math.isfinite(r_min) and math.isfinite(r_max)):
        raise DomainError("r range must be finite")
    if r_min <= -1.0:
        raise DomainError(f"r_min must be greater than -1, got {r_min}")
    if r_min >= r_max:
        raise DomainError(f"r_min ({r_min}) must be smaller than r_max ({r_max})")
    if int(samples) != samples or samples < 2:
        raise DomainError(f"samples must be an integer >= 2, got {samples!r}")

    r_values = np.linspace(r_min, r_max, int(samples))
    exact = centrifugal_exact(r_values)
    approx = centrifugal_pekeris(coeffs, r_values)
    relative_error = np.abs(approx - exact) / np.abs(exact)

    logger.debug("discrepancy profile alpha=%g on [%g, %g]: max rel err %.3e",
                 alpha, r_min, r_max, float(relative_error.max()))

    return DiscrepancyProfile(
        alpha=coeffs.alpha,
        r_values=tuple(float(v) for v in r_values),
        exact=tuple(float(v) for v in exact),
        approx=tuple(float(v) for v in approx),
        relative_error=tuple(float(v) for v in relative_error),
    )


def morse_potential(well_depth: float, alpha: float, r: ArrayLike) -> ArrayLike:
    """Morse well d*(exp(-2 alpha r) - 2 exp(-alpha r)) in units of the energy scale."""
    r_arr = np.asarray(r, dtype=float)
    decay = np.exp(-alpha * r_arr)
    value = well_depth * (decay * decay - 2.0 * decay)
    return float(value) if value.ndim == 0 else value


def effective_potential(well_depth: float, alpha: float, barrier: float,
                        variant: str = PEKERIS_APPROX) -> Callable[[np.ndarray], np.ndarray]:
    """
    Build the dimensionless radial potential Morse + barrier * centrifugal.

    `barrier` is lambda^2 - 1/4 (l(l+1) in three dimensions). The exact variant
    keeps barrier/(1+r)^2 and therefore only makes sense for r > -1.
    """
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}; expected one of {VARIANTS}")

    if variant == PEKERIS_APPROX:
        coeffs = pekeris_coefficients(alpha)

        def potential(r):
            return morse_potential(well_depth, alpha, r) + barrier * centrifugal_pekeris(coeffs, r)
    else:
        def potential(r):
            r_arr = np.asarray(r, dtype=float)
            return morse_potential(well_depth, alpha, r_arr) + barrier / (1.0 + r_arr) ** 2

    return potential


if __name__ == "__main__":
    for alpha in (1.0, 1.4405, 2.0, 5.0):
        c = pekeris_coefficients(alpha)
        profile = discrepancy_profile(alpha, 0.0, 0.3, 31)
        print(f"alpha={alpha:<7} C=({c.c0:.6f}, {c.c1:.6f}, {c.c2:.6f}) "
              f"max rel err on [0, 0.3] = {profile.max_relative_error():.4e}")
