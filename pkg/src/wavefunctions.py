#!/usr/bin/env python3
"""
Normalized Radial Eigenfunctions of the Pekeris-Morse Problem

    R_n(y) = N_n y^(kappa/2 - (n + 1/2)) exp(-y/2) L_n^(kappa - 2n - 1)(y)
    y      = (2 eta / alpha) exp(-alpha r)

Magnitudes are assembled in log space; for H2 kappa is already ~35, enough
to overflow y^(kappa/2) and Gamma(kappa - n) in heavier molecules.

Normalization: dy = -alpha y dr and dR = R0 dr, so the constant N_n makes
R0 * integral(|R|^2 / (alpha y) dy) = integral(|R|^2 dR) = 1 for any R0 > 0.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from logging_config import get_logger
from pekeris_core import DomainError
from spectrum import BoundState, MoleculeParams, SpectralParams

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

GAUSS_NODES = 512
QUADRATURE_RTOL = 1e-10
MAX_PANEL_DOUBLINGS = 12
TAIL_LOG_DROP = 40.0  # integrand below exp(-40) of its peak is dropped
MIN_LOG_Y = -700.0

_leggauss_cache = {}


def _leggauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    if order not in _leggauss_cache:
        _leggauss_cache[order] = np.polynomial.legendre.leggauss(order)
    return _leggauss_cache[order]


def _scalar_or_array(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def laguerre(n: int, a: float, y: ArrayLike) -> ArrayLike:
    """
    Generalized Laguerre polynomial L_n^a(y) by the three-term recurrence

        k L_k = (2k - 1 + a - y) L_{k-1} - (k - 1 + a) L_{k-2}
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"Laguerre degree must be a non-negative integer, got {n!r}")
    if not a > -1:
        raise DomainError(f"Laguerre parameter must exceed -1, got {a!r}")

    y_arr = np.asarray(y, dtype=float)
    prev = np.ones_like(y_arr)
    if n == 0:
        return _scalar_or_array(prev)
    curr = 1.0 + a - y_arr
    for k in range(2, int(n) + 1):
        prev, curr = curr, ((2 * k - 1 + a - y_arr) * curr - (k - 1 + a) * prev) / k
    return _scalar_or_array(curr)


def ln_gamma(x: ArrayLike) -> ArrayLike:
    """Natural log of Gamma(x) for x > 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("ln_gamma needs x > 0")
    return _scalar_or_array(gammaln(x_arr))


def ln_factorial(n: int) -> float:
    return ln_gamma(n + 1.0)


def log_normalization_constant(kappa: float, n: int, alpha: float, r0: float) -> float:
    """ln N_n with N_n = [alpha n! (kappa - 2n - 1) / (R0 Gamma(kappa - n))]^(1/2)."""
    order = kappa - 2 * n - 1
    if not order > 0:
        raise DomainError(f"kappa - 2n - 1 must be positive, got {order!r}")
    if not (alpha > 0 and r0 > 0):
        raise DomainError("alpha and r0 must be positive")
    log_sq = (math.log(alpha) + ln_factorial(n) + math.log(order)
              - math.log(r0) - ln_gamma(kappa - n))
    return 0.5 * log_sq


def normalization_constant(kappa: float, n: int, alpha: float, r0: float) -> float:
    """N_n in 1/sqrt(length); underflows to 0.0 once kappa reaches several hundred."""
    return math.exp(log_normalization_constant(kappa, n, alpha, r0))


def y_of_r(params: SpectralParams, alpha: float, r: ArrayLike) -> ArrayLike:
    r_arr = np.asarray(r, dtype=float)
    return _scalar_or_array(2.0 * params.eta / alpha * np.exp(-alpha * r_arr))


def r_of_y(params: SpectralParams, alpha: float, y: ArrayLike) -> ArrayLike:
    y_arr = np.asarray(y, dtype=float)
    if np.any(~(y_arr > 0)):
        raise DomainError("y must be positive to map back to r")
    return _scalar_or_array(np.log(2.0 * params.eta / (alpha * y_arr)) / alpha)


@dataclass(frozen=True)
class RadialEigenfunction:
    state: BoundState
    kappa: float
    log_norm_constant: float
    y_scale: float
    alpha: float
    r0: float

    def __post_init__(self):
        if not math.isfinite(self.log_norm_constant):
            raise DomainError("normalization constant must be positive and finite")
        if not self.exponent > 0:
            raise DomainError("power-law exponent kappa/2 - (n + 1/2) must be positive")

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def norm_constant(self) -> float:
        return math.exp(self.log_norm_constant)

    @property
    def exponent(self) -> float:
        return 0.5 * self.kappa - (self.state.n + 0.5)

    @property
    def laguerre_order(self) -> float:
        return self.kappa - 2 * self.state.n - 1

    @property
    def beta(self) -> float:
        return self.exponent


def radial_eigenfunction(mol: MoleculeParams, state: BoundState) -> RadialEigenfunction:
    kappa = state.params.kappa
    return RadialEigenfunction(
        state=state,
        kappa=kappa,
        log_norm_constant=log_normalization_constant(kappa, state.n, mol.alpha, mol.r0),
        y_scale=state.params.y_scale,
        alpha=mol.alpha,
        r0=mol.r0,
    )


def radial_wavefunction_y(eig: RadialEigenfunction, y: ArrayLike) -> ArrayLike:
    """R(y); y = 0 (r -> infinity) gives 0."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y_arr < 0):
        raise DomainError("y must be non-negative")
    out = np.zeros_like(y_arr)
    mask = y_arr > 0
    if np.any(mask):
        ym = y_arr[mask]
        poly = laguerre(eig.n, eig.laguerre_order, ym)
        poly = np.atleast_1d(np.asarray(poly, dtype=float))
        with np.errstate(divide="ignore"):
            log_mag = (eig.log_norm_constant + eig.exponent * np.log(ym)
                       - 0.5 * ym + np.log(np.abs(poly)))
        out[mask] = np.sign(poly) * np.exp(log_mag)
    return float(out[0]) if np.ndim(y) == 0 else out


def radial_wavefunction(eig: RadialEigenfunction, r: ArrayLike) -> ArrayLike:
    r_arr = np.asarray(r, dtype=float)
    y = eig.y_scale * np.exp(-eig.alpha * r_arr)
    return radial_wavefunction_y(eig, y)


def sample_wavefunction(eig: RadialEigenfunction, r_min: float, r_max: float,
                        samples: int) -> List[Tuple[float, float, float]]:
    """(r, y, R) rows on a uniform r grid."""
    if int(samples) != samples or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    if not r_min <= r_max:
        raise DomainError("r_min must not exceed r_max")
    r_values = np.linspace(r_min, r_max, int(samples))
    y_values = eig.y_scale * np.exp(-eig.alpha * r_values)
    R_values = radial_wavefunction_y(eig, y_values)
    return [(float(r), float(y), float(R)) for r, y, R in zip(r_values, y_values, R_values)]


def _envelope_limit(power: float, step: float) -> float:
    """
    Walk t = ln y away from the peak of y^power exp(-y) until the log-envelope
    has dropped by TAIL_LOG_DROP. step < 0 walks toward y -> 0.
    """
    t_peak = math.log(max(power, 1e-300))
    peak = power * t_peak - math.exp(t_peak)
    t = t_peak
    while power * t - math.exp(t) > peak - TAIL_LOG_DROP:
        t += step
        if t <= MIN_LOG_Y:
            return MIN_LOG_Y
    return t


def _log_y_limits(eig_a: RadialEigenfunction, eig_b: RadialEigenfunction) -> Tuple[float, float]:
    """Range of t = ln y outside which R_a R_b is negligible."""
    # near y = 0 the Laguerre factors are constant; far out they add degree n_a + n_b
    small_y_power = eig_a.exponent + eig_b.exponent
    large_y_power = small_y_power + eig_a.n + eig_b.n
    return _envelope_limit(small_y_power, -0.25), _envelope_limit(large_y_power, 0.05)


def _panel_quadrature(func, t_lo: float, t_hi: float, panels: int, order: int) -> float:
    nodes, weights = _leggauss(order)
    edges = np.linspace(t_lo, t_hi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        t = 0.5 * (a + b) + half * nodes
        total += half * float(np.dot(weights, func(t)))
    return total


def overlap_integral(eig_a: RadialEigenfunction, eig_b: Optional[RadialEigenfunction] = None,
                     order: int = GAUSS_NODES, rtol: float = QUADRATURE_RTOL) -> float:
    """
    R0 * integral R_a R_b / (alpha y) dy over y in (0, inf).

    Integrated in t = ln y (log-spaced panels in y), where the weight
    becomes 1/alpha. Panels double until successive results agree to rtol.
    """
    if eig_b is None:
        eig_b = eig_a
    if not math.isclose(eig_a.y_scale, eig_b.y_scale, rel_tol=1e-14) or eig_a.alpha != eig_b.alpha:
        raise DomainError("overlap needs eigenfunctions of the same (molecule, l, N)")

    def integrand(t):
        y = np.exp(t)
        return radial_wavefunction_y(eig_a, y) * radial_wavefunction_y(eig_b, y) / eig_a.alpha

    t_lo, t_hi = _log_y_limits(eig_a, eig_b)
    panels = 1
    previous = _panel_quadrature(integrand, t_lo, t_hi, panels, order)
    for _ in range(MAX_PANEL_DOUBLINGS):
        panels *= 2
        current = _panel_quadrature(integrand, t_lo, t_hi, panels, order)
        if abs(current - previous) < rtol * max(abs(current), 1.0):
            logger.debug("overlap converged with %d panels: %.15g", panels, current)
            return eig_a.r0 * current
        previous = current
    logger.warning("overlap quadrature did not converge after %d panels", panels)
    return eig_a.r0 * previous


def normalization_integral(eig: RadialEigenfunction, order: int = GAUSS_NODES,
                           rtol: float = QUADRATURE_RTOL) -> float:
    return overlap_integral(eig, eig, order=order, rtol=rtol)


def count_nodes(eig: RadialEigenfunction, r_min: float = -0.99, r_max: float = 20.0,
                samples: int = 10000) -> int:
    """Sign changes of R on a uniform r grid (exact zeros are skipped)."""
    _, _, values = zip(*sample_wavefunction(eig, r_min, r_max, samples))
    signs = np.sign(np.asarray(values))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def ode_residual(eig: RadialEigenfunction, y_lo: float = 0.1, y_hi: Optional[float] = None,
                 samples: int = 2000, rel_step: float = 2e-3) -> float:
    """
    Scaled residual of y^2 R'' + y R' - y^2/4 R + (kappa/2) y R - beta^2 R = 0.

    Derivatives use five-point central differences with step rel_step * y.
    The result is max|residual| / (max|R| * max coefficient) on [y_lo, y_hi].
    """
    if y_hi is None:
        y_hi = 2.0 * eig.kappa
    if not 0 < y_lo < y_hi:
        raise DomainError("need 0 < y_lo < y_hi")

    y = np.linspace(y_lo, y_hi, int(samples))
    h = rel_step * y
    f = lambda s: radial_wavefunction_y(eig, s)
    f_m2, f_m1, f_0, f_p1, f_p2 = f(y - 2 * h), f(y - h), f(y), f(y + h), f(y + 2 * h)
    d1 = (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h)
    d2 = (-f_m2 + 16.0 * f_m1 - 30.0 * f_0 + 16.0 * f_p1 - f_p2) / (12.0 * h * h)

    beta_sq = eig.beta ** 2
    residual = (y * y * d2 + y * d1 - 0.25 * y * y * f_0
                + 0.5 * eig.kappa * y * f_0 - beta_sq * f_0)
    max_coefficient = max(y_hi * y_hi, 0.5 * eig.kappa * y_hi, beta_sq)
    scale = float(np.max(np.abs(f_0))) * max_coefficient
    return float(np.max(np.abs(residual))) / scale


if __name__ == "__main__":
    from spectrum import bound_state

    h2 = MoleculeParams("H2", 4.7446, 1.4405, 7.5416e-3, 0.7416)
    for n in range(3):
        eig = radial_eigenfunction(h2, bound_state(h2, n, 0))
        print(f"n={n}: N_n={eig.norm_constant:.6e} norm={normalization_integral(eig):.12f} "
              f"nodes={count_nodes(eig)} residual={ode_residual(eig):.2e}")
