#!/usr/bin/env python3
"""
Closed-Form Morse Spectrum in N Dimensions
Bound-state energies of the radial Schrodinger equation with the Morse
potential, with the centrifugal barrier in Pekeris form.

Internal algebra is dimensionless (energies divided by the scale
eps = hbar^2 / (2 m R0^2)); public energies are in eV.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from logging_config import get_logger
from pekeris_core import DomainError, PekerisCoefficients, pekeris_coefficients

logger = get_logger(__name__)


class NoBoundSpectrumError(DomainError):
    """eta^2 or zeta^2 is not positive: the Pekeris form has no bound levels here."""


class BoundStateError(DomainError):
    """The requested vibrational number has no normalizable state."""


@dataclass(frozen=True)
class MoleculeParams:
    name: str
    well_depth_D: float       # eV
    alpha: float              # dimensionless
    energy_scale_eps: float   # eV, hbar^2 / (2 m R0^2)
    r0: float                 # Angstrom
    provenance: str = ""

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise DomainError("name must be a non-empty string")
        for attr in ("well_depth_D", "alpha", "energy_scale_eps", "r0"):
            value = getattr(self, attr)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DomainError(f"{attr} must be a number")
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{attr} must be positive")

    @property
    def reduced_depth(self) -> float:
        """d = D / eps."""
        return self.well_depth_D / self.energy_scale_eps

    @property
    def coefficients(self) -> PekerisCoefficients:
        return pekeris_coefficients(self.alpha)


@dataclass(frozen=True)
class SpectralParams:
    lambda_: float
    eta_sq: float
    zeta_sq: float
    kappa: float
    dimension_N: int
    ell: int
    alpha: float
    barrier: float            # lambda^2 - 1/4
    coeffs: PekerisCoefficients = field(repr=False)

    @property
    def eta(self) -> float:
        # positive root: y = (2 eta / alpha) exp(-alpha r) must stay positive
        return math.sqrt(self.eta_sq)

    @property
    def y_scale(self) -> float:
        return 2.0 * self.eta / self.alpha


@dataclass(frozen=True)
class BoundState:
    n: int
    ell: int
    dimension_N: int
    energy: float             # eV
    params: SpectralParams
    energy_scale_eps: float

    def __post_init__(self):
        if self.params.kappa - 2 * self.n - 1 <= 0:
            raise BoundStateError(f"state n={self.n} is not normalizable (kappa={self.params.kappa:.6g})")
        ceiling = self.energy_scale_eps * self.params.barrier * self.params.coeffs.c0
        if not self.energy < ceiling:
            raise BoundStateError(f"energy {self.energy} not below rotational ceiling {ceiling}")

    @property
    def lambda_(self) -> float:
        return self.params.lambda_

    @property
    def kappa(self) -> float:
        return self.params.kappa

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "ell": self.ell,
            "N": self.dimension_N,
            "lambda": self.params.lambda_,
            "kappa": self.params.kappa,
            "energy_eV": self.energy,
        }


def _check_quantum_numbers(ell: int, dimension_N: int) -> None:
    if isinstance(ell, bool) or int(ell) != ell or ell < 0:
        raise DomainError(f"ell must be a non-negative integer, got {ell!r}")
    if isinstance(dimension_N, bool) or int(dimension_N) != dimension_N or dimension_N < 2:
        raise DomainError(f"dimension N must be an integer >= 2, got {dimension_N!r}")


def _check_vibrational(n: int) -> None:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")


def lambda_index(ell: int, dimension_N: int) -> float:
    """lambda = l - 1 + N/2."""
    _check_quantum_numbers(ell, dimension_N)
    return ell - 1 + dimension_N / 2.0


def centrifugal_barrier(ell: int, dimension_N: int) -> float:
    """lambda^2 - 1/4, evaluated as (lambda - 1/2)(lambda + 1/2) so N=3 gives l(l+1) exactly."""
    lam = lambda_index(ell, dimension_N)
    return (lam - 0.5) * (lam + 0.5)


def _params_from_barrier(mol: MoleculeParams, barrier: float, lam: float,
                         ell: int, dimension_N: int) -> SpectralParams:
    coeffs = mol.coefficients
    d = mol.reduced_depth
    eta_sq = d + barrier * coeffs.c2
    zeta_sq = 2.0 * d - barrier * coeffs.c1
    if eta_sq <= 0 or zeta_sq <= 0:
        raise NoBoundSpectrumError(
            f"no Pekeris bound spectrum for this (l, N) = ({ell}, {dimension_N}) of {mol.name}: "
            f"eta^2={eta_sq:.6g}, zeta^2={zeta_sq:.6g}")
    kappa = zeta_sq / (math.sqrt(eta_sq) * mol.alpha)
    return SpectralParams(
        lambda_=lam,
        eta_sq=eta_sq,
        zeta_sq=zeta_sq,
        kappa=kappa,
        dimension_N=int(dimension_N),
        ell=int(ell),
        alpha=mol.alpha,
        barrier=barrier,
        coeffs=coeffs,
    )


def spectral_params(mol: MoleculeParams, ell: int, dimension_N: int = 3) -> SpectralParams:
    """
    eta^2, zeta^2 and kappa for rotational number l in N dimensions.

    With d = D/eps and L = lambda^2 - 1/4:
        eta^2  = d + L*C2
        zeta^2 = 2d - L*C1
        kappa  = zeta^2 / (eta * alpha)

    zeta^2 carries the full e^(-alpha r) coefficient 2d - L*C1. The often
    quoted 2d - (L/2)*C1 differs by a factor 2 on the C1 term, does not solve
    the y-form equation for l > 0, and agrees with this one only at l = 0.
    """
    lam = lambda_index(ell, dimension_N)
    return _params_from_barrier(mol, centrifugal_barrier(ell, dimension_N), lam, ell, dimension_N)


def level_energy(mol: MoleculeParams, params: SpectralParams, n: int) -> float:
    """eps * [L*C0 - alpha^2 (n + 1/2 - kappa/2)^2] without the normalizability check."""
    shift = n + 0.5 - 0.5 * params.kappa
    reduced = params.barrier * params.coeffs.c0 - mol.alpha ** 2 * shift * shift
    return mol.energy_scale_eps * reduced


def energy(mol: MoleculeParams, n: int, ell: int, dimension_N: int = 3) -> float:
    """Closed-form bound-state energy in eV."""
    _check_vibrational(n)
    params = spectral_params(mol, ell, dimension_N)
    if params.kappa - 2 * n - 1 <= 0:
        raise BoundStateError(
            f"n={n} exceeds bound-state count {bound_state_count_from_kappa(params.kappa)} "
            f"for (l, N) = ({ell}, {dimension_N}) of {mol.name}")
    return level_energy(mol, params, n)


def energy_three_dimensional(mol: MoleculeParams, n: int, ell: int) -> float:
    """Three-dimensional spectrum written directly with l(l+1), bypassing lambda."""
    _check_vibrational(n)
    _check_quantum_numbers(ell, 3)
    c = mol.coefficients
    d = mol.reduced_depth
    rot = ell * (ell + 1)
    eta = math.sqrt(d + rot * c.c2)
    zeta_sq = 2.0 * d - rot * c.c1
    return mol.energy_scale_eps * (rot * c.c0 - mol.alpha ** 2 * (n + 0.5 - zeta_sq / (2.0 * eta * mol.alpha)) ** 2)


def chen_energy(mol: MoleculeParams, n: int) -> float:
    """Pure vibrational (l = 0) Morse level, -eps * (sqrt(d) - alpha (n + 1/2))^2."""
    _check_vibrational(n)
    return -mol.energy_scale_eps * (math.sqrt(mol.reduced_depth) - mol.alpha * (n + 0.5)) ** 2


def bound_state_count_from_kappa(kappa: float) -> int:
    """Number of n >= 0 with kappa - 2n - 1 > 0."""
    if kappa <= 1.0:
        return 0
    return int(math.ceil((kappa - 1.0) / 2.0))


def bound_state_count(mol: MoleculeParams, ell: int, dimension_N: int = 3) -> int:
    return bound_state_count_from_kappa(spectral_params(mol, ell, dimension_N).kappa)


def bound_state(mol: MoleculeParams, n: int, ell: int, dimension_N: int = 3) -> BoundState:
    e = energy(mol, n, ell, dimension_N)
    return BoundState(
        n=int(n),
        ell=int(ell),
        dimension_N=int(dimension_N),
        energy=e,
        params=spectral_params(mol, ell, dimension_N),
        energy_scale_eps=mol.energy_scale_eps,
    )


def beta_from_energy(mol: MoleculeParams, params: SpectralParams, energy_eV: float) -> float:
    """
    Recover beta = beta_1 / alpha from an energy.

    beta_1^2 = -E/eps + (lambda^2 - 1/4) C0, beta > 0.
    """
    beta1_sq = -energy_eV / mol.energy_scale_eps + params.barrier * params.coeffs.c0
    if beta1_sq < 0:
        raise BoundStateError(f"energy {energy_eV} eV lies above the rotational ceiling")
    return math.sqrt(beta1_sq) / mol.alpha


def spectrum_table(mol: MoleculeParams, n_max: int, ell_max: int, dimension_N: int = 3,
                   diagnostics: Optional[List[Dict[str, Any]]] = None) -> List[BoundState]:
    """
    All bound states with n <= n_max and l <= ell_max, ordered by (l, n).

    Cells without a bound state are skipped. Pass a list as `diagnostics` to
    receive one {"n", "ell", "error"} entry per skipped cell.
    """
    if n_max < 0 or ell_max < 0:
        raise DomainError("n_max and ell_max must be non-negative")

    states: List[BoundState] = []
    for ell in range(int(ell_max) + 1):
        for n in range(int(n_max) + 1):
            try:
                states.append(bound_state(mol, n, ell, dimension_N))
            except DomainError as e:
                logger.debug("skipping n=%d l=%d N=%d: %s", n, ell, dimension_N, e)
                if diagnostics is not None:
                    diagnostics.append({"n": n, "ell": ell, "error": str(e)})
    return states


def rotational_band(mol: MoleculeParams, n: int, ell_max: int, dimension_N: int = 3) -> List[BoundState]:
    """E(l) at fixed n for l = 0..ell_max; stops at the first l without a bound state."""
    band: List[BoundState] = []
    for ell in range(int(ell_max) + 1):
        try:
            band.append(bound_state(mol, n, ell, dimension_N))
        except DomainError:
            break
    return band


if __name__ == "__main__":
    h2 = MoleculeParams("H2", 4.7446, 1.4405, 7.5416e-3, 0.7416)
    print(f"H2 levels: {bound_state_count(h2, 0)} bound states at l=0")
    for state in spectrum_table(h2, 3, 2):
        print(f"  n={state.n} l={state.ell} kappa={state.kappa:.4f} E={state.energy:.6f} eV")
