#!/usr/bin/env python3
"""
Numerov Shooting Oracle
Independent eigensolver for u'' = Q(r) u with Q = V_eff(r) - e, used to check
the closed-form Pekeris spectrum and to measure how far the Pekeris form
drifts from the exact 1/(1+r)^2 barrier.

The search works in two stages:
  1. node-count bisection (Sturm count of the outward solution) isolates
     the n-th eigenvalue;
  2. brentq polishes it on the normalized Casoratian of the outward and
     inward solutions at the outer classical turning point.
The grid is doubled until the eigenvalue moves by less than tol/10.
"""

import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import brentq

from logging_config import get_logger
from pekeris_core import (EXACT_CENTRIFUGAL, PEKERIS_APPROX, DomainError,
                          effective_potential)
from spectrum import MoleculeParams, bound_state_count, centrifugal_barrier, energy, lambda_index

logger = get_logger(__name__)

MODEL_PROBLEM = "model"
PROBLEM_TAGS = (PEKERIS_APPROX, EXACT_CENTRIFUGAL, MODEL_PROBLEM)

DEFAULT_GRID_POINTS = 20000
MIN_GRID_POINTS = 1000
MAX_GRID_DOUBLINGS = 4
POLE_OFFSET = 1e-6
POLE_STEP_LOAD = 0.01     # h^2 barrier / (12 (1+r)^2) at the first grid point
INNER_DECAY_NATS = 70.0   # |u| < 1e-30 at r_min
OUTER_DECAY_NATS = 40.0
RESCALE_LIMIT = 1e100
MAX_WINDOW_EXPANSIONS = 40
MAX_BISECTIONS = 200

FORWARD = "forward"
BACKWARD = "backward"


class OracleError(RuntimeError):
    """The shooting solver could not produce a trustworthy eigenvalue."""


class EigenvalueNotBracketedError(OracleError):
    pass


class GridTooCoarseError(OracleError):
    pass


@dataclass(frozen=True)
class RadialProblem:
    """
    u'' = (V_eff(r) - E / energy_scale) u on [r_min, r_max].

    energy_scale converts the dimensionless eigenvalue to reported units
    (eV per unit for molecules). `barrier` (lambda^2 - 1/4) seeds the outward
    solution as (1+r)^(lambda+1/2) when the grid starts at the pole, or when
    power_law_seed is set because r_min was pulled back from it.
    """

    effective_potential: Callable[[np.ndarray], np.ndarray]
    r_min: float
    r_max: float
    grid_points: int
    variant: str
    energy_scale: float = 1.0
    barrier: float = 0.0
    label: str = ""
    power_law_seed: bool = False

    def __post_init__(self):
        if self.variant not in PROBLEM_TAGS:
            raise DomainError(f"unknown problem variant {self.variant!r}")
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)) or self.r_min >= self.r_max:
            raise DomainError(f"invalid radial domain [{self.r_min}, {self.r_max}]")
        if self.variant == EXACT_CENTRIFUGAL and self.r_min <= -1.0:
            raise DomainError("exact centrifugal problem needs r_min > -1")
        if self.grid_points < MIN_GRID_POINTS:
            raise DomainError(f"grid_points must be at least {MIN_GRID_POINTS}")
        if not self.energy_scale > 0:
            raise DomainError("energy_scale must be positive")

    @property
    def step(self) -> float:
        return (self.r_max - self.r_min) / (self.grid_points - 1)

    def grid(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.grid_points)

    def starts_at_pole(self) -> bool:
        return self.variant == EXACT_CENTRIFUGAL and self.r_min <= -1.0 + 2 * POLE_OFFSET

    def seeds_from_barrier(self) -> bool:
        return self.variant == EXACT_CENTRIFUGAL and (self.power_law_seed or self.starts_at_pole())


@dataclass(frozen=True)
class NumerovSolution:
    direction: str
    energy: float
    values: np.ndarray          # NaN where the sweep did not reach
    match_index: int
    log_derivative: float
    crossings: Tuple[int, ...]  # i such that u[i], u[i+1] differ in sign


@dataclass(frozen=True)
class NumerovResult:
    eigenvalue: float
    node_count: int
    bracket: Tuple[float, float]
    residual: float
    grid: RadialProblem
    grid_doublings: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalue": self.eigenvalue,
            "node_count": self.node_count,
            "bracket": list(self.bracket),
            "residual": self.residual,
            "grid_points": self.grid.grid_points,
            "r_min": self.grid.r_min,
            "r_max": self.grid.r_max,
            "variant": self.grid.variant,
        }


class _Sweeper:
    """Numerov coefficients of one problem at one energy."""

    def __init__(self, problem: RadialProblem, energy: float):
        self.problem = problem
        self.energy = energy
        self.r = problem.grid()
        h = problem.step
        self.q = np.asarray(problem.effective_potential(self.r), dtype=float) - energy / problem.energy_scale
        f = 1.0 - h * h * self.q / 12.0
        if np.any(f <= 0.05):
            raise GridTooCoarseError(
                f"h^2 Q/12 too large on {problem.grid_points} points; refine the grid or shrink the domain")
        self.f = f.tolist()
        self.a = (12.0 - 10.0 * f).tolist()
        self.h = h

    def match_index(self) -> int:
        allowed = np.nonzero(self.q < 0)[0]
        last = self.problem.grid_points - 1
        m = int(allowed[-1]) if allowed.size else int(np.argmin(self.q))
        return min(max(m, 2), last - 2)

    def _seed(self, index: int) -> Tuple[float, float]:
        q0 = self.q[index]
        if q0 > 0:
            return 1.0, math.exp(math.sqrt(q0) * self.h)
        return 0.0, self.h

    def sweep(self, direction: str, stop: int) -> Tuple[List[float], List[int]]:
        """Run the recurrence from one boundary up to and including `stop`."""
        n_pts = self.problem.grid_points
        if direction == FORWARD:
            f, a = self.f, self.a
            if self.problem.seeds_from_barrier():
                power = math.sqrt(self.problem.barrier + 0.25) + 0.5
                u0, u1 = (1.0 + self.r[0]) ** power, (1.0 + self.r[1]) ** power
            else:
                u0, u1 = self._seed(0)
            last = stop
        else:
            f, a = self.f[::-1], self.a[::-1]
            u0, u1 = self._seed(n_pts - 1)
            last = n_pts - 1 - stop

        u = [u0, u1]
        crossings = []
        if u0 * u1 < 0:
            crossings.append(0)
        prev, cur = u0, u1
        last_sign = 1.0 if u1 > 0 else (-1.0 if u1 < 0 else (1.0 if u0 >= 0 else -1.0))
        for i in range(1, last):
            nxt = (a[i] * cur - f[i - 1] * prev) / f[i + 1]
            if nxt != 0.0:
                sign = 1.0 if nxt > 0 else -1.0
                if sign != last_sign:
                    crossings.append(i)
                    last_sign = sign
            if abs(nxt) > RESCALE_LIMIT:
                scale = 1.0 / RESCALE_LIMIT
                u = [v * scale for v in u]
                cur *= scale
                nxt *= scale
            u.append(nxt)
            prev, cur = cur, nxt

        if direction == BACKWARD:
            u.reverse()
            crossings = [n_pts - 2 - c for c in crossings]
        return u, crossings


def numerov_integrate(problem: RadialProblem, energy: float, direction: str = FORWARD,
                      match_index: Optional[int] = None) -> NumerovSolution:
    """
    Integrate from one boundary past the matching point.

    Returns the sampled solution (NaN where not reached) and its
    log-derivative at the matching point, by default the outer classical
    turning point.
    """
    if direction not in (FORWARD, BACKWARD):
        raise DomainError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
    sweeper = _Sweeper(problem, energy)
    m = sweeper.match_index() if match_index is None else int(match_index)
    n_pts = problem.grid_points
    stop = m + 1 if direction == FORWARD else m - 1
    u, crossings = sweeper.sweep(direction, stop)

    values = np.full(n_pts, np.nan)
    if direction == FORWARD:
        values[:len(u)] = u
    else:
        values[n_pts - len(u):] = u
    log_derivative = (values[m + 1] - values[m - 1]) / (2.0 * sweeper.h * values[m])
    return NumerovSolution(direction, energy, values, m, float(log_derivative), tuple(crossings))


def matching_defect(problem: RadialProblem, energy: float) -> float:
    """Difference of outward and inward log-derivatives at the matching point."""
    out = numerov_integrate(problem, energy, FORWARD)
    inward = numerov_integrate(problem, energy, BACKWARD, match_index=out.match_index)
    return out.log_derivative - inward.log_derivative


def _casoratian(problem: RadialProblem, energy: float, match_index: Optional[int] = None) -> float:
    out = numerov_integrate(problem, energy, FORWARD, match_index)
    inward = numerov_integrate(problem, energy, BACKWARD, out.match_index)
    m = out.match_index
    a0, a1 = out.values[m], out.values[m + 1]
    b0, b1 = inward.values[m], inward.values[m + 1]
    return float((a1 * b0 - b1 * a0) / (math.hypot(a0, a1) * math.hypot(b0, b1)))


def sturm_count(problem: RadialProblem, energy: float) -> int:
    """Number of discrete eigenvalues below `energy`: sign changes of the outward solution."""
    sweeper = _Sweeper(problem, energy)
    _, crossings = sweeper.sweep(FORWARD, problem.grid_points - 1)
    return len(crossings)


def _matched_node_count(problem: RadialProblem, energy: float) -> Tuple[int, float]:
    out = numerov_integrate(problem, energy, FORWARD)
    inward = numerov_integrate(problem, energy, BACKWARD, match_index=out.match_index)
    m = out.match_index
    nodes = sum(1 for c in out.crossings if c < m) + sum(1 for c in inward.crossings if c >= m)
    return nodes, out.log_derivative - inward.log_derivative


def _isolate(problem: RadialProblem, n: int, lo: float, hi: float) -> Tuple[float, float]:
    """Shrink/expand [lo, hi] (dimensionless) until it holds exactly eigenvalue n."""
    scale = problem.energy_scale
    count = lambda e: sturm_count(problem, e * scale)

    c_lo, c_hi = count(lo), count(hi)
    expansions = 0
    while c_lo > n or c_hi < n + 1:
        if expansions >= MAX_WINDOW_EXPANSIONS:
            raise EigenvalueNotBracketedError(
                f"eigenvalue n={n} not bracketed (counts {c_lo}, {c_hi} on [{lo * scale}, {hi * scale}])")
        width = hi - lo
        if c_lo > n:
            lo, c_lo = lo - width, count(lo - width)
        if c_hi < n + 1:
            hi, c_hi = hi + width, count(hi + width)
        expansions += 1
        logger.debug("widened window to [%g, %g], counts %d/%d", lo * scale, hi * scale, c_lo, c_hi)

    for _ in range(MAX_BISECTIONS):
        if c_lo == n and c_hi == n + 1:
            return lo, hi
        if c_lo > c_hi:
            raise GridTooCoarseError("node count is not monotone in energy")
        mid = 0.5 * (lo + hi)
        c_mid = count(mid)
        if c_mid <= n:
            lo, c_lo = mid, c_mid
        else:
            hi, c_hi = mid, c_mid
    raise EigenvalueNotBracketedError(f"could not isolate eigenvalue n={n}")


def _shrink_bracket(g: Callable[[float], float], lo: float, hi: float, g_lo: float,
                    root: float, width: float) -> Tuple[float, Tuple[float, float]]:
    """Sign-change bracket of g narrower than width, probing root +/- width/4 first."""
    probes = [root - 0.25 * width, root + 0.25 * width]
    for _ in range(MAX_BISECTIONS):
        if hi - lo < width:
            break
        p = probes.pop(0) if probes else 0.5 * (lo + hi)
        if not lo < p < hi:
            continue
        g_p = g(p)
        if g_p == 0.0:
            return p, (p, p)
        if (g_p > 0) == (g_lo > 0):
            lo = p
        else:
            hi = p
    if not lo <= root <= hi:
        root = 0.5 * (lo + hi)
    return root, (lo, hi)


def _polish(problem: RadialProblem, lo: float, hi: float, xtol: float,
            width: float) -> Tuple[float, Tuple[float, float]]:
    """Root of the normalized Casoratian in [lo, hi] and a bracket of it narrower than width."""
    scale = problem.energy_scale
    g = lambda e: _casoratian(problem, e * scale)
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo, (lo, lo)
    if g_hi == 0.0:
        return hi, (hi, hi)
    if g_lo * g_hi > 0:
        raise EigenvalueNotBracketedError("matching defect has no sign change in the isolated window")
    root = brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return _shrink_bracket(g, lo, hi, g_lo, root, width)


def find_eigenvalue(problem: RadialProblem, n: int, search_window: Tuple[float, float],
                    tol: float = 1e-9, refine: bool = True,
                    max_doublings: int = MAX_GRID_DOUBLINGS) -> NumerovResult:
    """
    Eigenvalue with n nodes, in the problem's energy units.

    search_window is widened automatically when it does not contain the
    target. With refine=True the grid is doubled until successive
    eigenvalues differ by less than tol/10.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    scale = problem.energy_scale
    lo, hi = sorted(search_window)
    if lo == hi:
        hi = lo + max(abs(lo) * 0.1, tol)
    lo, hi = lo / scale, hi / scale
    xtol = 0.01 * tol / scale
    width = tol / scale

    lo, hi = _isolate(problem, n, lo, hi)
    e, bracket = _polish(problem, lo, hi, xtol, width)
    current = problem
    doublings = 0

    while refine and doublings < max_doublings:
        finer = replace(current, grid_points=2 * current.grid_points - 1)
        lo_f, hi_f = _isolate(finer, n, lo, hi)
        e_fine, bracket = _polish(finer, lo_f, hi_f, xtol, width)
        shift = abs(e_fine - e) * scale
        logger.debug("grid %d -> %d: eigenvalue shift %.3e", current.grid_points, finer.grid_points, shift)
        current, e, lo, hi = finer, e_fine, lo_f, hi_f
        doublings += 1
        if shift < tol / 10.0:
            break
    else:
        if refine:
            logger.warning("grid refinement stopped after %d doublings (%s)", doublings, current.label)

    nodes, residual = _matched_node_count(current, e * scale)
    if nodes != n:
        raise GridTooCoarseError(f"matched solution has {nodes} nodes, expected {n}")

    return NumerovResult(
        eigenvalue=e * scale,
        node_count=nodes,
        bracket=(bracket[0] * scale, bracket[1] * scale),
        residual=float(residual),
        grid=current,
        grid_doublings=doublings,
    )


def _domain_limits(potential: Callable, e_top: float, r_floor: float, r_ceiling: float,
                   samples: int = 40001) -> Tuple[float, float]:
    """
    WKB-sized domain: go past the classical turning points at e_top until the
    decay integral of sqrt(V - e_top) reaches the configured number of nats.
    """
    r = np.linspace(r_floor, r_ceiling, samples)
    q = np.asarray(potential(r), dtype=float) - e_top
    allowed = np.nonzero(q < 0)[0]
    if allowed.size == 0:
        raise EigenvalueNotBracketedError(f"energy {e_top} lies below the whole potential")
    i_in, i_out = int(allowed[0]), int(allowed[-1])
    kappa = np.sqrt(np.clip(q, 0.0, None))

    inner = cumulative_trapezoid(kappa[:i_in + 1][::-1], r[:i_in + 1][::-1] * -1.0, initial=0.0)
    beyond = np.nonzero(inner >= INNER_DECAY_NATS)[0]
    r_min = float(r[i_in - beyond[0]]) if beyond.size else float(r_floor)

    outer = cumulative_trapezoid(kappa[i_out:], r[i_out:], initial=0.0)
    beyond = np.nonzero(outer >= OUTER_DECAY_NATS)[0]
    r_max = float(r[i_out + beyond[0]]) if beyond.size else float(r_ceiling)
    return r_min, r_max


def _pole_floor(barrier: float, r_min: float, r_max: float, grid_points: int) -> float:
    """
    Closest approach to r = -1 at which h^2 barrier / (12 (1+r)^2) stays at
    POLE_STEP_LOAD. Below it the solution is (1+r)^(lambda+1/2) to leading order.
    """
    step = (r_max - r_min) / (grid_points - 1)
    return -1.0 + step * math.sqrt(barrier / (12.0 * POLE_STEP_LOAD))


def build_problem(mol: MoleculeParams, ell: int, dimension_N: int = 3,
                  variant: str = PEKERIS_APPROX, energy_top: Optional[float] = None,
                  grid_points: int = DEFAULT_GRID_POINTS) -> RadialProblem:
    """
    Radial problem for a molecule, sized for eigenvalues up to energy_top (eV).

    energy_top defaults to the dissociation threshold of the variant.
    """
    barrier = centrifugal_barrier(ell, dimension_N)
    d = mol.reduced_depth
    potential = effective_potential(d, mol.alpha, barrier, variant)
    threshold = barrier * mol.coefficients.c0 if variant == PEKERIS_APPROX else 0.0
    e_top = threshold if energy_top is None else min(energy_top / mol.energy_scale_eps, threshold)

    r_floor = -1.0 + POLE_OFFSET if variant == EXACT_CENTRIFUGAL else -8.0 / mol.alpha
    r_ceiling = 60.0 / mol.alpha
    r_min, r_max = _domain_limits(potential, e_top, r_floor, r_ceiling)

    power_law_seed = False
    if variant == EXACT_CENTRIFUGAL and barrier > 0:
        r_pole = _pole_floor(barrier, r_min, r_max, grid_points)
        if r_pole > r_min:
            logger.debug("exact barrier: r_min moved from %g to %g", r_min, r_pole)
            r_min, power_law_seed = r_pole, True

    return RadialProblem(
        effective_potential=potential,
        r_min=r_min,
        r_max=r_max,
        grid_points=grid_points,
        variant=variant,
        energy_scale=mol.energy_scale_eps,
        barrier=barrier,
        label=f"{mol.name} l={ell} N={dimension_N} {variant}",
        power_law_seed=power_law_seed,
    )


def oracle_energy(mol: MoleculeParams, n: int, ell: int, dimension_N: int = 3,
                  variant: str = PEKERIS_APPROX, tol: float = 1e-9,
                  window: Optional[Tuple[float, float]] = None,
                  grid_points: int = DEFAULT_GRID_POINTS) -> NumerovResult:
    """Numerov eigenvalue (eV); the default window is the closed-form estimate +/- 10%."""
    if window is None:
        estimate = energy(mol, n, ell, dimension_N)
        spread = 0.1 * abs(estimate)
        window = (estimate - spread, estimate + spread)
    problem = build_problem(mol, ell, dimension_N, variant, energy_top=max(window), grid_points=grid_points)
    result = find_eigenvalue(problem, n, window, tol)
    logger.info("%s n=%d: E=%.12g eV (%d doublings)", problem.label, n, result.eigenvalue, result.grid_doublings)
    return result


def count_bound_states(mol: MoleculeParams, ell: int, dimension_N: int = 3,
                       variant: str = PEKERIS_APPROX, grid_points: int = DEFAULT_GRID_POINTS) -> int:
    """Eigenvalues below the variant's dissociation threshold (node count at threshold)."""
    problem = build_problem(mol, ell, dimension_N, variant, grid_points=grid_points)
    threshold = problem.barrier * mol.coefficients.c0 if variant == PEKERIS_APPROX else 0.0
    return sturm_count(problem, threshold * problem.energy_scale)


def harmonic_oscillator_problem(x_max: float = 10.0, grid_points: int = 10000) -> RadialProblem:
    """u'' = (x^2 - 2E) u; eigenvalues E = k + 1/2."""
    return RadialProblem(
        effective_potential=lambda x: np.asarray(x, dtype=float) ** 2,
        r_min=-x_max,
        r_max=x_max,
        grid_points=grid_points,
        variant=MODEL_PROBLEM,
        energy_scale=0.5,
        label="harmonic oscillator",
    )


def measure_convergence_order(problem: RadialProblem, n: int, window: Tuple[float, float],
                              tol: float = 1e-13) -> Tuple[Tuple[float, float, float], float]:
    """Eigenvalues on G, 2G-1, 4G-3 points and the observed order log2(d1/d2)."""
    grids = [problem.grid_points]
    for _ in range(2):
        grids.append(2 * grids[-1] - 1)
    values = tuple(find_eigenvalue(replace(problem, grid_points=g), n, window, tol, refine=False).eigenvalue
                   for g in grids)
    d1 = abs(values[0] - values[1])
    d2 = abs(values[1] - values[2])
    if d2 == 0.0:
        raise OracleError("eigenvalue did not change between the two finest grids")
    return values, math.log2(d1 / d2)


def relative_gap(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def rotational_gap_scan(mol: MoleculeParams, n: int, ell_values: Sequence[int], dimension_N: int = 3,
                        tol: float = 1e-9) -> List[Dict[str, Any]]:
    """Closed form vs. exact-centrifugal oracle over a list of l."""
    rows = []
    for ell in ell_values:
        closed = energy(mol, n, ell, dimension_N)
        exact = oracle_energy(mol, n, ell, dimension_N, EXACT_CENTRIFUGAL, tol)
        rows.append({
            "ell": int(ell),
            "lambda": lambda_index(ell, dimension_N),
            "closed_form": closed,
            "exact_oracle": exact.eigenvalue,
            "rel_gap": relative_gap(closed, exact.eigenvalue),
        })
    return rows


def max_reliable_ell(mol: MoleculeParams, n: int, dimension_N: int = 3, rel_tol: float = 1e-3,
                     ell_cap: int = 40, tol: float = 1e-9) -> int:
    """Largest l (<= ell_cap) whose closed-form energy stays within rel_tol of the exact oracle; -1 if none."""
    best = -1
    for ell in range(int(ell_cap) + 1):
        try:
            row = rotational_gap_scan(mol, n, [ell], dimension_N, tol)[0]
        except (DomainError, OracleError) as e:
            logger.info("reliability scan stopped at l=%d: %s", ell, e)
            break
        if row["rel_gap"] > rel_tol:
            break
        best = ell
    return best


def compare_closed_form(mol: MoleculeParams, n: int, ell: int, dimension_N: int = 3,
                        tol: float = 1e-9) -> Dict[str, Any]:
    """
    One validation cell: closed form against both oracle variants.

    Never raises for oracle trouble; the entry is marked oracle_failed instead.
    """
    entry: Dict[str, Any] = {"n": n, "ell": ell, "N": dimension_N, "oracle_failed": False}
    closed = energy(mol, n, ell, dimension_N)
    entry["closed_form_eV"] = closed
    for variant, key in ((PEKERIS_APPROX, "pekeris_oracle"), (EXACT_CENTRIFUGAL, "exact_oracle")):
        try:
            result = oracle_energy(mol, n, ell, dimension_N, variant, tol)
        except (OracleError, DomainError) as e:
            entry["oracle_failed"] = True
            entry[f"{key}_error"] = str(e)
            entry[f"{key}_eV"] = None
            entry[f"{key}_rel_gap"] = None
            continue
        entry[f"{key}_eV"] = result.eigenvalue
        entry[f"{key}_rel_gap"] = relative_gap(closed, result.eigenvalue)
        entry[f"{key}_nodes"] = result.node_count
    return entry


if __name__ == "__main__":
    ho = harmonic_oscillator_problem()
    for k in range(3):
        print(f"oscillator k={k}: {find_eigenvalue(ho, k, (k, k + 1)).eigenvalue:.12f}")

    h2 = MoleculeParams("H2", 4.7446, 1.4405, 7.5416e-3, 0.7416)
    for n in range(4):
        result = oracle_energy(h2, n, 0)
        print(f"H2 n={n}: oracle {result.eigenvalue:.10f} eV, closed form {energy(h2, n, 0):.10f} eV")
    print(f"H2 bound states at l=0: oracle {count_bound_states(h2, 0)}, closed form {bound_state_count(h2, 0)}")
