#!/usr/bin/env python3
"""
Morse Spectrum Command Line
Spectra, wavefunction samples, Pekeris diagnostics and the oracle validation
sweep, written as CSV or JSON for plotting.

Exit codes: 0 success, 2 usage/domain error, 3 validation failure.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO

sys.path.append(str(Path(__file__).parent))

from logging_config import get_logger
from molecules_io import (FIELD_MAP, MoleculeFile, MoleculeFileError, builtin_registry, load_molecules,
                          load_registry, merge_registries, molecule_to_dict, save_molecules)
from oracle import compare_closed_form
from output_writer import DEFAULT_PRECISION, FORMATS, OutputSpec, OutputWriter, Table
from pekeris_core import DomainError, discrepancy_profile, pekeris_coefficients
from spectrum import MoleculeParams, bound_state, bound_state_count, lambda_index, spectrum_table
from wavefunctions import radial_eigenfunction, sample_wavefunction

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3

SPECTRUM_HEADER = ("n", "ell", "N", "lambda", "kappa", "energy_eV")
WAVEFUNCTION_HEADER = ("r", "y", "R")
PEKERIS_HEADER = ("r", "exact", "pekeris", "rel_err")
MOLECULE_HEADER = tuple(FIELD_MAP)

DEFAULT_VALIDATION_TOL = 1e-6
DEFAULT_ORACLE_TOL = 1e-9


def _validation_cell(mol: MoleculeParams, dimension_N: int, oracle_tol: float, cell) -> Dict[str, Any]:
    n, ell = cell
    return compare_closed_form(mol, n, ell, dimension_N, oracle_tol)


class MorseSpectrumCLI:
    """
    Command handlers for the Morse spectrum tools.

    Every cmd_* method returns a result dict with "success" and "exit_code"
    (plus "error" on failure) and never raises for bad input.
    """

    def __init__(self, registry: Optional[MoleculeFile] = None,
                 extra_registry_paths: Sequence[str] = (),
                 stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self._registry = registry
        self.extra_registry_paths = tuple(extra_registry_paths)
        self.stdout = stdout
        self.stderr = stderr

    @property
    def registry(self) -> MoleculeFile:
        if self._registry is None:
            self._registry = load_registry(self.extra_registry_paths)
        return self._registry

    def _status(self, message: str) -> None:
        print(message, file=self.stderr or sys.stderr)

    def _writer(self, output: Optional[OutputSpec]) -> OutputWriter:
        return OutputWriter(output or OutputSpec(), stream=self.stdout)

    def _failure(self, error: Exception, exit_code: int = EXIT_USAGE) -> Dict[str, Any]:
        self._status(f"❌ {error}")
        return {"success": False, "error": str(error), "exit_code": exit_code}

    def _finish(self, written: Dict[str, Any], **extra) -> Dict[str, Any]:
        if not written["success"]:
            self._status(f"❌ {written['error']}")
            return {"success": False, "error": written["error"], "exit_code": EXIT_USAGE}
        result = {"success": True, "exit_code": EXIT_OK, "destination": written["destination"]}
        result.update(extra)
        return result

    def cmd_spectrum(self, molecule: str, n_max: int, ell_max: int, dimension_N: int = 3,
                     output: Optional[OutputSpec] = None) -> Dict[str, Any]:
        """Closed-form energies for n <= n_max, l <= ell_max, ordered by (l, n)."""
        try:
            mol = self.registry.lookup(molecule)
            lambda_index(0, dimension_N)
            if n_max < 0 or ell_max < 0:
                raise DomainError(f"--n-max and --ell-max must be non-negative (got {n_max}, {ell_max})")
            skipped: List[Dict[str, Any]] = []
            states = spectrum_table(mol, n_max, ell_max, dimension_N, diagnostics=skipped)
        except (DomainError, MoleculeFileError) as e:
            return self._failure(e)

        if not states:
            self._status(f"⚠️  {mol.name} has no bound states for n <= {n_max}, l <= {ell_max}, N = {dimension_N}")
        elif skipped:
            self._status(f"⚠️  {len(skipped)} (n, l) cell(s) have no bound state and were skipped")

        meta = {"command": "spectrum", "molecule": mol.name, "n_max": n_max,
                "ell_max": ell_max, "N": dimension_N, **self._molecule_meta(mol)}
        rows = [[s.n, s.ell, s.dimension_N, s.lambda_, s.kappa, s.energy] for s in states]
        written = self._writer(output).write_tables([Table(SPECTRUM_HEADER, rows, meta)])
        if written["success"] and states:
            self._status(f"✅ {len(rows)} bound state(s) of {mol.name} written to {written['destination']}")
        return self._finish(written, rows=len(rows), skipped=len(skipped))

    def cmd_wavefunction(self, molecule: str, n: int, ell: int, dimension_N: int = 3,
                         r_min: float = -0.5, r_max: float = 1.5, samples: int = 201,
                         output: Optional[OutputSpec] = None) -> Dict[str, Any]:
        """Normalized R sampled on a uniform r grid."""
        try:
            mol = self.registry.lookup(molecule)
            if int(samples) != samples or samples < 1:
                raise DomainError(f"--samples must be a positive integer, got {samples}")
            count = bound_state_count(mol, ell, dimension_N)
            if not 0 <= n < count:
                valid = f"0..{count - 1}" if count else "none"
                raise DomainError(f"n={n} is not a bound state of {mol.name} at l={ell}, N={dimension_N}; "
                                  f"valid n: {valid}")
            state = bound_state(mol, n, ell, dimension_N)
            eig = radial_eigenfunction(mol, state)
            rows = sample_wavefunction(eig, r_min, r_max, samples)
        except (DomainError, MoleculeFileError) as e:
            return self._failure(e)

        meta = {"command": "wavefunction", "molecule": mol.name, "n": n, "ell": ell, "N": dimension_N,
                "lambda": state.lambda_, "kappa": state.kappa, "energy_eV": state.energy,
                "norm_constant": eig.norm_constant, "log_norm_constant": eig.log_norm_constant,
                **self._molecule_meta(mol)}
        written = self._writer(output).write_tables([Table(WAVEFUNCTION_HEADER, rows, meta)])
        if written["success"]:
            self._status(f"✅ R(n={n}, l={ell}, N={dimension_N}) lambda={state.lambda_:g}: "
                         f"{len(rows)} samples written to {written['destination']}")
        return self._finish(written, rows=len(rows))

    def cmd_pekeris(self, alphas: Sequence[float], r_min: float = 0.0, r_max: float = 0.3,
                    samples: int = 31, output: Optional[OutputSpec] = None) -> Dict[str, Any]:
        """Exact vs. Pekeris centrifugal term, one block per alpha."""
        try:
            if not alphas:
                raise DomainError("at least one --alpha is required")
            tables = []
            for alpha in alphas:
                profile = discrepancy_profile(alpha, r_min, r_max, samples)
                coeffs = pekeris_coefficients(alpha)
                meta = {"alpha": alpha, "C0": coeffs.c0, "C1": coeffs.c1, "C2": coeffs.c2}
                tables.append(Table(PEKERIS_HEADER, profile.rows(), meta))
        except DomainError as e:
            return self._failure(e)

        meta = {"command": "pekeris", "r_min": r_min, "r_max": r_max, "samples": samples}
        written = self._writer(output).write_tables(tables, meta=meta)
        if written["success"]:
            self._status(f"✅ {len(tables)} centrifugal profile(s) written to {written['destination']}")
        return self._finish(written, blocks=len(tables))

    def cmd_validate(self, molecule: str, n_max: int = 3, ell_max: int = 5, dimension_N: int = 3,
                     tol: float = DEFAULT_VALIDATION_TOL, output: Optional[OutputSpec] = None,
                     workers: int = 1, oracle_tol: float = DEFAULT_ORACLE_TOL) -> Dict[str, Any]:
        """
        Closed form against the Numerov oracle on every bound (n, l) cell.

        A cell passes when the closed-form energy is within tol (relative) of
        the Pekeris-form oracle. The exact-centrifugal gap is reported but
        does not decide the exit code.
        """
        try:
            mol = self.registry.lookup(molecule)
            lambda_index(0, dimension_N)
            if n_max < 0 or ell_max < 0:
                raise DomainError(f"--n-max and --ell-max must be non-negative (got {n_max}, {ell_max})")
            if not tol > 0 or not oracle_tol > 0:
                raise DomainError("tolerances must be positive")
            if workers < 1:
                raise DomainError(f"--workers must be at least 1, got {workers}")
            cells = []
            skipped = []
            for ell in range(ell_max + 1):
                count = bound_state_count(mol, ell, dimension_N)
                for n in range(n_max + 1):
                    (cells if n < count else skipped).append((n, ell))
        except (DomainError, MoleculeFileError) as e:
            return self._failure(e)

        self._status(f"🔍 Validating {len(cells)} cell(s) of {mol.name} against the Numerov oracle...")
        task = partial(_validation_cell, mol, dimension_N, oracle_tol)
        if workers > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                entries = list(pool.map(task, cells))
        else:
            entries = [task(cell) for cell in cells]

        for entry in entries:
            gap = entry.get("pekeris_oracle_rel_gap")
            entry["pass"] = gap is not None and gap <= tol

        report = {
            "meta": {"command": "validate", "molecule": molecule_to_dict(mol), "n_max": n_max,
                     "ell_max": ell_max, "N": dimension_N, "tol": tol, "oracle_tol": oracle_tol},
            "rows": entries,
            "skipped": [{"n": n, "ell": ell} for n, ell in skipped],
            "summary": self._summarize(entries),
        }
        written = self._writer(output).write_document(report)
        summary = report["summary"]
        if not written["success"]:
            return self._finish(written)

        if summary["oracle_failed"]:
            self._status(f"❌ oracle failed on {summary['oracle_failed']} cell(s)")
            exit_code = EXIT_VALIDATION
        elif summary["failed"]:
            self._status(f"❌ {summary['failed']} cell(s) exceed tol={tol:g} "
                         f"(max gap {summary['max_pekeris_gap']:.3e})")
            exit_code = EXIT_VALIDATION
        else:
            self._status(f"✅ all {summary['passed']} cell(s) within tol={tol:g} "
                         f"(max gap {summary['max_pekeris_gap']:.3e})")
            exit_code = EXIT_OK
        return {"success": exit_code == EXIT_OK, "exit_code": exit_code, "summary": summary,
                "destination": written["destination"]}

    @staticmethod
    def _summarize(entries: List[Dict[str, Any]]) -> Dict[str, Any]:
        def max_gap(key: str) -> Optional[float]:
            gaps = [e[key] for e in entries if e.get(key) is not None]
            return max(gaps) if gaps else None

        # |closed - exact oracle| should grow with l at fixed n
        growth = {}
        for n in sorted({e["n"] for e in entries}):
            gaps = [abs(e["closed_form_eV"] - e["exact_oracle_eV"])
                    for e in sorted(entries, key=lambda e: e["ell"])
                    if e["n"] == n and e.get("exact_oracle_eV") is not None]
            growth[str(n)] = all(b >= a for a, b in zip(gaps, gaps[1:]))

        return {
            "cells": len(entries),
            "passed": sum(1 for e in entries if e["pass"]),
            "failed": sum(1 for e in entries if not e["pass"] and not e["oracle_failed"]),
            "oracle_failed": sum(1 for e in entries if e["oracle_failed"]),
            "max_pekeris_gap": max_gap("pekeris_oracle_rel_gap"),
            "max_exact_gap": max_gap("exact_oracle_rel_gap"),
            "exact_gap_nondecreasing_in_ell": growth,
        }

    def cmd_molecules(self, action: str = "list", path: Optional[str] = None, name: Optional[str] = None,
                      save_to: Optional[str] = None, output: Optional[OutputSpec] = None) -> Dict[str, Any]:
        """list | show NAME | add FILE [--save PATH]"""
        try:
            registry = self.registry
            if action == "list":
                return self._write_registry(registry, output)
            if action == "show":
                if not name:
                    raise DomainError("molecules show needs a NAME")
                entry = registry.lookup(name)
                written = self._writer(output).write_document(molecule_to_dict(entry))
                return self._finish(written, molecule=entry.name)
            if action == "add":
                if not path:
                    raise DomainError("molecules add needs a FILE")
                extra = load_molecules(path)
                merged = merge_registries(registry, extra)
                self._registry = merged
                self._status(f"✅ merged {len(extra)} molecule(s) from {path}")
                if save_to:
                    user_entries = MoleculeFile(
                        entries=tuple(e for e in merged.entries if e.name not in builtin_registry()),
                        source_path=str(save_to))
                    saved = save_molecules(user_entries, save_to)
                    self._status(f"💾 {saved['message']}")
                return self._write_registry(merged, output)
            raise DomainError(f"unknown molecules action {action!r}; expected list, show or add")
        except (DomainError, MoleculeFileError, OSError) as e:
            return self._failure(e)

    def _write_registry(self, registry: MoleculeFile, output: Optional[OutputSpec]) -> Dict[str, Any]:
        rows = [[molecule_to_dict(entry)[key] for key in MOLECULE_HEADER] for entry in registry.entries]
        meta = {"command": "molecules", "source": registry.source_path, "count": len(registry)}
        written = self._writer(output).write_tables([Table(MOLECULE_HEADER, rows, meta)])
        return self._finish(written, names=registry.names())

    @staticmethod
    def _molecule_meta(mol: MoleculeParams) -> Dict[str, Any]:
        return {"D_eV": mol.well_depth_D, "alpha": mol.alpha, "eps_eV": mol.energy_scale_eps,
                "r0_angstrom": mol.r0}


def handle_command(cli: MorseSpectrumCLI, command: str, arguments: Dict[str, Any]) -> Dict[str, Any]:
    """Dispatch a command name and keyword arguments to the matching handler."""
    function_map = {
        "spectrum": cli.cmd_spectrum,
        "wavefunction": cli.cmd_wavefunction,
        "pekeris": cli.cmd_pekeris,
        "validate": cli.cmd_validate,
        "molecules": cli.cmd_molecules,
    }
    if command not in function_map:
        return {"success": False, "error": f"Unknown command: {command}", "exit_code": EXIT_USAGE}
    try:
        return function_map[command](**arguments)
    except (DomainError, MoleculeFileError) as e:
        return cli._failure(e)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="csv", help="Output format (default: csv)")
    parser.add_argument("--output", "-o", default=None, help="Output file (default: stdout)")
    parser.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help=f"Significant digits, 6..17 (default: {DEFAULT_PRECISION})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morse",
        description="Morse potential spectra in N dimensions (Pekeris approximation)")
    parser.add_argument("--registry", action="append", default=[],
                        help="Extra molecule registry JSON (repeatable; $MORSE_MOLECULES is always read)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="Closed-form bound-state energies")
    p.add_argument("molecule")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--ell-max", type=int, default=0)
    p.add_argument("--N", dest="dimension_N", type=int, default=3, help="Spatial dimension (default: 3)")
    _add_output_flags(p)

    p = sub.add_parser("wavefunction", help="Sample a normalized radial eigenfunction")
    p.add_argument("molecule")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--N", dest="dimension_N", type=int, default=3)
    p.add_argument("--r-min", type=float, default=-0.5)
    p.add_argument("--r-max", type=float, default=1.5)
    p.add_argument("--samples", type=int, default=201)
    _add_output_flags(p)

    p = sub.add_parser("pekeris", help="Exact vs. Pekeris centrifugal term")
    p.add_argument("--alpha", dest="alphas", type=float, nargs="+", required=True)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=0.3)
    p.add_argument("--samples", type=int, default=31)
    _add_output_flags(p)

    p = sub.add_parser("validate", help="Closed form vs. Numerov oracle (JSON report)")
    p.add_argument("molecule")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--ell-max", type=int, default=5)
    p.add_argument("--N", dest="dimension_N", type=int, default=3)
    p.add_argument("--tol", type=float, default=DEFAULT_VALIDATION_TOL)
    p.add_argument("--oracle-tol", type=float, default=DEFAULT_ORACLE_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)

    p = sub.add_parser("molecules", help="Registry listing and merge")
    msub = p.add_subparsers(dest="action", required=True)
    m = msub.add_parser("list")
    _add_output_flags(m)
    m = msub.add_parser("show")
    m.add_argument("name")
    m.add_argument("--output", "-o", default=None)
    m.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    m = msub.add_parser("add", help="Merge a registry file (duplicates are rejected)")
    m.add_argument("path")
    m.add_argument("--save", dest="save_to", default=None, help="Write the non-builtin entries here")
    _add_output_flags(m)
    return parser


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    """Parse arguments, run one command, return its exit code."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    registry_paths = args.pop("registry")

    try:
        output = OutputSpec(format=args.pop("format", "json"), destination=args.pop("output"),
                            precision=args.pop("precision"))
    except DomainError as e:
        print(f"❌ {e}", file=stderr or sys.stderr)
        return EXIT_USAGE
    args["output"] = output

    try:
        registry = load_registry(registry_paths)
    except (MoleculeFileError, DomainError) as e:
        print(f"❌ {e}", file=stderr or sys.stderr)
        return EXIT_USAGE

    cli = MorseSpectrumCLI(registry=registry, stdout=stdout, stderr=stderr)
    result = handle_command(cli, command, args)
    logger.debug("%s finished: %s", command, result)
    return result["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
