#!/usr/bin/env python3
"""
Molecule Registry
Built-in H2 entry plus JSON ingestion of user-supplied molecules.

File format (schema_version 1):
    {"schema_version": 1,
     "molecules": [{"name": str, "D_eV": num, "alpha": num, "eps_eV": num,
                    "r0_angstrom": num, "provenance": str}]}
"""

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from logging_config import get_logger
from pekeris_core import DomainError
from spectrum import MoleculeParams

logger = get_logger(__name__)

SCHEMA_VERSION = 1
REGISTRY_ENV = "MORSE_MOLECULES"

# JSON key -> MoleculeParams attribute
FIELD_MAP = {
    "name": "name",
    "D_eV": "well_depth_D",
    "alpha": "alpha",
    "eps_eV": "energy_scale_eps",
    "r0_angstrom": "r0",
    "provenance": "provenance",
}
NUMERIC_FIELDS = ("D_eV", "alpha", "eps_eV", "r0_angstrom")

# D, alpha and eps of H2 are the standard Pekeris-Morse test set; r0 is the
# literature equilibrium bond length, only used by the 1/r0 normalization factor
H2 = MoleculeParams(
    name="H2",
    well_depth_D=4.7446,
    alpha=1.4405,
    energy_scale_eps=7.5416e-3,
    r0=0.7416,
    provenance="external",
)


class MoleculeFileError(ValueError):
    """A registry file could not be parsed or failed validation."""


@dataclass(frozen=True)
class MoleculeFile:
    entries: Tuple[MoleculeParams, ...]
    source_path: str = "<builtin>"
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.name in seen:
                raise MoleculeFileError(f"duplicate molecule name '{entry.name}' in {self.source_path}")
            seen.add(entry.name)

    def names(self) -> List[str]:
        return [entry.name for entry in self.entries]

    def lookup(self, name: str) -> MoleculeParams:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise MoleculeFileError(f"unknown molecule '{name}' (known: {', '.join(self.names()) or 'none'})")

    def __contains__(self, name: str) -> bool:
        return name in self.names()

    def __len__(self) -> int:
        return len(self.entries)


def builtin_registry() -> MoleculeFile:
    return MoleculeFile(entries=(H2,), source_path="<builtin>")


def molecule_to_dict(mol: MoleculeParams) -> Dict[str, Any]:
    return {
        "name": mol.name,
        "D_eV": mol.well_depth_D,
        "alpha": mol.alpha,
        "eps_eV": mol.energy_scale_eps,
        "r0_angstrom": mol.r0,
        "provenance": mol.provenance,
    }


def _entry_from_dict(raw: Any, index: int, source: str) -> MoleculeParams:
    where = f"{source}: molecules[{index}]"
    if not isinstance(raw, dict):
        raise MoleculeFileError(f"{where} must be an object")

    label = raw.get("name", f"#{index}")
    for key in ("name",) + NUMERIC_FIELDS:
        if key not in raw:
            raise MoleculeFileError(f"{where} ('{label}'): missing field '{key}'")
    unknown = set(raw) - set(FIELD_MAP)
    if unknown:
        raise MoleculeFileError(f"{where} ('{label}'): unknown field(s) {sorted(unknown)}")
    for key in NUMERIC_FIELDS:
        value = raw[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MoleculeFileError(f"{where} ('{label}'): field '{key}' must be a number")

    kwargs = {FIELD_MAP[key]: raw[key] for key in raw}
    for key in NUMERIC_FIELDS:
        kwargs[FIELD_MAP[key]] = float(raw[key])
    kwargs.setdefault("provenance", "")
    try:
        return MoleculeParams(**kwargs)
    except DomainError as e:
        raise MoleculeFileError(f"{where} ('{label}'): {e}") from e


def parse_molecules(text: str, source: str = "<string>") -> MoleculeFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MoleculeFileError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e

    if isinstance(data, list):
        data = {"schema_version": SCHEMA_VERSION, "molecules": data}
    if not isinstance(data, dict):
        raise MoleculeFileError(f"{source}: top level must be an object or a list")

    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise MoleculeFileError(f"{source}: unsupported schema_version {version!r}")
    molecules = data.get("molecules")
    if not isinstance(molecules, list):
        raise MoleculeFileError(f"{source}: 'molecules' must be a list")

    entries = tuple(_entry_from_dict(raw, i, source) for i, raw in enumerate(molecules))
    return MoleculeFile(entries=entries, source_path=source, schema_version=version)


def load_molecules(path: Union[str, Path]) -> MoleculeFile:
    path = Path(path)
    if not path.exists():
        raise MoleculeFileError(f"File not found: {path}")
    if not path.is_file():
        raise MoleculeFileError(f"Path is not a file: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    registry = parse_molecules(text, str(path))
    logger.info("loaded %d molecule(s) from %s", len(registry), path)
    return registry


def dumps_molecules(registry: MoleculeFile) -> str:
    """JSON text; floats use the shortest repr that round-trips exactly."""
    payload = {
        "schema_version": registry.schema_version,
        "molecules": [molecule_to_dict(entry) for entry in registry.entries],
    }
    for entry in payload["molecules"]:
        for key in NUMERIC_FIELDS:
            if not math.isfinite(entry[key]):
                raise MoleculeFileError(f"cannot serialize non-finite {key} of '{entry['name']}'")
    return json.dumps(payload, indent=2) + "\n"


def save_molecules(registry: MoleculeFile, path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    text = dumps_molecules(registry)
    os.makedirs(path.parent if str(path.parent) else ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return {
        "success": True,
        "message": f"Registry written: {path}",
        "file_path": str(path),
        "count": len(registry),
        "size": len(text),
    }


def merge_registries(base: MoleculeFile, extra: MoleculeFile) -> MoleculeFile:
    """Append extra's entries; a name present in both is an error."""
    clashes = [name for name in extra.names() if name in base]
    if clashes:
        raise MoleculeFileError(
            f"duplicate molecule name(s) {', '.join(clashes)} in {extra.source_path}")
    return MoleculeFile(entries=base.entries + extra.entries,
                        source_path=f"{base.source_path}+{extra.source_path}",
                        schema_version=base.schema_version)


def load_registry(extra_paths: Iterable[Union[str, Path]] = (),
                  environ: Optional[Dict[str, str]] = None) -> MoleculeFile:
    """Built-in registry, then $MORSE_MOLECULES, then any explicit files."""
    environ = os.environ if environ is None else environ
    registry = builtin_registry()
    paths: List[Union[str, Path]] = []
    if environ.get(REGISTRY_ENV):
        paths.append(environ[REGISTRY_ENV])
    paths.extend(extra_paths)
    for path in paths:
        registry = merge_registries(registry, load_molecules(path))
    return registry


if __name__ == "__main__":
    registry = load_registry()
    for mol in registry.entries:
        print(json.dumps(molecule_to_dict(mol)))
