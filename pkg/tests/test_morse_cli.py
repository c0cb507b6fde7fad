import json

import pytest

from molecules_io import REGISTRY_ENV, molecule_to_dict
from morse_cli import EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, MorseSpectrumCLI, handle_command, main
from output_writer import parse_csv_rows
from spectrum import energy


@pytest.fixture(autouse=True)
def no_user_registry(monkeypatch):
    monkeypatch.delenv(REGISTRY_ENV, raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_spectrum_rows(capsys, h2):
    code, out, err = run(capsys, "spectrum", "H2", "--n-max", "2", "--ell-max", "0")
    assert code == EXIT_OK
    rows = parse_csv_rows(out)
    assert list(rows[0]) == ["n", "ell", "N", "lambda", "kappa", "energy_eV"]
    assert [int(r["n"]) for r in rows] == [0, 1, 2]
    assert float(rows[0]["energy_eV"]) == pytest.approx(energy(h2, 0, 0, 3), rel=1e-11)
    assert "✅" in err


def test_spectrum_rotational_curve(capsys):
    code, out, _ = run(capsys, "spectrum", "H2", "--n-max", "0", "--ell-max", "28")
    assert code == EXIT_OK
    assert len(parse_csv_rows(out)) == 29


def test_spectrum_is_deterministic(capsys):
    _, first, _ = run(capsys, "spectrum", "H2", "--n-max", "3", "--ell-max", "3", "--N", "5")
    _, second, _ = run(capsys, "spectrum", "H2", "--n-max", "3", "--ell-max", "3", "--N", "5")
    assert first == second


def test_spectrum_json_wraps_rows(capsys):
    code, out, _ = run(capsys, "spectrum", "H2", "--n-max", "1", "--format", "json")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["meta"]["molecule"] == "H2" and payload["meta"]["alpha"] == 1.4405
    assert len(payload["rows"]) == 2 and set(payload["rows"][0]) == {"n", "ell", "N", "lambda", "kappa", "energy_eV"}


def test_spectrum_unknown_molecule(capsys):
    code, out, err = run(capsys, "spectrum", "NOPE", "--n-max", "1")
    assert code == EXIT_USAGE
    assert out == ""
    assert "unknown molecule" in err


@pytest.mark.parametrize("argv", [
    ("spectrum", "H2", "--n-max", "-1"),
    ("spectrum", "H2", "--N", "1"),
    ("spectrum", "H2", "--precision", "30"),
])
def test_spectrum_invalid_ranges(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_spectrum_empty_table_warns(tmp_path, capsys):
    path = tmp_path / "weak.json"
    path.write_text(json.dumps([{"name": "weak", "D_eV": 1.0, "alpha": 4.0, "eps_eV": 1.0,
                                 "r0_angstrom": 1.0}]), encoding="utf-8")
    code, out, err = run(capsys, "--registry", str(path), "spectrum", "weak", "--n-max", "2", "--ell-max", "2")
    assert code == EXIT_OK
    assert parse_csv_rows(out) == []
    assert "no bound states" in err


def test_wavefunction_seven_dimensions(capsys):
    code, out, _ = run(capsys, "wavefunction", "H2", "--n", "0", "--ell", "0", "--N", "7")
    assert code == EXIT_OK
    assert "# lambda=2.5" in out.splitlines()
    rows = parse_csv_rows(out)
    assert list(rows[0]) == ["r", "y", "R"]
    assert len(rows) == 201


def test_wavefunction_first_excited_state_has_one_node(capsys):
    code, out, _ = run(capsys, "wavefunction", "H2", "--n", "1", "--samples", "1000")
    assert code == EXIT_OK
    values = [float(r["R"]) for r in parse_csv_rows(out)]
    signs = [v > 0 for v in values if v != 0]
    assert sum(1 for a, b in zip(signs, signs[1:]) if a != b) == 1


def test_wavefunction_rejects_zero_samples(capsys):
    code, _, err = run(capsys, "wavefunction", "H2", "--samples", "0")
    assert code == EXIT_USAGE
    assert "samples" in err


def test_wavefunction_reports_valid_range(capsys):
    code, _, err = run(capsys, "wavefunction", "H2", "--n", "17")
    assert code == EXIT_USAGE
    assert "valid n: 0..16" in err


def test_pekeris_single_alpha(capsys):
    code, out, _ = run(capsys, "pekeris", "--alpha", "1.4405")
    assert code == EXIT_OK
    rows = parse_csv_rows(out)
    assert list(rows[0]) == ["r", "exact", "pekeris", "rel_err"]
    assert float(rows[0]["r"]) == 0.0
    assert float(rows[0]["rel_err"]) <= 1e-14


def test_pekeris_two_blocks(capsys):
    code, out, _ = run(capsys, "pekeris", "--alpha", "2", "5", "--r-min", "0.15", "--r-max", "0.3",
                       "--samples", "2")
    assert code == EXIT_OK
    blocks = out.split("\n\n")
    assert len(blocks) == 2
    first, second = (parse_csv_rows(block) for block in blocks)
    assert float(second[0]["rel_err"]) > float(first[0]["rel_err"])


def test_pekeris_json_blocks(capsys):
    code, out, _ = run(capsys, "pekeris", "--alpha", "1", "2", "--format", "json")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert [b["meta"]["alpha"] for b in payload["blocks"]] == [1.0, 2.0]
    assert payload["meta"]["samples"] == 31


@pytest.mark.parametrize("argv", [
    ("pekeris", "--alpha", "1.4405", "--r-min", "-2"),
    ("pekeris", "--alpha", "0"),
])
def test_pekeris_rejects_bad_input(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == ""


def test_validate_small_sweep(capsys):
    code, out, err = run(capsys, "validate", "H2", "--n-max", "1", "--ell-max", "1", "--workers", "2")
    report = json.loads(out)
    assert code == EXIT_OK
    assert [(e["n"], e["ell"]) for e in report["rows"]] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert all(e["pass"] for e in report["rows"])
    assert report["summary"]["passed"] == 4
    assert report["summary"]["max_pekeris_gap"] <= 1e-6
    assert "✅" in err


def test_validate_ground_state_variants_agree(capsys):
    code, out, _ = run(capsys, "validate", "H2", "--n-max", "0", "--ell-max", "0")
    entry = json.loads(out)["rows"][0]
    assert code == EXIT_OK
    assert entry["exact_oracle_rel_gap"] <= 1e-6
    assert entry["pekeris_oracle_eV"] == pytest.approx(entry["exact_oracle_eV"], rel=1e-6)


def test_validate_failure_exit_code(capsys, monkeypatch):
    import morse_cli

    def failing(mol, n, ell, dimension_N=3, tol=1e-9):
        return {"n": n, "ell": ell, "N": dimension_N, "oracle_failed": True, "closed_form_eV": -1.0,
                "pekeris_oracle_eV": None, "pekeris_oracle_rel_gap": None,
                "exact_oracle_eV": None, "exact_oracle_rel_gap": None}

    monkeypatch.setattr(morse_cli, "compare_closed_form", failing)
    code, out, err = run(capsys, "validate", "H2", "--n-max", "0", "--ell-max", "0")
    assert code == EXIT_VALIDATION
    assert json.loads(out)["summary"]["oracle_failed"] == 1
    assert "oracle failed" in err


def test_validate_tolerance_failure(capsys, monkeypatch):
    import morse_cli

    def off_by_a_bit(mol, n, ell, dimension_N=3, tol=1e-9):
        closed = energy(mol, n, ell, dimension_N)
        return {"n": n, "ell": ell, "N": dimension_N, "oracle_failed": False, "closed_form_eV": closed,
                "pekeris_oracle_eV": closed * 1.001, "pekeris_oracle_rel_gap": 1e-3,
                "exact_oracle_eV": closed * 1.001, "exact_oracle_rel_gap": 1e-3}

    monkeypatch.setattr(morse_cli, "compare_closed_form", off_by_a_bit)
    code, out, _ = run(capsys, "validate", "H2", "--n-max", "1", "--ell-max", "0", "--tol", "1e-6")
    summary = json.loads(out)["summary"]
    assert code == EXIT_VALIDATION
    assert summary["failed"] == 2 and summary["oracle_failed"] == 0


def test_molecules_list(capsys):
    code, out, _ = run(capsys, "molecules", "list")
    assert code == EXIT_OK
    assert [r["name"] for r in parse_csv_rows(out)] == ["H2"]


def test_molecules_show(capsys, h2):
    code, out, _ = run(capsys, "molecules", "show", "H2")
    assert code == EXIT_OK
    assert json.loads(out) == molecule_to_dict(h2)


def test_molecules_add_lists_new_entries(tmp_path, capsys):
    path = tmp_path / "extra.json"
    path.write_text(json.dumps([{"name": "HX", "D_eV": 4.6, "alpha": 2.38, "eps_eV": 1.12e-3,
                                 "r0_angstrom": 1.2746}]), encoding="utf-8")
    saved = tmp_path / "saved.json"
    code, out, _ = run(capsys, "molecules", "add", str(path), "--save", str(saved))
    assert code == EXIT_OK
    assert [r["name"] for r in parse_csv_rows(out)] == ["H2", "HX"]
    assert [m["name"] for m in json.loads(saved.read_text(encoding="utf-8"))["molecules"]] == ["HX"]


def test_molecules_add_rejects_duplicate(tmp_path, capsys, h2):
    path = tmp_path / "dup.json"
    path.write_text(json.dumps([molecule_to_dict(h2)]), encoding="utf-8")
    code, out, err = run(capsys, "molecules", "add", str(path))
    assert code == EXIT_USAGE
    assert "duplicate" in err


def test_registry_from_environment(tmp_path, capsys, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps([{"name": "HX", "D_eV": 4.6, "alpha": 2.38, "eps_eV": 1.12e-3,
                                 "r0_angstrom": 1.2746}]), encoding="utf-8")
    monkeypatch.setenv(REGISTRY_ENV, str(path))
    code, out, _ = run(capsys, "spectrum", "HX", "--n-max", "0")
    assert code == EXIT_OK
    assert len(parse_csv_rows(out)) == 1


def test_broken_registry_file_is_usage_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "--registry", str(path), "molecules", "list")
    assert code == EXIT_USAGE
    assert "invalid JSON" in err


def test_handle_command_unknown(h2):
    cli = MorseSpectrumCLI()
    result = handle_command(cli, "plot", {})
    assert result == {"success": False, "error": "Unknown command: plot", "exit_code": EXIT_USAGE}


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out" / "spectrum.csv"
    code, out, _ = run(capsys, "spectrum", "H2", "--n-max", "1", "--output", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert len(parse_csv_rows(target.read_text(encoding="utf-8"))) == 2


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["spectrum"])
    assert info.value.code == EXIT_USAGE
