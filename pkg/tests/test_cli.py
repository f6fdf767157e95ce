"""CLI contract: subcommands, exit codes, JSON schema, determinism."""

import json
import subprocess
import sys

import pytest

from pdmlab.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestCatalogCommand:
    def test_list(self, capsys):
        code, out = run_cli(["catalog", "list"], capsys)
        assert code == 0
        assert out.count("integrals:") == 18

    def test_verify_entry(self, capsys):
        code, out = run_cli(["catalog", "verify", "--entry", "17"], capsys)
        assert code == 0
        assert "catalog.entry17" in out
        assert "failed=0" in out

    def test_verify_all_json(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _ = run_cli(
            ["catalog", "verify", "--all", "--jobs", "4", "--json", str(out_path)],
            capsys,
        )
        assert code == 0
        payload = json.loads(out_path.read_text())
        ids = [s["id"] for s in payload["sections"]]
        assert len(ids) == 18  # one section per catalog row
        assert all(i.startswith("catalog.entry") for i in ids)
        assert payload["passed"] is True

    def test_verify_all_with_worked_families(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _ = run_cli(
            ["catalog", "verify", "--all", "--worked", "--jobs", "4",
             "--json", str(out_path)],
            capsys,
        )
        assert code == 0
        ids = [s["id"] for s in json.loads(out_path.read_text())["sections"]]
        assert sum(1 for i in ids if i.startswith("worked.")) == 4

    def test_bad_args(self):
        with pytest.raises(SystemExit) as exc:
            main(["catalog", "verify"])
        assert exc.value.code == 2


class TestAlgebraCommand:
    def test_c3(self, capsys):
        code, out = run_cli(["algebra", "--check", "c3"], capsys)
        assert code == 0
        assert out.count("proved") >= 45

    def test_so4(self, capsys):
        code, out = run_cli(["algebra", "--check", "so4"], capsys)
        assert code == 0
        assert "failed=0" in out

    def test_subalgebras(self, capsys):
        code, out = run_cli(["algebra", "--subalgebras"], capsys)
        assert code == 0
        assert "subalgebra.m10.1" in out
        assert "subalgebra.m7.1" in out


class TestSpectrumCommand:
    def test_so4_table(self, capsys):
        code, out = run_cli(
            ["spectrum", "--system", "so4", "--l", "0", "--count", "3"], capsys
        )
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith("so4,")]
        assert len(lines) == 3
        for line in lines:
            assert float(line.split(",")[-1]) < 5e-3
        assert "1,9,9,1" in out and "3,41,41,1" in out

    def test_so4_l2_lowest(self, capsys):
        code, out = run_cli(
            ["spectrum", "--system", "so4", "--l", "2", "--count", "1"], capsys
        )
        assert code == 0
        row = [l for l in out.splitlines() if l.startswith("so4,")][0]
        assert abs(float(row.split(",")[3]) - 37.0) < 0.5

    def test_scale_residual_line(self, capsys):
        code, out = run_cli(
            ["spectrum", "--system", "scale", "--kappa", "0", "--etilde", "1",
             "--omega", "2"], capsys
        )
        assert code == 0
        assert out.splitlines()[1].startswith("scale,0,")

    def test_invalid_grid(self):
        with pytest.raises(SystemExit) as exc:
            main(["spectrum", "--system", "so4", "--grid", "notanint"])
        assert exc.value.code == 2


class TestCasimirCommand:
    def test_so4(self, capsys):
        code, out = run_cli(["casimir", "--system", "so4"], capsys)
        assert code == 0
        assert "C1 == (H - 9)/4" in out

    def test_so13_carries_window_annotation(self, capsys):
        code, out = run_cli(["casimir", "--system", "so13"], capsys)
        assert code == 0
        assert "window derivations" in out


class TestTransformCommand:
    def test_inversion_entry_18(self, capsys):
        code, out = run_cli(["transform", "--kind", "inversion", "--entry", "18"], capsys)
        assert code == 0
        assert "weight_exponent = -3" in out
        assert "f' = mu" in out and "V' = nu" in out

    def test_shift_entry_10(self, capsys):
        code, out = run_cli(
            ["transform", "--kind", "shift", "--nu", "0,0,1", "--entry", "10"], capsys
        )
        assert code == 0
        assert "f' = (F (+ x3 1))" in out

    def test_form_error_exit_code(self, capsys):
        code, out = run_cli(
            ["transform", "--kind", "inversion", "--entry", "18", "--weight", "0"],
            capsys,
        )
        assert code == 1
        assert "obstruction" in out


class TestExprCommand:
    def test_round_trip(self, capsys):
        code, out = run_cli(["expr", "parse", "(+ x1 (* 2 x2))"], capsys)
        assert code == 0
        assert out.strip() == "(+ x1 (* 2 x2))"

    def test_normalize(self, capsys):
        code, out = run_cli(["expr", "normalize", "(+ (* x1 x2) (* -1 x2 x1) 5)"], capsys)
        assert code == 0
        assert out.strip() == "5"

    def test_parse_error(self, capsys):
        assert main(["expr", "parse", "((("]) == 2


class TestReportContract:
    def test_json_validates_against_schema(self, tmp_path, capsys):
        import pathlib

        import jsonschema

        out_path = tmp_path / "r.json"
        run_cli(["casimir", "--system", "so4", "--json", str(out_path)], capsys)
        payload = json.loads(out_path.read_text())
        schema_path = pathlib.Path(__file__).resolve().parent.parent / "docs" / "report.schema.json"
        jsonschema.validate(payload, json.loads(schema_path.read_text()))

    def test_same_seed_byte_identical(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        run_cli(["catalog", "verify", "--entry", "4", "--seed", "7", "--json", str(a)], capsys)
        run_cli(["catalog", "verify", "--entry", "4", "--seed", "7", "--json", str(b)], capsys)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_changes_samples(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        run_cli(["catalog", "verify", "--entry", "4", "--seed", "1", "--json", str(a)], capsys)
        run_cli(["catalog", "verify", "--entry", "4", "--seed", "2", "--json", str(b)], capsys)
        pa = json.loads(a.read_text())
        pb = json.loads(b.read_text())
        assert pa["seed"] != pb["seed"]

    def test_policy_echoed(self, tmp_path, capsys):
        out_path = tmp_path / "r.json"
        run_cli(
            ["catalog", "verify", "--entry", "1", "--points", "17", "--tol", "1e-8",
             "--json", str(out_path)], capsys,
        )
        payload = json.loads(out_path.read_text())
        assert payload["policy"]["points"] == 17
        assert payload["policy"]["tol"] == 1e-8


def test_module_entrypoint_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "pdmlab", "expr", "normalize", "(+ x1 x1)"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "(* 2 x1)"
