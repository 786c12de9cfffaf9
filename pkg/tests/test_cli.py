import json
import subprocess
import sys

import jsonschema
import pytest

from billiards.cli import parse_config, run

NUM = {"type": "number"}
VEC = {"type": "array", "items": NUM}

SOLVE_SCHEMA = {
    "type": "object",
    "required": ["surface", "n", "count", "bound", "generic", "trajectories"],
    "properties": {
        "surface": {"type": "object", "required": ["kind", "m", "axes"]},
        "n": {"type": "integer", "minimum": 1},
        "count": {"type": "integer", "minimum": 0},
        "bound": {"type": "integer", "minimum": 2},
        "generic": {"type": "boolean"},
        "passed": {"type": "boolean"},
        "trajectories": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["points", "value", "residual", "morse_index", "degenerate", "epsilon_product"],
                "properties": {
                    "points": {"type": "array", "items": VEC},
                    "value": NUM,
                    "residual": NUM,
                    "morse_index": {"type": "integer", "minimum": 0},
                    "degenerate": {"type": "boolean"},
                    "epsilon_product": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    },
}

COHOMOLOGY_SCHEMA = {
    "type": "object",
    "required": ["m", "n", "field", "dims", "poincare", "products", "verdicts", "cup_length", "cat_lower_bound"],
    "properties": {
        "m": {"type": "integer"},
        "n": {"type": "integer"},
        "field": {"enum": ["q", "f2", "f3", "f5"]},
        "dims": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "poincare": {"type": "array", "items": {"type": "integer"}},
        "products": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer"}, {"type": "integer"}, {"type": "string"}],
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "verdicts": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "cup_length": {"type": "integer"},
        "cat_lower_bound": {"type": "integer"},
    },
}


def run_cli(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "verify", "--m", "3", "--n", "3")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, COHOMOLOGY_SCHEMA)
    assert all(rep["verdicts"].values())


def test_solve_sphere(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--surface", "sphere", "--m", "2", "--A", "1,0,0", "--B", "0,1,0",
        "--n", "2", "--starts", "200", "--seed", "7",
    )
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, SOLVE_SCHEMA)
    assert rep["count"] == 3 and rep["bound"] == 3


def test_solve_ellipsoid_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run_cli(
        capsys, "solve", "--surface", "ellipsoid", "--axes", "1.0,1.2,0.9", "--A", "1,0,0", "--B", "0,0,0.9",
        "--n", "1", "--starts", "30", "--out", str(out),
    )
    assert code == 0 and stdout == ""
    rep = json.loads(out.read_text())
    jsonschema.validate(rep, SOLVE_SCHEMA)
    assert rep["count"] >= 2
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]


@pytest.mark.parametrize(
    "argv",
    [
        ["cohomology", "--m", "0", "--n", "2"],
        ["cohomology", "--m", "3", "--n", "0"],
        ["cohomology", "--m", "3", "--n", "2", "--field", "f4"],
        ["solve", "--A", "1,0,0", "--B", "0,1,0", "--n", "2"],
        ["solve", "--m", "2", "--A", "1,0,0", "--B", "0,1,0", "--n", "2", "--starts", "0"],
        ["solve", "--m", "2", "--A", "1,x,0", "--B", "0,1,0", "--n", "2"],
        ["solve", "--m", "2", "--A", "2,0,0", "--B", "0,1,0", "--n", "2"],
        ["oracle", "--n", "2"],
        ["oracle", "--phi", "4.0", "--n", "2"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "usage" in err or "error" in err


def test_verdict_failure_exit_one(capsys):
    # a single start cannot find the two trajectories the bound demands
    code, out, _ = run_cli(capsys, "solve", "--m", "2", "--A", "1,0,0", "--B", "0,1,0", "--n", "3", "--starts", "1")
    rep = json.loads(out)
    assert rep["count"] < rep["bound"]
    assert code == 1


def test_oracle(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--phi", "1.5707963", "--n", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["count"] == 4 and len(rep["trajectories"][0]["points"]) == 3


def test_oracle_endpoints(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--A", "1,0,0,0", "--B", "0,0,0,1", "--n", "1")
    assert code == 0 and json.loads(out)["surface"]["m"] == 3


def test_cohomology_products_flag(capsys):
    _, plain, _ = run_cli(capsys, "cohomology", "--m", "2", "--n", "4", "--field", "f3")
    _, full, _ = run_cli(capsys, "cohomology", "--m", "2", "--n", "4", "--field", "f3", "--products")
    assert json.loads(plain)["products"] == []
    prods = {(i, j): c for i, j, c in json.loads(full)["products"]}
    assert prods[(2, 2)] == "2" and prods[(1, 1)] == "0"


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "verify", "--m", "2", "--n", "2", "--format", "text")
    assert code == 0
    assert "poincare_ok=True" in out


def test_byte_identical_reports(tmp_path, monkeypatch):
    argv = ["solve", "--m", "3", "--A", "1,0,0,0", "--B", "0,0.6,0.8,0", "--n", "2", "--starts", "40", "--seed", "9"]
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    monkeypatch.setenv("BILLIARDS_THREADS", "3")
    assert run(argv + ["--out", str(c)]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_cohomology_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["cohomology", "--m", "3", "--n", "4", "--products", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_parse_config():
    cfg = parse_config(["cohomology", "--m", "3", "--n", "5", "--field", "f2", "--products", "--out", "x.json"])
    assert cfg.command == "cohomology" and cfg.out == "x.json"
    assert cfg.params == {"m": 3, "n": 5, "field": "f2", "products": True}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "billiards", "cohomology", "--m", "4", "--n", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["dims"]["3"] == 1
