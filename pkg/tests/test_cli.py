import json
import random

import pytest

from intersective_lab.cli import main, parse_poly, render_poly
from intersective_lab.errors import PolyParseError
from intersective_lab.intpoly import IntPoly


def run_cli(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, "--out", str(out)])
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, doc


def test_parse_examples():
    assert parse_poly("x^2").coeffs == (0, 0, 1)
    assert parse_poly("x^2 - 1").coeffs == (-1, 0, 1)
    assert parse_poly("3x^3+x").coeffs == (0, 1, 0, 3)
    assert parse_poly("-2*x^4 + x^2 - 7").coeffs == (-7, 0, 1, 0, -2)
    assert parse_poly("42").coeffs == (42,)
    assert parse_poly("x").coeffs == (0, 1)
    assert parse_poly("  - x ").coeffs == (0, -1)
    assert parse_poly("x^2+x^2").coeffs == (0, 0, 2)


def test_parse_errors_carry_position():
    for text in ("", "x^", "3*", "x**2", "+", "x^2 1", "a+1"):
        with pytest.raises(PolyParseError) as ei:
            parse_poly(text)
        assert ei.value.position >= 0


def test_render_round_trip():
    rng = random.Random(26)
    for _ in range(200):
        coeffs = [rng.randint(-99, 99) for _ in range(rng.randint(1, 6))]
        p = IntPoly(coeffs)
        assert parse_poly(render_poly(p)) == p or p.is_zero()
    assert render_poly(IntPoly([4, -10, 6])) == "6x^2-10x+4"
    assert render_poly(IntPoly([])) == "0"


def test_check_intersective_cli(tmp_path):
    code, doc = run_cli(
        tmp_path, "check-intersective", "--poly", "x^2+1", "--bound", "100"
    )
    assert code == 0
    assert doc["result"] == {"verdict": "not_intersective", "witness": 3}
    assert doc["manifest"]["subcommand"] == "check-intersective"
    assert doc["schema"] == "intersective-lab/1"


def test_aux_cli(tmp_path):
    code, doc = run_cli(tmp_path, "aux", "--poly", "x^2-1", "--d", "6")
    assert code == 0
    res = doc["result"]
    assert res["r_d"] == -5 and res["lambda"] == 6 and res["h_d"] == "6x^2-10x+4"


def test_maxset_cli(tmp_path):
    code, doc = run_cli(tmp_path, "maxset", "--poly", "x^2", "--N", "5", "--exact")
    assert code == 0
    assert doc["result"]["size"] == 2


def test_nesting_cli(tmp_path):
    code, doc = run_cli(
        tmp_path, "nesting", "--poly", "x^2-1", "--d", "1", "--q", "6", "--n-max", "50"
    )
    assert code == 0
    assert doc["result"]["s"] == -5


def test_arcs_cli(tmp_path):
    code, doc = run_cli(tmp_path, "arcs", "--N", "1000", "--K", "2", "--Q", "4")
    assert code == 0
    assert doc["result"]["count"] == 6
    code, doc = run_cli(
        tmp_path, "arcs", "--N", "1000", "--K", "2", "--Q", "10", "--gamma", "1/3"
    )
    assert doc["result"] == {"classification": "major", "a": 1, "q": 3}


def test_energy_cli(tmp_path):
    code, doc = run_cli(
        tmp_path, "energy", "--elems", "1/5,2/5,3/5,4/5", "--m", "2", "--delta", "0"
    )
    assert code == 0
    assert doc["result"]["E"] == 52


def test_sieve_cli_with_csv(tmp_path):
    csv_path = tmp_path / "rows.csv"
    out = tmp_path / "r.json"
    code = main(
        [
            "sieve", "--poly", "x^2", "--Y", "3", "--X", "12",
            "--out", str(out), "--csv", str(csv_path),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["result"]["count"] == 4
    header = csv_path.read_text().splitlines()[0]
    assert header == "p,gamma,modulus,j"


def test_usage_error_exit_codes(tmp_path, capsys):
    assert main(["aux", "--poly", "x^%", "--d", "2"]) == 2
    err = capsys.readouterr().err
    assert "grammar" in err
    # domain error: nesting with prime out of range
    assert main(["aux", "--poly", "x^2", "--d", "101", "--bound", "50"]) == 1


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("INTERSECTIVE_LAB_THREADS", "4")
    out = tmp_path / "env.json"
    main(["arcs", "--N", "100", "--K", "1", "--Q", "3", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert doc["manifest"]["threads"] == 4


def test_result_determinism(tmp_path):
    docs = []
    for i, threads in enumerate(("1", "8")):
        out = tmp_path / f"scan{i}.json"
        main(
            [
                "expsum-scan", "--poly", "x^3", "--q-max", "60", "--Y", "60",
                "--squarefree", "--threads", threads, "--out", str(out),
            ]
        )
        docs.append(json.loads(out.read_text()))
    r1, r2 = (json.dumps(d["result"], sort_keys=True) for d in docs)
    assert r1 == r2
