import csv
import io
import json

import pytest

from qcp.cli import main
from qcp.engine import CSV_FIELDS


@pytest.fixture
def rr4(tmp_path):
    path = tmp_path / "rr4.json"
    assert main(["model", "roundrobin", "--params", '{"n": 4}', "--out", str(path)]) == 0
    return path


def test_solve_json(rr4, capsys):
    assert main(["solve", str(rr4)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "sat" and doc["report_version"] == 1


@pytest.mark.parametrize("search", ["dfs", "qwalk", "chunky:3", "depth:2"])
def test_solve_searches_qsim_csv(rr4, capsys, search):
    argv = ["solve", str(rr4), "--backend", "qsim", "--search", search,
            "--alpha", "resistance", "--fail-prob", "0", "--seed", "3", "--report", "csv"]
    assert main(argv) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert tuple(rows[0]) == CSV_FIELDS and rows[0]["status"] == "sat"


def test_solve_bounded_mode(rr4, capsys):
    assert main(["solve", str(rr4), "--backend", "qsim", "--mode", "bounded:2",
                 "--fail-prob", "0.1"]) == 0
    assert json.loads(capsys.readouterr().out)["ledger"]["quantum_calls"] <= 2


def test_tsp_objective(tmp_path, capsys):
    path = tmp_path / "tsp.json"
    main(["model", "tsp", "--params", '{"n": 4, "seed": 2}', "--out", str(path)])
    assert main(["solve", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "sat" and doc["objective"] is not None


def test_limit_nodes_exit_code(tmp_path, capsys):
    path = tmp_path / "s.json"
    main(["model", "sudoku", "--params", '{"clues": [[3, 3, 1], [3, 5, 2], [2, 6, 3]]}',
          "--out", str(path)])
    assert main(["solve", str(path), "--limit-nodes", "2"]) == 2
    assert json.loads(capsys.readouterr().out)["status"] == "unknown"


def test_bench_csv(capsys):
    assert main(["bench", "--report", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["instance"] for r in rows] == ["sudoku-paper", "roundrobin-4", "roundrobin-6", "tsp-5"]
    assert all(r["status"] == "sat" for r in rows)


def test_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"variables": [{"name": "a", "domain": [1]}], '
                   '"constraints": [{"kind": "alldifferent", "scope": ["zz"]}]}')
    assert main(["solve", str(bad)]) == 1
    assert main(["solve", str(bad), "--mode", "warp"]) == 1
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["solve", str(bad), "--backend", "gpu"])
