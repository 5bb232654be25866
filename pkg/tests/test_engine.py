import csv
import io
import json
import random

import pytest

from qcp.core import Constraint, Csp, check_assignment, make_domains
from qcp.engine import (
    CSV_FIELDS,
    QuantumBackend,
    SolveConfig,
    emit_report,
    las_vegas_filter,
    parse_mode,
    parse_search,
    solve,
)
from qcp.graphs import build_value_graph, max_matching_hk, verify_matching_maximum
from qcp.models import load_sudoku, roundrobin, sudoku
from qcp.qsim import CostModel, QueryLedger, SubroutineResult, q_matching_sim

from oracles import enumerate_solutions, random_csp

KINDS = ("alldifferent", "ne", "lt", "alldifferent_except_0")


def example4():
    return Csp(("a", "b", "c"), make_domains([[1, 2]] * 3), (Constraint("alldifferent", (0, 1, 2)),))


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(mode="bounded")
    with pytest.raises(ValueError):
        SolveConfig(mode="bounded", max_quantum_calls=-1)
    with pytest.raises(ValueError):
        SolveConfig(search="bfs")
    with pytest.raises(ValueError):
        SolveConfig(search="chunky", chi=0)


def test_parse_flags():
    assert parse_mode("bounded:7") == ("bounded", 7)
    assert parse_mode("exact") == ("exact", None)
    assert parse_search("chunky:3") == {"search": "chunky", "chi": 3}
    assert parse_search("depth:2") == {"search": "depth", "depth": 2}
    with pytest.raises(ValueError):
        parse_search("chunky")
    with pytest.raises(ValueError):
        parse_mode("fast")


def test_example4_unsat_at_root():
    rep = solve(example4())
    assert rep.status == "unsat" and rep.nodes == 1


def test_paper_sudoku_solves():
    csp = sudoku(load_sudoku("paper"))
    rep = solve(csp)
    assert rep.status == "sat" and check_assignment(csp, rep.assignment)


def test_cross_backend_identical_pruning():
    csp = roundrobin(6)
    a = solve(csp, SolveConfig(trace=True))
    b = solve(csp, SolveConfig(backend="qsim", trace=True))
    assert a.status == b.status and a.assignment == b.assignment
    assert a.trace == b.trace
    assert b.ledger["quantum_calls"] > 0 and b.ledger["fallbacks"] == 0


def test_soundness_and_mode_equivalence():
    rng = random.Random(17)
    for _ in range(60):
        csp = random_csp(rng, rng.randint(2, 4), rng.randint(2, 4), KINDS)
        truth = next(enumerate_solutions(csp), None) is not None
        for cfg in (SolveConfig(), SolveConfig(backend="qsim"),
                    SolveConfig(search="qwalk"), SolveConfig(search="chunky", chi=3),
                    SolveConfig(search="depth", depth=2),
                    SolveConfig(search="qwalk", alpha="resistance")):
            rep = solve(csp, cfg)
            assert (rep.status == "sat") == truth
            if truth:
                assert check_assignment(csp, rep.assignment)


def test_node_limit_unknown():
    csp = Csp(tuple("abcd"), make_domains([[1, 2, 3, 4]] * 4),
              (Constraint("ne", (0, 1)), Constraint("eq", (3,), value=9)))
    rep = solve(csp, SolveConfig(limit_nodes=1))
    assert rep.status in ("unsat", "unknown")
    csp = Csp(tuple("abcde"), make_domains([[1, 2, 3]] * 5), (Constraint("circuit", (0, 1, 2, 3, 4)),))
    rep = solve(csp, SolveConfig(limit_nodes=3))
    assert rep.status == "unknown" and rep.nodes == 3


def test_las_vegas_paths():
    g = build_value_graph(make_domains([[1, 2], [1, 2], [2, 3, 4]]), (0, 1, 2))
    for p, expect_fallbacks in ((0.0, 0), (1.0, 1)):
        model = CostModel(fail_prob=p)
        led = QueryLedger()
        m = las_vegas_filter(lambda: q_matching_sim(g, model, led, model.rng()),
                             lambda m: verify_matching_maximum(g, m),
                             lambda: max_matching_hk(g), led)
        assert led.fallbacks == expect_fallbacks and m.size == 3


def test_las_vegas_verifier_reject_runs_fallback():
    led = QueryLedger()
    out = las_vegas_filter(lambda: SubroutineResult("bad"), lambda x: x == "good",
                           lambda: "good", led)
    assert out == "good" and led.fallbacks == 1


def test_bounded_mode_respects_budget():
    csp = roundrobin(6)
    for k in (0, 3, 10):
        rep = solve(csp, SolveConfig(backend="qsim", mode="bounded", max_quantum_calls=k,
                                     cost=CostModel(fail_prob=0.2)))
        assert rep.ledger["quantum_calls"] <= k


def test_heuristic_mode_sat_is_verified():
    csp = roundrobin(4)
    for seed in range(10):
        rep = solve(csp, SolveConfig(backend="qsim", mode="heuristic",
                                     cost=CostModel(fail_prob=0.3, seed=seed)))
        if rep.status == "sat":
            assert check_assignment(csp, rep.assignment)


def test_quantum_backend_exact_mode_correct_under_failures():
    csp = roundrobin(6)
    rep = solve(csp, SolveConfig(backend="qsim", cost=CostModel(fail_prob=0.5, seed=2)))
    assert rep.status == "sat" and rep.ledger["fallbacks"] > 0
    assert check_assignment(csp, rep.assignment)


def test_report_json_round_trip_and_csv_header():
    rep = solve(roundrobin(4), SolveConfig(backend="qsim"))
    doc = json.loads(emit_report(rep, "json"))
    assert doc == json.loads(json.dumps(rep.to_dict()))
    assert doc["report_version"] == 1
    rows = list(csv.DictReader(io.StringIO(emit_report(rep, "csv", instance="rr4"))))
    assert tuple(rows[0]) == CSV_FIELDS and rows[0]["status"] == "sat"
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


def test_charges_deterministic_across_seeds_at_p0():
    csp = roundrobin(4)
    a = solve(csp, SolveConfig(backend="qsim", cost=CostModel(seed=1)))
    b = solve(csp, SolveConfig(backend="qsim", cost=CostModel(seed=2)))
    assert a.ledger == b.ledger


def test_quantum_backend_bounded_falls_back_after_budget():
    g = build_value_graph(make_domains([[1, 2], [1, 2]]), (0, 1))
    be = QuantumBackend(CostModel(), mode="bounded", max_quantum_calls=1)
    be.matching(g)
    be.matching(g)
    assert be.ledger.quantum_calls == 1 and be.ledger.classical_steps > 0
