"""Backtracking search with pluggable filtering backends and reporting."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .core import Csp, Domains, branch, check_assignment
from .filtering import CLASSICAL, INFEASIBLE
from .graphs import (
    Matching,
    VariableValueGraph,
    max_matching_hk,
    remove_edges_classical,
    verify_matching_maximum,
)
from .propagation import FEASIBLE, propagate
from .qsim import CostModel, QueryLedger, SubroutineResult, q_matching_sim, q_remove_edges_sim
from .qwalk import (
    MAX_DENSE,
    TreeTooLarge,
    bounded_depth_search,
    build_tree,
    chunky_search,
    find_marked,
)

REPORT_VERSION = 1
MODES = ("exact", "bounded", "heuristic")
SEARCHES = ("dfs", "qwalk", "chunky", "depth")
ALPHA_POLICY = {"L": "montanaro", "resistance": "jw"}


@dataclass
class SolveConfig:
    backend: str = "classical"           # classical | qsim
    mode: str = "exact"                  # exact | bounded | heuristic
    max_quantum_calls: int | None = None # bounded mode only
    search: str = "dfs"                  # dfs | qwalk | chunky | depth
    chi: int = 8
    depth: int = 1
    alpha: str = "L"
    strategy: str = "assign"
    cost: CostModel = field(default_factory=CostModel)
    limit_nodes: int | None = None
    time_limit: float | None = None
    trace: bool = False

    def __post_init__(self):
        if self.backend not in ("classical", "qsim"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "bounded" and (self.max_quantum_calls is None or self.max_quantum_calls < 0):
            raise ValueError("bounded mode needs max_quantum_calls >= 0")
        if self.search not in SEARCHES:
            raise ValueError(f"unknown search {self.search!r}")
        if self.alpha not in ALPHA_POLICY:
            raise ValueError(f"unknown alpha policy {self.alpha!r}")
        if self.chi < 1 or self.depth < 1:
            raise ValueError("chunk size and depth must be >= 1")


def parse_mode(text: str) -> tuple[str, int | None]:
    """``exact``, ``heuristic`` or ``bounded:<k>``."""
    if text.startswith("bounded:"):
        return "bounded", int(text.split(":", 1)[1])
    if text in ("exact", "heuristic"):
        return text, None
    raise ValueError(f"bad mode {text!r}")


def parse_search(text: str) -> dict:
    """``dfs``, ``qwalk``, ``chunky:<chi>`` or ``depth:<L*>``."""
    if text in ("dfs", "qwalk"):
        return {"search": text}
    kind, _, arg = text.partition(":")
    if kind == "chunky" and arg:
        return {"search": "chunky", "chi": int(arg)}
    if kind == "depth" and arg:
        return {"search": "depth", "depth": int(arg)}
    raise ValueError(f"bad search {text!r}")


# -- quantum integration ------------------------------------------------------

def las_vegas_filter(subcall: Callable[[], SubroutineResult], verify: Callable[[object], bool],
                     classical_fallback: Callable[[], object], ledger: QueryLedger):
    """Quantum attempt, verified; the classical routine reruns on rejection."""
    res = subcall()
    if verify(res.payload):
        return res.payload
    ledger.fallbacks += 1
    return classical_fallback()


class QuantumBackend:
    """Filtering backend that routes matching and edge removal through qsim.

    exact: matching is Las Vegas (verified by a König cover, classical rerun on
    rejection); RemoveEdges runs classically since a failed SCC search has no
    cheap certificate.  bounded: quantum subroutines unverified until
    ``max_quantum_calls`` is spent, classical afterwards.  heuristic: always
    quantum, never verified.
    """

    def __init__(self, model: CostModel, ledger: QueryLedger | None = None, mode: str = "exact",
                 max_quantum_calls: int | None = None, rng=None):
        self.model = model
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.mode = mode
        self.max_quantum_calls = max_quantum_calls
        self.rng = rng if rng is not None else model.rng()

    def _quantum_allowed(self) -> bool:
        if self.mode != "bounded":
            return True
        return self.ledger.quantum_calls < self.max_quantum_calls

    def _classical_matching(self, g: VariableValueGraph) -> Matching:
        self.ledger.classical_steps += g.m + g.n
        return max_matching_hk(g)

    def matching(self, g: VariableValueGraph) -> Matching:
        if not self._quantum_allowed():
            return self._classical_matching(g)
        call = lambda: q_matching_sim(g, self.model, self.ledger, self.rng)
        if self.mode == "exact":
            return las_vegas_filter(call, lambda m: verify_matching_maximum(g, m),
                                    lambda: self._classical_matching(g), self.ledger)
        return call().payload

    def remove_edges(self, g: VariableValueGraph, m: Matching) -> list[tuple[int, int]]:
        if self.mode == "exact" or not self._quantum_allowed():
            self.ledger.classical_steps += g.m + g.n
            return remove_edges_classical(g, m)
        return q_remove_edges_sim(g, m, self.model, self.ledger, self.rng).payload


def make_backend(config: SolveConfig, ledger: QueryLedger):
    if config.backend == "classical":
        return CLASSICAL
    return QuantumBackend(config.cost, ledger, config.mode, config.max_quantum_calls)


# -- search -------------------------------------------------------------------

@dataclass
class SolveReport:
    status: str                          # sat | unsat | unknown
    assignment: list[int] | None
    nodes: int
    ledger: dict
    filter_calls: dict
    wall_time: float
    search: str = "dfs"
    backend: str = "classical"
    objective: float | None = None
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["report_version"] = REPORT_VERSION
        return out


class _Limit(Exception):
    pass


def _fixed(domains: Domains) -> list[int]:
    return [d[0] for d in domains]


def _dfs(csp: Csp, config: SolveConfig, backend, counts: Counter, trace: list,
         accept: Callable[[list[int]], bool] | None, deadline: float | None):
    nodes = 0
    stack: list[Domains] = [csp.domains]
    while stack:
        if config.limit_nodes is not None and nodes >= config.limit_nodes:
            raise _Limit(nodes)
        if deadline is not None and time.perf_counter() > deadline:
            raise _Limit(nodes)
        dom = stack.pop()
        nodes += 1
        res = propagate(csp, dom, backend=backend, counts=counts)
        if config.trace:
            trace.append((res.flag, sorted(
                (i, v) for i, d in enumerate(dom) for v in d if v not in res.domains[i])))
        if res.flag == INFEASIBLE:
            continue
        if res.flag == FEASIBLE:
            a = _fixed(res.domains)
            if check_assignment(csp, a) and (accept is None or accept(a)):
                return a, nodes
            continue
        stack.extend(reversed(branch(res.domains, config.strategy)))
    return None, nodes


def _walk(csp: Csp, config: SolveConfig, backend, ledger: QueryLedger):
    max_nodes = min(config.limit_nodes or MAX_DENSE, MAX_DENSE)
    try:
        tree = build_tree(csp, config.strategy, backend, max_nodes=max_nodes)
    except TreeTooLarge as exc:
        raise _Limit(max_nodes) from exc
    policy = ALPHA_POLICY[config.alpha]
    if config.search == "qwalk":
        hit = find_marked(tree, policy, ledger)
    elif config.search == "chunky":
        hit = chunky_search(tree, config.chi, policy, ledger)
    else:
        hit, queue = None, [tree.root]
        while queue and hit is None:
            sols, frontier = bounded_depth_search(tree, queue.pop(0), config.depth,
                                                  ledger, config.cost)
            hit = sols[0] if sols else None
            queue.extend(frontier)
    if hit is None:
        return None, len(tree)
    res = propagate(csp, tree.nodes[hit].D, backend=backend)
    return _fixed(res.domains), len(tree)


def solve(csp: Csp, config: SolveConfig | None = None,
          accept: Callable[[list[int]], bool] | None = None) -> SolveReport:
    """Run the configured search; ``accept`` rejects otherwise valid leaves (dfs only)."""
    config = config or SolveConfig()
    ledger = QueryLedger()
    backend = make_backend(config, ledger)
    counts: Counter = Counter()
    trace: list = []
    start = time.perf_counter()
    deadline = start + config.time_limit if config.time_limit else None
    status = "unknown"
    assignment = None
    try:
        if config.search == "dfs":
            assignment, nodes = _dfs(csp, config, backend, counts, trace, accept, deadline)
        else:
            assignment, nodes = _walk(csp, config, backend, ledger)
        if assignment is not None and not check_assignment(csp, assignment):
            assignment = None                 # only reachable with unverified quantum filtering
        status = "sat" if assignment is not None else "unsat"
    except _Limit as exc:
        nodes = exc.args[0]
    calls = {f"{k}:{csp.constraints[k].kind}": counts[k] for k in sorted(counts)}
    return SolveReport(status, assignment, nodes, ledger.snapshot(), calls,
                       time.perf_counter() - start, config.search, config.backend, trace=trace)


def tour_cost(costs: Sequence[Sequence[float]], succ: Sequence[int]) -> float:
    """Cost of a successor-encoded tour (1-based successors)."""
    return sum(costs[i][s - 1] for i, s in enumerate(succ[:len(costs)]))


def minimize(csp: Csp, objective: Callable[[list[int]], float],
             config: SolveConfig | None = None) -> SolveReport:
    """Iterated satisfiability with a tightening bound on ``objective``."""
    config = config or SolveConfig(search="dfs")
    if config.search != "dfs":
        raise ValueError("optimisation runs on dfs search only")
    best: SolveReport | None = None
    bound = math.inf
    total_nodes = 0
    ledger_sum: Counter = Counter()
    while True:
        rep = solve(csp, config, accept=lambda a: objective(a) < bound)
        total_nodes += rep.nodes
        ledger_sum.update(rep.ledger)
        if rep.status != "sat":
            break
        best = rep
        bound = objective(rep.assignment)
    final = best if best is not None else rep
    final.nodes = total_nodes
    final.ledger = dict(ledger_sum)
    if best is not None:
        final.objective = bound
        if rep.status == "unknown":
            final.status = "unknown"
    return final


# -- reports ------------------------------------------------------------------

LEDGER_FIELDS = tuple(QueryLedger().snapshot())
CSV_FIELDS = ("report_version", "instance", "status", "search", "backend", "nodes",
              "objective", "wall_time") + LEDGER_FIELDS + ("assignment",)


def emit_report(report: SolveReport, fmt: str = "json", instance: str = "",
                header: bool = True) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True)
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    if header:
        w.writeheader()
    row = {k: report.ledger.get(k, 0) for k in LEDGER_FIELDS}
    row.update(report_version=REPORT_VERSION, instance=instance, status=report.status,
               search=report.search, backend=report.backend, nodes=report.nodes,
               objective="" if report.objective is None else report.objective,
               wall_time=f"{report.wall_time:.6f}",
               assignment="" if report.assignment is None
               else " ".join(map(str, report.assignment)))
    w.writerow(row)
    return buf.getvalue()
