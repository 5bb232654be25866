"""Query-charged simulations of the Grover-structured subroutines.

Nothing here evolves amplitudes.  Each subroutine computes its answer
classically and charges the ledger the query count its quantum
counterpart would need; a per-search failure probability lets callers
exercise the error paths.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .graphs import (
    NIL,
    Digraph,
    Matching,
    SccMap,
    VariableValueGraph,
    direct_graph,
    find_simple_paths,
    identify_edges,
    max_matching_hk,
)


def clog2(x: float) -> int:
    """Ceiling of log2, never below zero."""
    return 0 if x <= 1 else math.ceil(math.log2(x))


@dataclass
class CostModel:
    grover_constant: float = math.pi / 4
    fail_prob: float = 0.0
    seed: int = 0
    repeat: bool = True                  # repeat each search ceil(log2 n) times

    def __post_init__(self):
        if not 0.0 <= self.fail_prob <= 1.0:
            raise ValueError("fail_prob must lie in [0, 1]")

    def rep(self, n: int) -> int:
        return max(1, clog2(n)) if self.repeat else 1

    @staticmethod
    def qram_query_cost(n: int) -> int:
        return max(1, clog2(n))

    @staticmethod
    def qram_init_cost(m: int, n: int) -> int:
        return m * max(1, clog2(n))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class QueryLedger:
    oracle_queries: int = 0
    qram_init: int = 0
    qram_queries: int = 0
    classical_steps: int = 0
    walk_calls: int = 0
    searches: int = 0
    searches_failed: int = 0
    quantum_calls: int = 0
    fallbacks: int = 0

    def charge(self, queries: int, n: int) -> None:
        self.oracle_queries += queries
        self.qram_queries += queries * CostModel.qram_query_cost(n)

    def snapshot(self) -> dict:
        return asdict(self)

    def delta(self, before: dict) -> dict:
        now = self.snapshot()
        return {k: now[k] - before[k] for k in now}


@dataclass
class SubroutineResult:
    payload: object
    failed: bool = False
    delta: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)


def grover_charge(model: CostModel, N: int, t: int, n: int) -> int:
    return math.ceil(model.grover_constant * math.sqrt(N / max(t, 1))) * model.rep(n)


def grover_sim(N: int, predicate: Callable[[int], bool], model: CostModel,
               ledger: QueryLedger, rng: np.random.Generator, n: int | None = None
               ) -> SubroutineResult:
    """Search ``range(N)`` for an item satisfying ``predicate``.

    ``n`` sets the problem size for the repetition and QRAM log factors
    (defaults to ``N``).
    """
    if N < 1:
        raise ValueError("search space must be non-empty")
    n = N if n is None else n
    before = ledger.snapshot()
    marked = [i for i in range(N) if predicate(i)]
    ledger.charge(grover_charge(model, N, len(marked), n), n)
    ledger.searches += 1
    if model.fail_prob > 0 and rng.random() < model.fail_prob:
        ledger.searches_failed += 1
        item = int(rng.integers(N))
        return SubroutineResult(item, True, ledger.delta(before))
    item = int(marked[rng.integers(len(marked))]) if marked else None
    return SubroutineResult(item, False, ledger.delta(before), {"marked": len(marked)})


def qmin_find_sim(N: int, key: Callable[[int], int], accept: Callable[[int], bool],
                  model: CostModel, ledger: QueryLedger, rng: np.random.Generator,
                  n: int | None = None) -> SubroutineResult:
    """Threshold-descent minimum finding over items passing ``accept``.

    Ties are broken toward the lowest index.  A failed round that returns a
    non-improving item ends the descent early.
    """
    before = ledger.snapshot()
    failed = False
    first = grover_sim(N, accept, model, ledger, rng, n)
    failed |= first.failed
    best = first.payload
    if best is None or not accept(best):
        return SubroutineResult(None, failed, ledger.delta(before))
    rounds = 1
    while True:
        threshold = (key(best), best)
        res = grover_sim(N, lambda i: accept(i) and (key(i), i) < threshold,
                         model, ledger, rng, n)
        rounds += 1
        failed |= res.failed
        w = res.payload
        if w is None or not (accept(w) and (key(w), w) < threshold):
            break
        best = w
    return SubroutineResult(best, failed, ledger.delta(before), {"rounds": rounds})


def q_find_scc(g: Digraph, model: CostModel, ledger: QueryLedger,
               rng: np.random.Generator | None = None) -> SubroutineResult:
    """Tarjan's bookkeeping with the two neighbour scans done by charged searches.

    Runs with an explicit frame stack so deep DFS trees do not hit the
    interpreter recursion limit; control flow is otherwise the recursive one.
    """
    rng = rng if rng is not None else model.rng()
    before = ledger.snapshot()
    n = g.n
    ledger.qram_init += CostModel.qram_init_cost(g.m, n)
    index = [NIL] * n
    low = [NIL] * n
    on_stack = [False] * n
    comp = [NIL] * n
    stack: list[int] = []
    counter = 0
    failed = False

    def undiscovered(v):
        nonlocal failed
        adj = g.out[v]
        if not adj:
            return None
        res = grover_sim(len(adj), lambda i: index[adj[i]] == NIL, model, ledger, rng, n)
        failed |= res.failed
        return None if res.payload is None else adj[res.payload]

    def min_on_stack(v):
        nonlocal failed
        adj = g.out[v]
        if not adj:
            return None
        res = qmin_find_sim(len(adj), lambda i: index[adj[i]], lambda i: on_stack[adj[i]],
                            model, ledger, rng, n)
        failed |= res.failed
        return None if res.payload is None else adj[res.payload]

    def open_frame(v):
        nonlocal counter
        index[v] = low[v] = counter
        counter += 1
        stack.append(v)
        on_stack[v] = True
        ledger.classical_steps += 1

    for root in range(n):
        if index[root] != NIL:
            continue
        open_frame(root)
        frames = [root]
        while frames:
            v = frames[-1]
            w = undiscovered(v)
            if w is not None and index[w] == NIL:
                open_frame(w)
                frames.append(w)
                continue
            # no undiscovered neighbour left: close v
            u = min_on_stack(v)
            if u is not None and on_stack[u]:
                low[v] = min(low[v], index[u])
            if low[v] == index[v]:
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp[u] = low[v]
                    ledger.classical_steps += 1
                    if u == v:
                        break
            frames.pop()
            if frames:
                parent = frames[-1]
                low[parent] = min(low[parent], low[v])
    # relabel lowlink ids to a contiguous 1..N_s range
    relabel: dict[int, int] = {}
    ids = []
    for c in comp:
        if c not in relabel:
            relabel[c] = len(relabel) + 1
        ids.append(relabel[c])
    return SubroutineResult(SccMap(tuple(ids), len(relabel)), failed, ledger.delta(before))


def q_matching_charge(g: VariableValueGraph, model: CostModel) -> int:
    """ceil(sqrt|X|) phases, each ceil(sqrt(|V||E|)) queries, times rep^2."""
    rep = model.rep(g.n)
    return math.ceil(math.sqrt(g.nx)) * math.ceil(math.sqrt(g.nv * g.m)) * rep * rep


def q_matching_sim(g: VariableValueGraph, model: CostModel, ledger: QueryLedger,
                   rng: np.random.Generator | None = None) -> SubroutineResult:
    """Maximum matching with the phase-structured quantum charge.

    An injected failure drops the last matched edge, so the payload is a
    non-maximum matching whenever the true maximum is non-empty.
    """
    rng = rng if rng is not None else model.rng()
    before = ledger.snapshot()
    ledger.qram_init += CostModel.qram_init_cost(g.m, g.n)
    ledger.charge(q_matching_charge(g, model), g.n)
    ledger.quantum_calls += 1
    m = max_matching_hk(g)
    failed = bool(model.fail_prob > 0 and rng.random() < model.fail_prob)
    if failed:
        ledger.searches_failed += 1
        m = m.copy()
        last = max((i for i, j in enumerate(m.var_match) if j != NIL), default=None)
        if last is not None:
            m.var_match[last] = NIL
    return SubroutineResult(m, failed, ledger.delta(before))


def q_remove_edges_sim(g: VariableValueGraph, m: Matching, model: CostModel,
                       ledger: QueryLedger, rng: np.random.Generator | None = None
                       ) -> SubroutineResult:
    """Quantum analog of RemoveEdges.

    Classical BFS for E_used, charged SCC search, then a per-variable search
    for removable incident edges charged ceil(c sqrt(delta_v max(r_v, 1))) rep^2
    each.  ``detail["edge_search"]`` is the unrounded part over vertices with
    removals (the quantity bounded by c sqrt(|E||R|) rep^2) and
    ``detail["edge_certify"]`` the rounded charge of vertices with none.
    """
    if m.size != g.nx:
        raise ValueError("RemoveEdges requires a matching covering every variable")
    rng = rng if rng is not None else model.rng()
    before = ledger.snapshot()
    ledger.quantum_calls += 1
    dg = direct_graph(g, m)
    used = find_simple_paths(dg, m)
    ledger.classical_steps += len(used)
    scc_res = q_find_scc(dg, model, ledger, rng)
    scc = scc_res.payload
    removed = identify_edges(g, m, used, scc)
    rep = model.rep(g.n)
    c = model.grover_constant
    per_vertex = [0] * g.nx
    for i, _ in removed:
        per_vertex[i] += 1
    search = 0.0
    certify = 0
    charge = 0
    for i, adj in enumerate(g.var_adj):
        if not adj:
            continue
        r = per_vertex[i]
        charge += math.ceil(c * math.sqrt(len(adj) * max(r, 1))) * rep * rep
        if r:
            search += c * math.sqrt(len(adj) * r) * rep * rep
        else:
            certify += math.ceil(c * math.sqrt(len(adj))) * rep * rep
    ledger.charge(charge, g.n)
    failed = scc_res.failed
    if model.fail_prob > 0:
        # a failed per-vertex search misses that vertex's removable edges
        missed = set()
        for i, adj in enumerate(g.var_adj):
            if adj and rng.random() < model.fail_prob:
                failed = True
                ledger.searches_failed += 1
                missed.add(i)
        removed = [e for e in removed if e[0] not in missed]
    detail = {"used": used, "scc": scc, "edge_search": search, "edge_certify": certify}
    return SubroutineResult(removed, failed, ledger.delta(before), detail)


def estimate_node_qubits(node, L: int, B: int, nvars: int, nvals: int, m: int,
                         domain_sizes) -> int:
    """Qubits to store one search node (depth, branch history, domains, removals)."""
    if min(L, B, nvars, nvals, m) < 1 or len(domain_sizes) != nvars:
        raise ValueError("parameters must be positive and one size per variable")
    val_bits = clog2(nvals)
    depth = clog2(L + 1)
    history = L * clog2(B + 1)
    doms = sum(clog2(d + 1) + d * val_bits for d in domain_sizes)
    removals = L * (clog2(m + 1) + m * val_bits)
    return depth + history + doms + removals
