"""Constraint propagators and the exhaustive domain-consistency oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .core import Constraint, Domains, constraint_holds, removed_pairs
from .graphs import (
    Matching,
    VariableValueGraph,
    build_value_graph,
    max_matching_hk,
    remove_edges_classical,
)

INFEASIBLE = 0
UNKNOWN = "*"

BRUTE_FORCE_BUDGET = 10**7


@dataclass
class FilterOutcome:
    domains: Domains
    flag: object                         # 0 or "*"
    removed: frozenset = field(default_factory=frozenset)

    @property
    def failed(self) -> bool:
        return self.flag == INFEASIBLE


class ClassicalBackend:
    """Matching and edge removal run directly on the classical kernels."""

    def matching(self, g: VariableValueGraph) -> Matching:
        return max_matching_hk(g)

    def remove_edges(self, g: VariableValueGraph, m: Matching) -> list[tuple[int, int]]:
        return remove_edges_classical(g, m)


CLASSICAL = ClassicalBackend()


def _fail(domains: Domains) -> FilterOutcome:
    return FilterOutcome(domains, INFEASIBLE)


def _restrict(domains: Domains, keep: dict[int, set[int]]) -> FilterOutcome:
    """Intersect the listed variables' domains with ``keep``."""
    new = list(domains)
    for var, allowed in keep.items():
        new[var] = tuple(v for v in new[var] if v in allowed)
    out = tuple(new)
    removed = removed_pairs(domains, out)
    if any(not out[v] for v in keep):
        return FilterOutcome(out, INFEASIBLE, removed)
    return FilterOutcome(out, UNKNOWN, removed)


def _regin(g: VariableValueGraph, backend) -> list[tuple[int, int]] | None:
    """Unsupported edges of ``g``, or None when no matching covers the variables."""
    if g.nv < g.nx:
        return None
    m = backend.matching(g)
    if m.size < g.nx:
        return None
    return backend.remove_edges(g, m)


def filter_alldifferent(domains: Domains, scope, backend=None) -> FilterOutcome:
    backend = backend or CLASSICAL
    scope = tuple(scope)
    if any(not domains[i] for i in scope):
        return _fail(domains)
    g = build_value_graph(domains, scope)
    bad = _regin(g, backend)
    if bad is None:
        return _fail(domains)
    keep = {i: set(domains[i]) for i in scope}
    for k, j in bad:
        keep[scope[k]].discard(g.labels[j])
    return _restrict(domains, keep)


def filter_alldifferent_except0(domains: Domains, scope, backend=None) -> FilterOutcome:
    """Value 0 is expanded into one value vertex per scoped variable."""
    backend = backend or CLASSICAL
    scope = tuple(scope)
    if any(not domains[i] for i in scope):
        return _fail(domains)
    nonzero = sorted({v for i in scope for v in domains[i] if v != 0})
    labels = nonzero + [0] * len(scope)
    index = {v: j for j, v in enumerate(nonzero)}
    zero0 = len(nonzero)
    edges = []
    for k, i in enumerate(scope):
        for v in domains[i]:
            if v == 0:
                edges.extend((k, zero0 + c) for c in range(len(scope)))
            else:
                edges.append((k, index[v]))
    g = VariableValueGraph.from_edges(len(scope), labels, edges)
    bad = _regin(g, backend)
    if bad is None:
        return _fail(domains)
    survivors = {i: set() for i in scope}
    bad = set(bad)
    for k, adj in enumerate(g.var_adj):
        for j in adj:
            if (k, j) not in bad:
                survivors[scope[k]].add(g.labels[j])
    return _restrict(domains, survivors)


def _gcc_graphs(domains: Domains, scope, bound: dict, n: int):
    """Upper graph (value v copied min(u_v, n) times, copies contiguous) and the
    lower-bound copies list."""
    present = sorted({v for i in scope for v in domains[i]})
    labels, copies = [], {}
    for v in present:
        hi = min(bound.get(v, (0, n))[1], n)
        copies[v] = range(len(labels), len(labels) + hi)
        labels.extend([v] * hi)
    edges = [(k, c) for k, i in enumerate(scope) for v in domains[i] for c in copies[v]]
    upper = VariableValueGraph.from_edges(n, labels, edges)
    low_labels = [v for v, (lo, _) in bound.items() for _ in range(lo)]
    return upper, low_labels


def _gcc_feasible(domains: Domains, scope, bound: dict, backend) -> bool:
    """X saturated under the upper bounds and every lower-bound copy saturated.

    Two such matchings combine into one meeting both (Mendelsohn-Dulmage),
    so the test is exact.
    """
    n = len(scope)
    if any(not domains[i] for i in scope):
        return False
    upper, low_labels = _gcc_graphs(domains, scope, bound, n)
    if upper.nv < n or backend.matching(upper).size < n:
        return False
    if low_labels:
        low_edges = [(c, k) for c, v in enumerate(low_labels)
                     for k, i in enumerate(scope) if v in domains[i]]
        lower = VariableValueGraph.from_edges(len(low_labels), list(scope), low_edges)
        if backend.matching(lower).size < len(low_labels):
            return False
    return True


def filter_gcc(domains: Domains, scope, values, bounds, backend=None) -> FilterOutcome:
    """Two-matching feasibility test, upper-graph pruning, lower-bound probing.

    Values not listed in ``values`` are treated as unbounded.  Pruning runs
    the alldifferent rule on the upper-bound graph; when some lower bound is
    positive, each surviving pair is then probed with the exact feasibility
    test so lower bounds prune too.
    """
    backend = backend or CLASSICAL
    scope = tuple(scope)
    n = len(scope)
    if any(not domains[i] for i in scope):
        return _fail(domains)
    bound = dict(zip(values, bounds))
    if sum(lo for lo, _ in bounds) > n:
        return _fail(domains)
    if not _gcc_feasible(domains, scope, bound, backend):
        return _fail(domains)
    upper, _ = _gcc_graphs(domains, scope, bound, n)
    bad = set(_regin(upper, backend))
    survivors = {i: set() for i in scope}
    for k, adj in enumerate(upper.var_adj):
        for j in adj:
            if (k, j) not in bad:
                survivors[scope[k]].add(upper.labels[j])
    out = _restrict(domains, survivors)
    if out.failed or not any(lo for lo, _ in bounds):
        return out
    doms = list(out.domains)
    for i in dict.fromkeys(scope):
        if len(doms[i]) < 2:
            continue
        keep = []
        for v in doms[i]:
            probe = list(doms)
            probe[i] = (v,)
            if _gcc_feasible(tuple(probe), scope, bound, backend):
                keep.append(v)
        doms[i] = tuple(keep)
    final = tuple(doms)
    flag = INFEASIBLE if any(not final[i] for i in scope) else UNKNOWN
    return FilterOutcome(final, flag, removed_pairs(domains, final))


def filter_inverse(domains: Domains, scope_x, scope_y, backend=None) -> FilterOutcome:
    """Channel x_i = j <=> y_j = i, then prune edges in no perfect matching."""
    backend = backend or CLASSICAL
    xs, ys = tuple(scope_x), tuple(scope_y)
    n = len(xs)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if (j + 1) in domains[xs[i]] and (i + 1) in domains[ys[j]]
    ]
    g = VariableValueGraph.from_edges(n, list(range(1, n + 1)), edges)
    keep: dict[int, set[int]] = {}
    for var in xs + ys:
        keep.setdefault(var, set(domains[var]))
    bad = _regin(g, backend)
    if bad is None:
        return _fail(domains)
    bad = set(bad)
    sx = [set() for _ in range(n)]
    sy = [set() for _ in range(n)]
    for i, j in edges:
        if (i, j) not in bad:
            sx[i].add(j + 1)
            sy[j].add(i + 1)
    for i in range(n):
        keep[xs[i]] &= sx[i]
        keep[ys[i]] &= sy[i]
    return _restrict(domains, keep)


def _filter_unary(domains: Domains, c: Constraint) -> FilterOutcome:
    (var,) = c.scope
    if c.kind == "eq":
        allowed = {c.value}
    elif c.kind == "neq":
        allowed = set(domains[var]) - {c.value}
    else:
        allowed = {v for v in domains[var] if v <= c.value}
    return _restrict(domains, {var: allowed})


def _filter_binary(domains: Domains, c: Constraint) -> FilterOutcome:
    a, b = c.scope
    da, db = domains[a], domains[b]
    if not da or not db:
        return _fail(domains)
    if c.kind == "lt":
        keep = {a: {v for v in da if v < db[-1]}, b: {v for v in db if v > da[0]}}
    elif c.kind == "le":
        keep = {a: {v for v in da if v <= db[-1]}, b: {v for v in db if v >= da[0]}}
    else:
        keep = {a: set(da), b: set(db)}
        if len(db) == 1:
            keep[a].discard(db[0])
        if len(da) == 1:
            keep[b].discard(da[0])
    if a == b:
        keep = {a: keep[a] & keep[b]}
    return _restrict(domains, keep)


def _filter_checker(domains: Domains, c: Constraint) -> FilterOutcome:
    """Constraints without a propagator are only evaluated once fixed."""
    scoped = c.variables()
    if any(not domains[i] for i in scoped):
        return _fail(domains)
    if all(len(domains[i]) == 1 for i in scoped):
        assignment = [d[0] if len(d) == 1 else 0 for d in domains]
        if not constraint_holds(c, assignment):
            return _fail(domains)
    return FilterOutcome(domains, UNKNOWN)


def filter_constraint(domains: Domains, c: Constraint, backend=None) -> FilterOutcome:
    k = c.kind
    if k == "alldifferent":
        return filter_alldifferent(domains, c.scope, backend)
    if k == "alldifferent_except_0":
        return filter_alldifferent_except0(domains, c.scope, backend)
    if k == "gcc":
        return filter_gcc(domains, c.scope, c.values, c.bounds, backend)
    if k == "inverse":
        return filter_inverse(domains, c.scope, c.scope_y, backend)
    if k in ("eq", "neq", "leq"):
        return _filter_unary(domains, c)
    if k in ("lt", "le", "ne"):
        return _filter_binary(domains, c)
    return _filter_checker(domains, c)


def brute_force_dc(domains: Domains, c: Constraint) -> FilterOutcome:
    """Remove every scoped (variable, value) pair with no satisfying support."""
    scoped = list(dict.fromkeys(c.variables()))
    size = math.prod(len(domains[i]) for i in scoped)
    if size > BRUTE_FORCE_BUDGET:
        raise ValueError(f"enumeration of {size} tuples exceeds budget")
    support = {i: set() for i in scoped}
    assignment = [0] * len(domains)
    for combo in itertools.product(*(domains[i] for i in scoped)):
        for i, v in zip(scoped, combo):
            assignment[i] = v
        if constraint_holds(c, assignment):
            for i, v in zip(scoped, combo):
                support[i].add(v)
    return _restrict(domains, support)
