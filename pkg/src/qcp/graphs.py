"""Bipartite variable-value graphs, maximum matching, SCCs and edge removal.

Vertex numbering in the oriented graph: variables take ids ``0..nx-1`` and
value vertices ``nx..nx+nv-1``.  Edges of the undirected graph are identified
by ``(variable, value vertex)`` pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

NIL = -1


@dataclass(frozen=True)
class VariableValueGraph:
    labels: tuple[int, ...]             # domain value carried by each value vertex
    var_adj: tuple[tuple[int, ...], ...]
    val_adj: tuple[tuple[int, ...], ...]
    scope: tuple[int, ...] = ()

    @property
    def nx(self) -> int:
        return len(self.var_adj)

    @property
    def nv(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.var_adj)

    @property
    def n(self) -> int:
        return self.nx + self.nv

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, adj in enumerate(self.var_adj) for j in adj]

    @classmethod
    def from_edges(cls, nx: int, labels: Sequence[int], edges) -> "VariableValueGraph":
        var_adj = [[] for _ in range(nx)]
        val_adj = [[] for _ in labels]
        for i, j in edges:
            if j not in var_adj[i]:
                var_adj[i].append(j)
                val_adj[j].append(i)
        return cls(tuple(labels), tuple(map(tuple, var_adj)), tuple(map(tuple, val_adj)))


def build_value_graph(domains, scope: Sequence[int]) -> VariableValueGraph:
    """One value vertex per distinct value, one edge per (variable, value)."""
    labels = sorted({v for i in scope for v in domains[i]})
    index = {v: j for j, v in enumerate(labels)}
    edges = []
    for k, i in enumerate(scope):
        if not domains[i]:
            raise ValueError(f"empty domain for variable {i}")
        edges.extend((k, index[v]) for v in domains[i])
    g = VariableValueGraph.from_edges(len(scope), labels, edges)
    return VariableValueGraph(g.labels, g.var_adj, g.val_adj, tuple(scope))


@dataclass
class Matching:
    var_match: list[int]                # value vertex per variable, NIL if free
    nv: int
    phases: int = 0

    @property
    def size(self) -> int:
        return sum(1 for j in self.var_match if j != NIL)

    def val_match(self) -> list[int]:
        out = [NIL] * self.nv
        for i, j in enumerate(self.var_match):
            if j != NIL:
                out[j] = i
        return out

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.var_match) if j != NIL]

    def copy(self) -> "Matching":
        return Matching(list(self.var_match), self.nv, self.phases)


def max_matching_hk(g: VariableValueGraph) -> Matching:
    """Hopcroft-Karp: BFS layering then vertex-disjoint shortest augmenting paths."""
    nx, nv = g.nx, g.nv
    mu = [NIL] * nx
    mv = [NIL] * nv
    inf = nx + 1
    phases = 0
    while True:
        dist = [inf] * nx
        q = deque()
        for i in range(nx):
            if mu[i] == NIL:
                dist[i] = 0
                q.append(i)
        found = inf
        while q:
            i = q.popleft()
            if dist[i] >= found:
                continue
            for j in g.var_adj[i]:
                k = mv[j]
                if k == NIL:
                    found = min(found, dist[i] + 1)
                elif dist[k] == inf:
                    dist[k] = dist[i] + 1
                    q.append(k)
        if found == inf:
            break
        augmented = False
        ptr = [0] * nx
        for root in range(nx):
            if mu[root] != NIL:
                continue
            # iterative layered DFS
            stack = [root]
            path_vals: list[int] = []
            while stack:
                i = stack[-1]
                adj = g.var_adj[i]
                advanced = False
                while ptr[i] < len(adj):
                    j = adj[ptr[i]]
                    ptr[i] += 1
                    k = mv[j]
                    if k == NIL:
                        if dist[i] + 1 == found:
                            path_vals.append(j)
                            for x, y in zip(stack, path_vals):
                                mu[x] = y
                                mv[y] = x
                            stack = []
                            augmented = True
                            advanced = True
                            break
                    elif dist[k] == dist[i] + 1:
                        path_vals.append(j)
                        stack.append(k)
                        advanced = True
                        break
                if not advanced:
                    dist[i] = inf
                    stack.pop()
                    if path_vals:
                        path_vals.pop()
        phases += 1
        if not augmented:
            break
    return Matching(mu, nv, phases)


def verify_matching_maximum(g: VariableValueGraph, m: Matching) -> bool:
    """König check: build a vertex cover from alternating reachability.

    The cover has exactly ``|M|`` vertices iff the matching is maximum.
    """
    val_match = [NIL] * g.nv
    for i, j in m.pairs():
        if j not in g.var_adj[i]:
            raise ValueError(f"matched edge ({i}, {j}) not in graph")
        if val_match[j] != NIL:
            raise ValueError(f"value vertex {j} matched twice")
        val_match[j] = i
    seen_x = [False] * g.nx
    seen_v = [False] * g.nv
    q = deque(i for i in range(g.nx) if m.var_match[i] == NIL)
    for i in q:
        seen_x[i] = True
    while q:
        i = q.popleft()
        for j in g.var_adj[i]:
            if j == m.var_match[i] or seen_v[j]:
                continue
            seen_v[j] = True
            k = val_match[j]
            if k != NIL and not seen_x[k]:
                seen_x[k] = True
                q.append(k)
    cover = sum(1 for s in seen_x if not s) + sum(seen_v)
    return cover == m.size


# -- oriented graph and SCCs --------------------------------------------------

@dataclass(frozen=True)
class Digraph:
    out: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.out)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.out)


@dataclass(frozen=True)
class DirectedValueGraph(Digraph):
    nx: int = 0


def direct_graph(g: VariableValueGraph, m: Matching) -> DirectedValueGraph:
    """Matched edges point variable -> value, all others value -> variable."""
    out: list[list[int]] = [[] for _ in range(g.n)]
    for i, adj in enumerate(g.var_adj):
        for j in adj:
            if m.var_match[i] == j:
                out[i].append(g.nx + j)
            else:
                out[g.nx + j].append(i)
    return DirectedValueGraph(tuple(map(tuple, out)), g.nx)


@dataclass(frozen=True)
class SccMap:
    comp: tuple[int, ...]               # component id in 1..count per vertex
    count: int

    def partition(self) -> set[frozenset[int]]:
        groups: dict[int, set[int]] = {}
        for v, c in enumerate(self.comp):
            groups.setdefault(c, set()).add(v)
        return {frozenset(s) for s in groups.values()}


def tarjan_scc(g: Digraph) -> SccMap:
    n = g.n
    index = [NIL] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [0] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != NIL:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            adj = g.out[v]
            if pos < len(adj):
                work[-1] = (v, pos + 1)
                w = adj[pos]
                if index[w] == NIL:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                ncomp += 1
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp[u] = ncomp
                    if u == v:
                        break
    return SccMap(tuple(comp), ncomp)


def find_simple_paths(dg: DirectedValueGraph, m: Matching) -> set[tuple[int, int]]:
    """Directed edges reached by a simultaneous BFS from the free value vertices."""
    matched = {dg.nx + j for j in m.var_match if j != NIL}
    starts = [v for v in range(dg.nx, dg.n) if v not in matched]
    seen = set(starts)
    q = deque(starts)
    used = set()
    while q:
        u = q.popleft()
        for w in dg.out[u]:
            used.add((u, w))
            if w not in seen:
                seen.add(w)
                q.append(w)
    return used


def identify_edges(g: VariableValueGraph, m: Matching, used, scc: SccMap) -> list[tuple[int, int]]:
    """Edges outside M, outside E_used and crossing between components."""
    removed = []
    for i, adj in enumerate(g.var_adj):
        for j in adj:
            if m.var_match[i] == j:
                continue
            if (g.nx + j, i) in used:
                continue
            if scc.comp[i] == scc.comp[g.nx + j]:
                continue
            removed.append((i, j))
    return sorted(removed)


@dataclass
class RemoveEdgesTrace:
    directed: DirectedValueGraph
    used: set[tuple[int, int]]
    scc: SccMap
    removed: list[tuple[int, int]] = field(default_factory=list)


def remove_edges_trace(g: VariableValueGraph, m: Matching) -> RemoveEdgesTrace:
    if m.size != g.nx:
        raise ValueError("RemoveEdges requires a matching covering every variable")
    dg = direct_graph(g, m)
    used = find_simple_paths(dg, m)
    scc = tarjan_scc(dg)
    return RemoveEdgesTrace(dg, used, scc, identify_edges(g, m, used, scc))


def remove_edges_classical(g: VariableValueGraph, m: Matching) -> list[tuple[int, int]]:
    """Edges that belong to no maximum matching, sorted."""
    return remove_edges_trace(g, m).removed
