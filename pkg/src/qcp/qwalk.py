"""Explicit backtracking trees and dense walk operators over their node basis.

Phase estimation is replaced by an exact eigendecomposition: a tree has a
marked node iff the root state overlaps the 1-eigenspace of W_B W_A(alpha).
Walk-operator calls are still charged to a ledger using the query counts
the phase-estimation based algorithms would need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .core import Csp, Domains, branch, removed_pairs
from .filtering import INFEASIBLE, UNKNOWN
from .propagation import FEASIBLE, check_only, propagate
from .qsim import CostModel, QueryLedger, clog2

EIGEN_WINDOW = 1e-9
DEFAULT_TOLERANCE = 1e-6
MAX_DENSE = 512


class TreeTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class TreeNode:
    l: int
    b: tuple                             # 1-based branch index per level, "*" if unset
    D: Domains
    R: tuple                             # frozenset of removed (var, value) per level


@dataclass
class SearchTree:
    parent: list[int]
    children: list[list[int]]
    beta: list[object]
    nodes: list[TreeNode | None] = field(default_factory=list)
    origin: list[int] = field(default_factory=list)
    L: int = 0                           # branching-history length (depth bound)

    def __post_init__(self):
        if not self.origin:
            self.origin = list(range(len(self.parent)))
        self.depth = [0] * len(self.parent)
        for v in self.bfs_order():
            for c in self.children[v]:
                self.depth[c] = self.depth[v] + 1

    def __len__(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return self.parent.index(-1)

    @property
    def marked(self) -> list[bool]:
        return [b == FEASIBLE for b in self.beta]

    @property
    def height(self) -> int:
        return max(self.depth)

    def bfs_order(self) -> list[int]:
        order = [self.parent.index(-1)]
        k = 0
        while k < len(order):
            order.extend(self.children[order[k]])
            k += 1
        return order

    def dfs_order(self) -> list[int]:
        order, stack = [], [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return order

    def subtree(self, v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while self.parent[path[-1]] != -1:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def induced(self, keep: Sequence[int], beta=None) -> "SearchTree":
        """Tree on ``keep`` (parent-closed up to one root), ids renumbered.

        ``origin`` of the result maps back to this tree's original ids.
        """
        keep = sorted(set(keep), key=lambda v: (self.depth[v], v))
        new = {v: k for k, v in enumerate(keep)}
        parent = [new.get(self.parent[v], -1) for v in keep]
        if parent.count(-1) != 1:
            raise ValueError("induced node set must be connected")
        children = [[new[c] for c in self.children[v] if c in new] for v in keep]
        b = [self.beta[v] for v in keep] if beta is None else [beta[v] for v in keep]
        nodes = [self.nodes[v] for v in keep] if self.nodes else []
        return SearchTree(parent, children, b, nodes, [self.origin[v] for v in keep], self.L)

    @classmethod
    def from_parents(cls, parents: Sequence[int], marked: Sequence[bool] = (),
                     beta=None) -> "SearchTree":
        n = len(parents)
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parents):
            if p >= 0:
                children[p].append(v)
        if beta is None:
            marked = list(marked) or [False] * n
            beta = []
            for v in range(n):
                if marked[v]:
                    beta.append(FEASIBLE)
                elif children[v]:
                    beta.append(UNKNOWN)
                else:
                    beta.append(INFEASIBLE)
        tree = cls(list(parents), children, list(beta))
        tree.L = tree.height
        return tree


def depth_bound(csp: Csp, strategy: str) -> int:
    if strategy == "assign":
        return csp.n
    return sum(max(len(d) - 1, 0) for d in csp.domains)


def build_tree(csp: Csp, strategy: str = "assign", backend=None,
               max_nodes: int = 4096) -> SearchTree:
    """Propagate-then-branch expansion, infeasible nodes kept as leaves.

    ``backend="none"`` skips filtering and only checks fixed constraints.
    """
    L = max(depth_bound(csp, strategy), 1)
    root = TreeNode(0, (UNKNOWN,) * L, csp.domains, (frozenset(),) * L)
    nodes, parent, children, beta = [root], [-1], [[]], []
    k = 0
    while k < len(nodes):
        node = nodes[k]
        if backend == "none":
            res = check_only(csp, node.D)
        else:
            res = propagate(csp, node.D, backend=backend)
        beta.append(res.flag)
        if res.flag == UNKNOWN:
            for c, dom in enumerate(branch(res.domains, strategy), start=1):
                if len(nodes) >= max_nodes:
                    raise TreeTooLarge(f"tree exceeds {max_nodes} nodes")
                b = list(node.b)
                b[node.l] = c
                R = list(node.R)
                R[node.l] = removed_pairs(node.D, dom)
                nodes.append(TreeNode(node.l + 1, tuple(b), dom, tuple(R)))
                parent.append(k)
                children.append([])
                children[k].append(len(nodes) - 1)
        k += 1
    return SearchTree(parent, children, beta, nodes, L=L)


# -- walk operator ------------------------------------------------------------

@dataclass
class WalkOperator:
    matrix: np.ndarray
    alpha: float


def _reflect_star(W: np.ndarray, s: int, kids: list[int], weight: float) -> None:
    idx = [s] + kids
    psi = np.array([1.0] + [math.sqrt(weight)] * len(kids))
    psi /= np.linalg.norm(psi)
    W[np.ix_(idx, idx)] = np.eye(len(idx)) - 2.0 * np.outer(psi, psi)


def walk_unitary(tree: SearchTree, alpha: float) -> WalkOperator:
    """W_B W_A(alpha) assembled from per-star reflections."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    T = len(tree)
    if T > MAX_DENSE:
        raise TreeTooLarge(f"{T} nodes is too large for dense walk operators")
    r = tree.root
    marked = tree.marked
    WA = np.eye(T)
    WB = np.eye(T)
    for s in range(T):
        if marked[s]:
            continue
        kids = tree.children[s]
        if tree.depth[s] % 2 == 0:
            _reflect_star(WA, s, kids, alpha if s == r else 1.0)
        else:
            _reflect_star(WB, s, kids, 1.0)
    W = WB @ WA
    err = np.linalg.norm(W.T @ W - np.eye(T), 2)
    if err > 1e-10:
        raise ArithmeticError(f"walk operator not unitary (error {err:.2e})")
    return WalkOperator(W, alpha)


def one_eigenspace(W: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical 1-eigenspace."""
    T, Z = scipy.linalg.schur(W.astype(complex), output="complex")
    lam = np.diag(T)
    sel = np.abs(lam - 1.0) < EIGEN_WINDOW
    return Z[:, sel]


def root_overlap(tree: SearchTree, alpha: float) -> float:
    """Squared norm of the root state's projection onto the 1-eigenspace."""
    basis = one_eigenspace(walk_unitary(tree, alpha).matrix)
    if basis.shape[1] == 0:
        return 0.0
    return float(np.sum(np.abs(basis[tree.root, :]) ** 2))


def effective_resistance(tree: SearchTree) -> float:
    """Root-to-marked-set resistance with a unit resistor on every edge."""
    marked = tree.marked
    res: dict[int, float] = {}
    for v in reversed(tree.bfs_order()):
        if marked[v]:
            res[v] = 0.0
            continue
        cond = sum(1.0 / (1.0 + res[c]) for c in tree.children[v] if res[c] != math.inf)
        res[v] = 1.0 / cond if cond > 0 else math.inf
    out = res[tree.root]
    if out == math.inf:
        raise ValueError("tree has no marked node")
    return out


def choose_alpha(tree: SearchTree, policy: str = "montanaro") -> float:
    """``montanaro``: alpha = depth; ``jw``: exact effective resistance.

    The resistance is undefined without a marked node and zero for a marked
    root; both cases fall back to the depth.
    """
    L = max(tree.height, 1)
    if policy in ("montanaro", "L"):
        return float(L)
    if policy in ("jw", "resistance"):
        if not any(tree.marked):
            return float(L)
        r = effective_resistance(tree)
        return r if r > 0 else float(L)
    raise ValueError(f"unknown alpha policy {policy!r}")


def detection_calls(T: int, L: int) -> int:
    return math.ceil(math.sqrt(T * max(L, 1))) * max(1, clog2(T))


def detect_marked(tree: SearchTree, alpha: float | None = None,
                  tolerance: float = DEFAULT_TOLERANCE, ledger: QueryLedger | None = None,
                  policy: str = "montanaro", size_bound: tuple[int, int] | None = None
                  ) -> tuple[bool, int]:
    """Spectral test on the root state; charges use the actual (T, L) unless
    ``size_bound`` supplies (T_UB, L_UB)."""
    if not 0 < tolerance < 0.5:
        raise ValueError("tolerance must lie in (0, 0.5)")
    if alpha is None:
        alpha = choose_alpha(tree, policy)
    overlap = root_overlap(tree, alpha)
    T, L = size_bound if size_bound else (len(tree), tree.height)
    calls = detection_calls(T, L)
    if ledger is not None:
        ledger.walk_calls += calls
    return overlap > tolerance, calls


def find_marked(tree: SearchTree, alpha_policy: str = "montanaro",
                ledger: QueryLedger | None = None,
                tolerance: float = DEFAULT_TOLERANCE) -> int | None:
    """Classical descent guided by subtree detection; returns an original node id."""
    found, _ = detect_marked(tree, ledger=ledger, policy=alpha_policy, tolerance=tolerance)
    if not found:
        return None
    cur = tree.root
    marked = tree.marked
    while not marked[cur]:
        for c in tree.children[cur]:
            sub = tree.induced(tree.subtree(c))
            hit, _ = detect_marked(sub, ledger=ledger, policy=alpha_policy,
                                   tolerance=tolerance)
            if hit:
                cur = c
                break
        else:
            return None
    return tree.origin[cur]


# -- chunked search -----------------------------------------------------------

@dataclass
class ChunkSpec:
    tau: int
    tau2: int
    path_lo: list[int]                   # u(tau): root path to the tau-th DFS node
    path_hi: list[int]                   # u(tau2)
    nodes: list[int]                     # chunk nodes in DFS order
    rank: dict[int, int]
    size: dict[int, int]
    tree: SearchTree

    def child_range(self, v: int) -> tuple[int, int]:
        """1-based (first, last) branch indices of v kept in the chunk.

        Children outside the range are cut; ``(1, 0)`` means no children.
        """
        kids = self.tree.children[v]
        inside = [
            c for c, u in enumerate(kids, start=1)
            if self.rank[u] <= self.tau2 and self.rank[u] + self.size[u] - 1 > self.tau
        ]
        return (inside[0], inside[-1]) if inside else (1, 0)

    def num_children(self, v: int) -> int:
        lo, hi = self.child_range(v)
        return hi - lo + 1

    def subtree(self) -> SearchTree:
        return self.tree.induced(self.nodes)


def _ranks(tree: SearchTree):
    order = tree.dfs_order()
    rank = {v: k + 1 for k, v in enumerate(order)}
    size = {}
    for v in reversed(order):
        size[v] = 1 + sum(size[c] for c in tree.children[v])
    return order, rank, size


def chunk_spec(tree: SearchTree, tau: int, tau2: int) -> ChunkSpec:
    """Nodes ranked (tau, tau2] in DFS order plus their paths to the root."""
    T = len(tree)
    if not 0 <= tau < tau2:
        raise ValueError("need 0 <= tau < tau2")
    if tau2 > T:
        raise ValueError(f"tau2={tau2} exceeds tree size {T}")
    order, rank, size = _ranks(tree)
    keep = set(order[tau:tau2])
    keep.update(tree.path_to_root(order[tau]))
    nodes = [v for v in order if v in keep]
    lo = tree.path_to_root(order[tau - 1]) if tau > 0 else []
    hi = tree.path_to_root(order[tau2 - 1])
    return ChunkSpec(tau, tau2, lo, hi, nodes, rank, size, tree)


def prefix_num_children(tree: SearchTree, path: Sequence[int], v: int) -> int:
    """Child count of v in the first-tau subtree fixed by the path u(tau).

    Zero at the path's last node, the next path node's branch index on the
    path, and the full count elsewhere.
    """
    if not path:
        return 0
    if v == path[-1]:
        return 0
    if v in path:
        nxt = path[path.index(v) + 1]
        return tree.children[v].index(nxt) + 1
    return len(tree.children[v])


def iter_chunks(tree: SearchTree, chi: int):
    if chi < 1:
        raise ValueError("chunk size must be >= 1")
    T = len(tree)
    for tau in range(0, T, chi):
        yield chunk_spec(tree, tau, min(tau + chi, T))


def chunk_charges(chi: int, L: int, T: int) -> tuple[int, int]:
    rep = max(1, clog2(T))
    L = max(L, 1)
    return (math.ceil(math.sqrt((chi + L) * L)) * rep,
            math.ceil(math.sqrt((chi + L) * L ** 3)) * rep)


def chunky_search(tree: SearchTree, chi: int, alpha_policy: str = "montanaro",
                  ledger: QueryLedger | None = None) -> int | None:
    """Search chunk by chunk in DFS order and stop at the first marked node."""
    L = tree.height
    for spec in iter_chunks(tree, chi):
        detect_cost, path_cost = chunk_charges(chi, L, len(tree))
        if ledger is not None:
            ledger.walk_calls += detect_cost + path_cost
        sub = spec.subtree()
        hit, _ = detect_marked(sub, policy=alpha_policy)
        if hit:
            return find_marked(sub, alpha_policy, ledger)
    return None


def bounded_depth_search(tree: SearchTree, start: int, depth: int,
                         ledger: QueryLedger | None = None,
                         model: CostModel | None = None) -> tuple[list[int], list[int]]:
    """Solutions within ``depth`` of ``start`` and the undecided depth frontier.

    Nodes are marked when feasible, or undecided at exactly ``depth``.  Depth
    one is a Grover search over the children; deeper searches repeatedly find
    and unmark nodes with the walk operator.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    model = model or CostModel()
    base = tree.depth[start]
    keep = [v for v in tree.subtree(start) if tree.depth[v] - base <= depth]
    flagged = {
        v for v in keep
        if tree.beta[v] == FEASIBLE
        or (tree.beta[v] == UNKNOWN and tree.depth[v] - base == depth)
    }
    if depth == 1 or len(keep) == 1:
        N = max(len(keep) - 1, 1)
        t = len(flagged - {start})
        if ledger is not None:
            ledger.charge(math.ceil(model.grover_constant * math.sqrt(N * max(t, 1)))
                          * model.rep(len(tree)), len(tree))
            ledger.searches += 1
        found = set(flagged)
    else:
        found = set()
        while True:
            beta = {
                v: (FEASIBLE if v in flagged and v not in found
                    else (INFEASIBLE if v in flagged or not tree.children[v] or
                          tree.depth[v] - base == depth else UNKNOWN))
                for v in keep
            }
            sub = tree.induced(keep, beta=[beta.get(v) for v in range(len(tree))])
            hit = find_marked(sub, "montanaro", ledger)
            if hit is None:
                break
            found.add(hit)
    solutions = sorted((v for v in found if tree.beta[v] == FEASIBLE),
                       key=tree.dfs_order().index)
    frontier = sorted((v for v in found if tree.beta[v] != FEASIBLE),
                      key=tree.dfs_order().index)
    return solutions, frontier
