"""CSP data model: variables, domains, constraints, branching and checking.

Domains are carried as a tuple of sorted integer tuples so that a whole
domain store is hashable and can be compared cheaply between search nodes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

Domains = tuple[tuple[int, ...], ...]

# kinds carrying a second variable tuple in ``scope_y``
PAIRED_KINDS = {"inverse", "same", "usedby"}
UNARY_KINDS = {"eq", "neq", "leq"}
BINARY_KINDS = {"lt", "le", "ne"}
GLOBAL_KINDS = {"alldifferent", "alldifferent_except_0", "gcc", "circuit"}
KINDS = PAIRED_KINDS | UNARY_KINDS | BINARY_KINDS | GLOBAL_KINDS

BRANCH_STRATEGIES = ("assign", "twoway", "split")


class ProblemError(ValueError):
    """Raised for malformed problem definitions."""


def make_domains(sets: Sequence[Sequence[int]]) -> Domains:
    return tuple(tuple(sorted(set(int(v) for v in s))) for s in sets)


@dataclass(frozen=True)
class Constraint:
    kind: str
    scope: tuple[int, ...]
    scope_y: tuple[int, ...] = ()
    values: tuple[int, ...] = ()
    bounds: tuple[tuple[int, int], ...] = ()
    value: int | None = None

    def variables(self) -> tuple[int, ...]:
        return self.scope + self.scope_y


@dataclass(frozen=True)
class Csp:
    names: tuple[str, ...]
    domains: Domains
    constraints: tuple[Constraint, ...] = field(default=())

    def __post_init__(self):
        if len(self.names) != len(self.domains):
            raise ProblemError("one domain per variable required")
        if len(set(self.names)) != len(self.names):
            raise ProblemError("duplicate variable names")
        for c in self.constraints:
            validate_constraint(c, len(self.names))

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ProblemError(f"undeclared variable {name!r}") from None


def validate_constraint(c: Constraint, nvars: int) -> None:
    if c.kind not in KINDS:
        raise ProblemError(f"unknown constraint kind {c.kind!r}")
    for v in c.variables():
        if not 0 <= v < nvars:
            raise ProblemError(f"constraint {c.kind} refers to variable {v} out of range")
    if c.kind in UNARY_KINDS:
        if len(c.scope) != 1 or c.value is None:
            raise ProblemError(f"{c.kind} takes one variable and a value")
    if c.kind in BINARY_KINDS and len(c.scope) != 2:
        raise ProblemError(f"{c.kind} takes exactly two variables")
    if c.kind == "gcc":
        if len(c.values) != len(c.bounds):
            raise ProblemError("gcc needs one bound per value")
        if len(set(c.values)) != len(c.values):
            raise ProblemError("gcc values must be distinct")
        for lo, hi in c.bounds:
            if not 0 <= lo <= hi:
                raise ProblemError(f"gcc bound [{lo}, {hi}] invalid")
    if c.kind in ("inverse", "same") and len(c.scope) != len(c.scope_y):
        raise ProblemError(f"{c.kind} scopes must have equal length")
    if c.kind == "usedby" and len(c.scope_y) > len(c.scope):
        raise ProblemError("usedby requires |Y| <= |X|")


# -- JSON problem files -------------------------------------------------------

def parse_problem(text: str) -> Csp:
    """Parse the JSON problem schema into a validated :class:`Csp`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"malformed problem file: {exc}") from exc
    if not isinstance(doc, dict) or "variables" not in doc:
        raise ProblemError("problem must be an object with 'variables'")
    names, doms = [], []
    for var in doc["variables"]:
        names.append(str(var["name"]))
        doms.append(var["domain"])
    lookup = {n: i for i, n in enumerate(names)}

    def ids(seq):
        out = []
        for name in seq:
            if name not in lookup:
                raise ProblemError(f"scope names undeclared variable {name!r}")
            out.append(lookup[name])
        return tuple(out)

    cons = []
    for raw in doc.get("constraints", []):
        kind = raw.get("kind")
        if kind not in KINDS:
            raise ProblemError(f"unknown constraint kind {kind!r}")
        cons.append(Constraint(
            kind=kind,
            scope=ids(raw.get("scope", [])),
            scope_y=ids(raw.get("scope_y", [])),
            values=tuple(int(v) for v in raw.get("values", [])),
            bounds=tuple((int(lo), int(hi)) for lo, hi in raw.get("bounds", [])),
            value=None if raw.get("value") is None else int(raw["value"]),
        ))
    return Csp(tuple(names), make_domains(doms), tuple(cons))


def dump_problem(csp: Csp) -> str:
    doc = {
        "variables": [{"name": n, "domain": list(d)} for n, d in zip(csp.names, csp.domains)],
        "constraints": [],
    }
    for c in csp.constraints:
        raw: dict = {"kind": c.kind, "scope": [csp.names[i] for i in c.scope]}
        if c.scope_y:
            raw["scope_y"] = [csp.names[i] for i in c.scope_y]
        if c.kind == "gcc":
            raw["values"] = list(c.values)
            raw["bounds"] = [list(b) for b in c.bounds]
        if c.value is not None:
            raw["value"] = c.value
        doc["constraints"].append(raw)
    return json.dumps(doc, indent=1)


# -- checking -----------------------------------------------------------------

def _is_circuit(succ: Sequence[int]) -> bool:
    # successor values are 1-based vertex labels
    n = len(succ)
    seen, cur = set(), 1
    for _ in range(n):
        if cur in seen or not 1 <= cur <= n:
            return False
        seen.add(cur)
        cur = succ[cur - 1]
    return cur == 1 and len(seen) == n


def constraint_holds(c: Constraint, assignment: Sequence[int]) -> bool:
    xs = [assignment[i] for i in c.scope]
    ys = [assignment[i] for i in c.scope_y]
    k = c.kind
    if k == "alldifferent":
        return len(set(xs)) == len(xs)
    if k == "alldifferent_except_0":
        nz = [v for v in xs if v != 0]
        return len(set(nz)) == len(nz)
    if k == "gcc":
        counts = Counter(xs)
        return all(lo <= counts[v] <= hi for v, (lo, hi) in zip(c.values, c.bounds))
    if k == "inverse":
        n = len(xs)
        if any(not 1 <= v <= n for v in xs + ys):
            return False
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if (xs[i - 1] == j) != (ys[j - 1] == i):
                    return False
        return True
    if k == "same":
        return Counter(xs) == Counter(ys)
    if k == "usedby":
        return not (Counter(ys) - Counter(xs))
    if k == "circuit":
        return _is_circuit(xs)
    if k == "eq":
        return xs[0] == c.value
    if k == "neq":
        return xs[0] != c.value
    if k == "leq":
        return xs[0] <= c.value
    if k == "lt":
        return xs[0] < xs[1]
    if k == "le":
        return xs[0] <= xs[1]
    if k == "ne":
        return xs[0] != xs[1]
    raise ProblemError(f"unknown constraint kind {k!r}")


def check_assignment(csp: Csp, assignment: Sequence[int]) -> bool:
    """True iff the complete assignment satisfies every constraint."""
    if len(assignment) != csp.n:
        raise ValueError(f"expected {csp.n} values, got {len(assignment)}")
    return all(constraint_holds(c, assignment) for c in csp.constraints)


# -- branching ----------------------------------------------------------------

def select_variable(domains: Domains) -> int:
    """Smallest non-singleton domain first, ties broken by lowest index."""
    best, best_size = -1, None
    for i, d in enumerate(domains):
        if len(d) > 1 and (best_size is None or len(d) < best_size):
            best, best_size = i, len(d)
    return best


def branch(domains: Domains, strategy: str = "assign") -> list[Domains]:
    """Children of a node, in exploration order.

    ``assign`` yields one child per value, ``twoway`` posts x=d / x!=d for the
    smallest d, ``split`` posts x<=d / x>d around the lower median.
    """
    i = select_variable(domains)
    if i < 0:
        raise ValueError("branch called on all-singleton domains")
    dom = domains[i]
    if strategy == "assign":
        parts = [(v,) for v in dom]
    elif strategy == "twoway":
        parts = [dom[:1], dom[1:]]
    elif strategy == "split":
        cut = (len(dom) - 1) // 2 + 1
        parts = [dom[:cut], dom[cut:]]
    else:
        raise ValueError(f"unknown branching strategy {strategy!r}")
    return [domains[:i] + (p,) + domains[i + 1:] for p in parts]


def num_children(domains: Domains, strategy: str = "assign") -> int:
    i = select_variable(domains)
    if i < 0:
        return 0
    return len(domains[i]) if strategy == "assign" else 2


def removed_pairs(before: Domains, after: Domains) -> frozenset[tuple[int, int]]:
    """Variable-value pairs present in ``before`` but not in ``after``."""
    out = set()
    for i, (b, a) in enumerate(zip(before, after)):
        keep = set(a)
        out.update((i, v) for v in b if v not in keep)
    return frozenset(out)
