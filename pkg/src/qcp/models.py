"""Builders for the Sudoku, TSP, nurse-rostering and round-robin models."""

from __future__ import annotations

import random
from importlib import resources
from typing import Mapping, Sequence

from .core import Constraint, Csp, ProblemError, make_domains

SHIFT_CODES = {"O": 0, "M": 1, "A": 2, "E": 3}


# -- sudoku -------------------------------------------------------------------

def sudoku_name(r: int, c: int) -> str:
    return f"x_{r}_{c}"


def sudoku(clues: Mapping[tuple[int, int], int] | Sequence[tuple[int, int, int]] = ()) -> Csp:
    """81 cells, 27 AllDifferent constraints and one eq constraint per clue.

    Rows and columns are 1-based.  Conflicting or out-of-range clues raise.
    """
    items = clues.items() if isinstance(clues, Mapping) else [((r, c), v) for r, c, v in clues]
    fixed: dict[tuple[int, int], int] = {}
    for (r, c), v in items:
        if not (1 <= r <= 9 and 1 <= c <= 9 and 1 <= v <= 9):
            raise ProblemError(f"clue ({r}, {c}) = {v} out of range")
        if fixed.setdefault((r, c), v) != v:
            raise ProblemError(f"conflicting clues for cell ({r}, {c})")
    names = tuple(sudoku_name(r, c) for r in range(1, 10) for c in range(1, 10))
    idx = lambda r, c: (r - 1) * 9 + (c - 1)
    cons = []
    for k in range(1, 10):
        cons.append(Constraint("alldifferent", tuple(idx(k, c) for c in range(1, 10))))
        cons.append(Constraint("alldifferent", tuple(idx(r, k) for r in range(1, 10))))
    for br in range(3):
        for bc in range(3):
            cells = [idx(3 * br + i, 3 * bc + j) for i in range(1, 4) for j in range(1, 4)]
            cons.append(Constraint("alldifferent", tuple(cells)))
    for (r, c), v in sorted(fixed.items()):
        cons.append(Constraint("eq", (idx(r, c),), value=v))
    return Csp(names, make_domains([range(1, 10)] * 81), tuple(cons))


def parse_sudoku(text: str) -> dict[tuple[int, int], int]:
    """81 cells row by row; digits are clues, '.' or '0' blank, whitespace ignored."""
    cells = [ch for ch in text if not ch.isspace()]
    if len(cells) != 81:
        raise ProblemError(f"expected 81 cells, got {len(cells)}")
    clues = {}
    for k, ch in enumerate(cells):
        if ch in ".0":
            continue
        if not ch.isdigit():
            raise ProblemError(f"bad sudoku cell {ch!r}")
        clues[(k // 9 + 1, k % 9 + 1)] = int(ch)
    return clues


def format_sudoku(grid: Sequence[int]) -> str:
    rows = ["".join(str(v) if v else "." for v in grid[9 * r:9 * r + 9]) for r in range(9)]
    return "\n".join(rows)


def generate_sudoku(seed: int = 0, blanks: int = 0) -> list[int]:
    """Random complete grid (row-major, 1-based values) with ``blanks`` cells zeroed.

    Built from the shifted base pattern with band/stack/row/column and
    digit permutations, so every output is a consistent grid.
    """
    rng = random.Random(seed)
    shuffle = lambda xs: rng.sample(list(xs), len(xs))
    rows = [3 * b + r for b in shuffle(range(3)) for r in shuffle(range(3))]
    cols = [3 * b + c for b in shuffle(range(3)) for c in shuffle(range(3))]
    digits = shuffle(range(1, 10))
    pattern = lambda r, c: (3 * (r % 3) + r // 3 + c) % 9
    grid = [digits[pattern(r, c)] for r in rows for c in cols]
    for k in rng.sample(range(81), blanks):
        grid[k] = 0
    return grid


def load_sudoku(name: str = "paper") -> dict[tuple[int, int], int]:
    """Clues of a shipped instance from ``qcp/data/sudoku_<name>.txt``."""
    text = resources.files("qcp.data").joinpath(f"sudoku_{name}.txt").read_text()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return parse_sudoku("\n".join(lines))


# -- travelling salesperson -----------------------------------------------------

def tsp(costs: Sequence[Sequence[float]]) -> Csp:
    """Successor/predecessor model; the objective is evaluated at leaves.

    x_i is the city after i, y_i the city before i.  Self loops are excluded
    from the domains, x_1 < y_1 removes reversed tours and a circuit checker
    rules out subtours.
    """
    n = len(costs)
    if n < 3 or any(len(row) != n for row in costs):
        raise ProblemError("tsp needs a square cost matrix with n >= 3")
    names = tuple(f"x{i}" for i in range(1, n + 1)) + tuple(f"y{i}" for i in range(1, n + 1))
    doms = [[j for j in range(1, n + 1) if j != i] for i in range(1, n + 1)] * 2
    xs, ys = tuple(range(n)), tuple(range(n, 2 * n))
    cons = (
        Constraint("inverse", xs, ys),
        Constraint("alldifferent", xs),
        Constraint("alldifferent", ys),
        Constraint("lt", (0, n)),
        Constraint("circuit", xs),
    )
    return Csp(names, make_domains(doms), cons)


def random_costs(n: int, seed: int = 0, high: int = 20, symmetric: bool = True) -> list[list[int]]:
    rng = random.Random(seed)
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and (not symmetric or i < j):
                c[i][j] = rng.randint(1, high)
                if symmetric:
                    c[j][i] = c[i][j]
    return c


# -- nurse rostering ------------------------------------------------------------

def roster(demand: Sequence[Mapping[str, int]], nurses: int, off_min: int, off_max: int) -> Csp:
    """s_{k,d} in {O, M, A, E} coded 0..3.

    Each day takes exactly demand[d][shift] nurses per working shift (gcc
    over M, A, E; O is left unbounded there).  Each nurse gets between
    off_min and off_max days off (gcc over O alone).
    """
    days = len(demand)
    if nurses < 1 or days < 1 or not 0 <= off_min <= off_max <= days:
        raise ProblemError("roster needs nurses, days and 0 <= off_min <= off_max <= days")
    names = tuple(f"s_{k}_{d}" for k in range(1, nurses + 1) for d in range(1, days + 1))
    at = lambda k, d: k * days + d
    cons = []
    for d, need in enumerate(demand):
        if set(need) - {"M", "A", "E"}:
            raise ProblemError("demand keys must be among M, A, E")
        values = [SHIFT_CODES[s] for s in ("M", "A", "E")]
        bounds = [(need.get(s, 0), need.get(s, 0)) for s in ("M", "A", "E")]
        cons.append(Constraint("gcc", tuple(at(k, d) for k in range(nurses)),
                               values=tuple(values), bounds=tuple(bounds)))
    for k in range(nurses):
        cons.append(Constraint("gcc", tuple(at(k, d) for d in range(days)),
                               values=(SHIFT_CODES["O"],), bounds=((off_min, off_max),)))
    return Csp(names, make_domains([range(4)] * (nurses * days)), tuple(cons))


# -- round robin ----------------------------------------------------------------

def roundrobin(n: int) -> Csp:
    """x_{i,t}: opponent of team i in slot t.

    Per slot the opponent map is its own inverse with no fixed points;
    per team all opponents differ.
    """
    if n < 2 or n % 2:
        raise ProblemError("round robin needs an even number of teams")
    slots = n - 1
    names = tuple(f"x_{i}_{t}" for i in range(1, n + 1) for t in range(1, slots + 1))
    at = lambda i, t: i * slots + t
    doms = [[j for j in range(1, n + 1) if j != i] for i in range(1, n + 1) for _ in range(slots)]
    cons = []
    for t in range(slots):
        xs = tuple(at(i, t) for i in range(n))
        cons.append(Constraint("inverse", xs, xs))
    for i in range(n):
        cons.append(Constraint("alldifferent", tuple(at(i, t) for t in range(slots))))
    return Csp(names, make_domains(doms), tuple(cons))


MODELS = ("sudoku", "tsp", "roster", "roundrobin")


def build_model(name: str, params: Mapping | None = None) -> Csp:
    params = dict(params or {})
    if name == "sudoku":
        if "grid" in params:
            return sudoku(parse_sudoku(params["grid"]))
        if "clues" in params:
            return sudoku([tuple(c) for c in params["clues"]])
        return sudoku(load_sudoku(params.get("instance", "paper")))
    if name == "tsp":
        costs = params.get("costs") or random_costs(int(params.get("n", 4)), int(params.get("seed", 0)))
        return tsp(costs)
    if name == "roster":
        return roster(params["demand"], int(params["nurses"]),
                      int(params["off_min"]), int(params["off_max"]))
    if name == "roundrobin":
        return roundrobin(int(params.get("n", 4)))
    raise ProblemError(f"unknown model {name!r}")
