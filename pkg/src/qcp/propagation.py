"""Fixpoint propagation over all constraints."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import Csp, Domains, constraint_holds
from .filtering import INFEASIBLE, UNKNOWN, filter_constraint

FEASIBLE = 1


@dataclass(frozen=True)
class PropagationResult:
    domains: Domains
    flag: object                         # 0, 1 or "*"
    rounds: int = 0


def propagate(csp: Csp, domains: Domains | None = None, max_rounds: int | None = None,
              backend=None, counts: Counter | None = None) -> PropagationResult:
    """Re-run every filter until nothing changes or one reports infeasibility.

    ``counts`` (if given) is incremented per constraint index on each call.
    """
    if domains is None:
        domains = csp.domains
    if max_rounds is not None and max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if any(not d for d in domains):
        return PropagationResult(domains, INFEASIBLE)
    rounds = 0
    while True:
        rounds += 1
        changed = False
        for k, c in enumerate(csp.constraints):
            if counts is not None:
                counts[k] += 1
            out = filter_constraint(domains, c, backend)
            if out.flag == INFEASIBLE:
                return PropagationResult(out.domains, INFEASIBLE, rounds)
            if out.domains != domains:
                changed = True
                domains = out.domains
        if not changed or (max_rounds is not None and rounds >= max_rounds):
            break
    flag = FEASIBLE if all(len(d) == 1 for d in domains) else UNKNOWN
    return PropagationResult(domains, flag, rounds)


def check_only(csp: Csp, domains: Domains | None = None) -> PropagationResult:
    """Predicate without filtering: constraints are tested once their scope is fixed."""
    if domains is None:
        domains = csp.domains
    if any(not d for d in domains):
        return PropagationResult(domains, INFEASIBLE)
    fixed = [d[0] if len(d) == 1 else None for d in domains]
    for c in csp.constraints:
        if all(fixed[i] is not None for i in c.variables()):
            if not constraint_holds(c, [0 if v is None else v for v in fixed]):
                return PropagationResult(domains, INFEASIBLE)
    flag = FEASIBLE if all(v is not None for v in fixed) else UNKNOWN
    return PropagationResult(domains, flag)
