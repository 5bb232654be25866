"""Fallback frequency of exact-mode filtering under injected search failures.

    python scripts/las_vegas.py --calls 5000 --fail-prob 0 0.05 0.1 0.3
"""
import argparse
import math
import random

from qcp.core import make_domains
from qcp.engine import QuantumBackend
from qcp.filtering import filter_alldifferent
from qcp.qsim import CostModel, QueryLedger


def random_domains(rng, nx, nv):
    return make_domains([rng.sample(range(nv), rng.randint(1, nv)) for _ in range(nx)])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--calls", type=int, default=5000)
    ap.add_argument("--fail-prob", type=float, nargs="+", default=[0.0, 0.05, 0.1, 0.3, 0.6])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'p':>5} {'agree':>7} {'quantum':>8} {'fallbacks':>10} {'rate':>7} {'3 sigma':>8}")
    for p in args.fail_prob:
        rng = random.Random(args.seed)
        backend = QuantumBackend(CostModel(fail_prob=p, seed=args.seed), QueryLedger(), mode="exact")
        agree = 0
        for _ in range(args.calls):
            nx = rng.randint(1, 6)
            doms = random_domains(rng, nx, rng.randint(nx, 7))
            scope = tuple(range(nx))
            agree += filter_alldifferent(doms, scope, backend) == filter_alldifferent(doms, scope)
        q, fb = backend.ledger.quantum_calls, backend.ledger.fallbacks
        band = 3 * math.sqrt(q * p * (1 - p))
        print(f"{p:>5.2f} {agree:>7} {q:>8} {fb:>10} {fb / max(q, 1):>7.4f} {band:>8.1f}")


if __name__ == "__main__":
    main()
