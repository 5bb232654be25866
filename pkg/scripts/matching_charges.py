"""Query charges of the quantum matching and edge-removal subroutines.

    python scripts/matching_charges.py --sizes 4 8 16 32
"""
import argparse
import math
import random

from qcp.core import make_domains
from qcp.graphs import build_value_graph
from qcp.qsim import CostModel, QueryLedger, q_matching_sim, q_remove_edges_sim


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--density", type=float, default=0.5, help="fraction of values per domain")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'nx':>4} {'|E|':>6} {'matching':>10} {'remove_edges':>13} {'classical':>10}")
    for nx in args.sizes:
        rng = random.Random(args.seed + nx)
        k = max(1, int(args.density * nx))
        doms = make_domains([sorted(set(rng.sample(range(nx), k)) | {i}) for i in range(nx)])
        g = build_value_graph(doms, tuple(range(nx)))
        model = CostModel(seed=args.seed)
        led_m, led_r = QueryLedger(), QueryLedger()
        m = q_matching_sim(g, model, led_m, model.rng()).payload
        q_remove_edges_sim(g, m, model, led_r, model.rng())
        classical = g.m * math.isqrt(g.n)
        print(f"{nx:>4} {g.m:>6} {led_m.oracle_queries:>10} {led_r.oracle_queries:>13} {classical:>10}")


if __name__ == "__main__":
    main()
