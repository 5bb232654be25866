"""Q-FindSCC query growth against sqrt(n*m) on random digraphs.

    python scripts/scc_scaling.py --sizes 64 128 256 512 1024 --density 4
"""
import argparse
import math
import random

import numpy as np

from qcp.graphs import Digraph, tarjan_scc
from qcp.qsim import CostModel, QueryLedger, q_find_scc


def random_digraph(rng, n, m):
    out = [set() for _ in range(n)]
    for _ in range(m):
        out[rng.randrange(n)].add(rng.randrange(n))
    return Digraph(tuple(tuple(sorted(a)) for a in out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512, 1024, 2048])
    ap.add_argument("--density", type=int, default=4, help="edges drawn per vertex")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    xs, ys = [], []
    print(f"{'n':>6} {'m':>7} {'qram_queries':>13} {'normalized':>11}")
    for n in args.sizes:
        g = random_digraph(random.Random(args.seed + n), n, args.density * n)
        model = CostModel(seed=args.seed + n)
        led = QueryLedger()
        res = q_find_scc(g, model, led, model.rng())
        assert res.payload.partition() == tarjan_scc(g).partition()
        norm = led.qram_queries / math.log2(n) ** 2
        xs.append(math.log(math.sqrt(n * g.m)))
        ys.append(math.log(norm))
        print(f"{n:>6} {g.m:>7} {led.qram_queries:>13} {norm:>11.1f}")
    slope = np.polyfit(xs, ys, 1)[0]
    print(f"log-log slope of queries/log^2 n on sqrt(nm): {slope:.3f}")


if __name__ == "__main__":
    main()
