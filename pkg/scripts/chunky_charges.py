"""Walk-call charges of chunky search as the chunk size varies.

    python scripts/chunky_charges.py --problem tsp --n 5 --chi 1 2 4 8 16
"""
import argparse

from qcp.models import build_model
from qcp.qsim import QueryLedger
from qcp.qwalk import build_tree, chunky_search, find_marked


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", default="tsp")
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--chi", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32])
    ap.add_argument("--strategy", default="assign")
    args = ap.parse_args()

    csp = build_model(args.problem, {"n": args.n})
    tree = build_tree(csp, args.strategy)
    print(f"tree: T={len(tree)} L={tree.height} marked={sum(tree.marked)}")

    led = QueryLedger()
    find_marked(tree, ledger=led)
    print(f"{'whole tree':>10}: walk_calls={led.walk_calls}")
    for chi in args.chi:
        led = QueryLedger()
        hit = chunky_search(tree, chi, ledger=led)
        print(f"{'chi=' + str(chi):>10}: walk_calls={led.walk_calls} found={hit is not None}")


if __name__ == "__main__":
    main()
