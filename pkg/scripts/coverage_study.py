"""How close does the best Stencil origin get to covering every bit-node?

For random circuits at several eta, prints the best-origin coverage, the
guaranteed floor k(1-2eta)^2 and the mean over a 64x64 origin grid.
"""
import argparse
import math
import sys

import numpy as np

from infofriction.geometry import Circuit, Node, Substrate
from infofriction.stencil import best_origin, mean_grid_coverage


def random_circuit(rng, k, side):
    cells = rng.choice((side + 1) ** 2, size=k, replace=False)
    nodes = tuple(Node(i, "output", (int(c % (side + 1)), int(c // (side + 1)))) for i, c in enumerate(cells))
    return Circuit(Substrate(side, 1.0), nodes)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--a", type=float, default=7 + (math.sqrt(5) - 1) / 2)
    args = ap.parse_args()
    w = sys.stdout.write
    w("k,eta,a,best_covered,floor,grid_mean,best_over_floor\n")
    for k in args.k:
        rng = np.random.default_rng([args.seed, k])
        c = random_circuit(rng, k, 8 * math.ceil(math.sqrt(k)))
        for eta in (0.05, 0.1, 0.25, 0.4, 0.45):
            _, cov = best_origin(c, args.a, eta)
            floor = k * (1 - 2 * eta) ** 2
            mean = mean_grid_coverage(c, args.a, eta)
            w(f"{k},{eta},{args.a:.6g},{cov},{floor:.6g},{mean:.6g},{cov / floor:.4f}\n")
