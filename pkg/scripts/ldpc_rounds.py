"""Gallager-B decoding rounds and decoder bit-meters versus crossover probability.

Shows how input-dependent early stopping spreads the per-word decoder cost,
next to the fixed-schedule cost at the iteration limit.
"""
import argparse

import numpy as np

from infofriction.channel import estimate_block_error
from infofriction.codes import GallagerBCoder, place

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=96)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--placement", default="local_search")
    args = ap.parse_args()
    coder = GallagerBCoder(args.n, 3, 6, seed=3)
    circ = place(coder, args.placement, lam=1e-6)
    fixed = coder.decoder_bitmeters_batch(circ, [coder.max_iter])[0]
    print("p_ch,eps_hat,wilson_hi,mean_decoder_bitmeters,fixed_schedule_bitmeters")
    for p in np.round(np.linspace(0.005, 0.05, 10), 4):
        est = estimate_block_error(coder, float(p), args.trials, args.seed, circ)
        print(f"{p},{est.eps_hat:.6g},{est.wilson[1]:.6g},{est.mean_decoder_bitmeters:.6g},{fixed:.6g}")
