"""Smallest noisy game value reached by separable states.

Scans independent per-side visibilities and angle errors; a negative
minimum would mean a separable state passed as entangled.
"""

import argparse
import itertools

import numpy as np

from mdiw.game import table1_betas
from mdiw.noise import NoiseParams, i_mod_fast
from mdiw.states import random_separable, table1_ensemble, werner_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ens, beta = table1_ensemble(), table1_betas()
    vis = [0, 0.25, 0.5, 0.75, 1]
    angles = [k * np.pi / 8 for k in range(9)]
    grid = [NoiseParams(mu1=a, mu2=b, delta1=c, delta2=d) for a, b, c, d in itertools.product(vis, vis, angles, angles)]
    states = [werner_state(1 / 3)] + [random_separable(2, 2, 1 + i % 4, args.seed + i) for i in range(args.samples)]
    worst = min(i_mod_fast(rho, ens, ens, beta, n) for rho in states for n in grid)
    print(f"{len(states)} separable states x {len(grid)} noise points: min I_mod = {worst:+.3e}")


if __name__ == "__main__":
    main()
