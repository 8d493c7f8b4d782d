#!/usr/bin/env python3
"""Regenerate the equal-probability velocity bin boundaries.

Runs the pong environment with the chaotic racket for the given number
of steps, collects the per-step ball velocity components and writes
their 1/9 ... 8/9 quantiles as the encoder's calibration artifact.

The checked-in artifact was produced with:
    python3 scripts/calibrate_velocity_bins.py --seed 12345 --steps 1000000 \
        --out src/causalneuron/data/velocity_bins.txt
"""

import argparse
import sys

import numpy as np

from causalneuron import pong
from causalneuron.encoder import EncoderLayout, dump_layout, velocity_bins


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--steps", type=int, default=1_000_000)
    ap.add_argument("--out", default="src/causalneuron/data/velocity_bins.txt")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    policy = pong.ChaoticPolicy(np.random.default_rng(args.seed + 1))
    state = pong.initial_state(rng)
    vx = np.empty(args.steps)
    vy = np.empty(args.steps)
    for t in range(args.steps):
        vx[t] = state.ball_vx
        vy[t] = state.ball_vy
        state, _ = pong.env_step(state, policy(t), rng)

    layout = EncoderLayout(vx_bounds=velocity_bins(vx), vy_bounds=velocity_bins(vy))
    command = (
        f"python3 scripts/calibrate_velocity_bins.py --seed {args.seed} "
        f"--steps {args.steps} --out {args.out}"
    )
    with open(args.out, "w") as fh:
        dump_layout(layout, fh, command=command)
    print(f"wrote {args.out}")
    print("vx_bounds:", layout.vx_bounds)
    print("vy_bounds:", layout.vy_bounds)
    return 0


if __name__ == "__main__":
    sys.exit(main())
