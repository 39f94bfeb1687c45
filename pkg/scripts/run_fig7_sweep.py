#!/usr/bin/env python3
"""Full soft-selection sweep: accuracy of plain attention vs soft rescaling
over the (variant repetitions, irrelevant features) grid for 4-bit parity.

Writes fig7_soft_fs.{csv,json} plus per-method SVG heatmaps. Expect a few
minutes at full scale; pass --scale 0.1 for a quick look.
"""

import argparse
import time

from polyselect.bench import reproduce


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out/fig7")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scale", type=float, default=1.0)
    args = parser.parse_args()

    start = time.time()
    paths = reproduce("fig7_soft_fs", args.out_dir, seed=args.seed, scale=args.scale)
    print(f"done in {time.time() - start:.1f}s")
    for path in paths:
        print(path)


if __name__ == "__main__":
    main()
