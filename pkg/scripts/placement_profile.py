"""Patch-placement objective along the beam for the first few modes.

The objective is the integral of |W''| over the patch, so it tracks the
charge a patch would collect before strain cancellation is considered.
"""

import argparse

import numpy as np

from piezoharvest.beam import natural_frequencies, section_properties
from piezoharvest.config import load_config
from piezoharvest.design import optimal_patch_start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--modes", type=int, default=3)
    ap.add_argument("--grid", type=int, default=51)
    args = ap.parse_args()

    cfg = load_config(args.config)
    geom = cfg.geometry
    modes = natural_frequencies(section_properties(geom, cfg.section_model), geom.length, args.modes)
    results = [optimal_patch_start(geom, m, args.grid) for m in modes]

    header = f"{'start [mm]':>10}" + "".join(f"{'mode ' + str(m.index):>12}" for m in modes)
    print(header)
    for i, start in enumerate(results[0].starts):
        vals = "".join(f"{r.profile[i] / np.max(r.profile):12.4f}" for r in results)
        print(f"{start * 1e3:10.2f}{vals}")
    print()
    for m, r in zip(modes, results):
        print(f"mode {m.index} ({m.frequency:.2f} Hz): best start {r.patch_start * 1e3:.2f} mm")


if __name__ == "__main__":
    main()
