"""First-mode frequency against beam length for both section models.

Prints a table and, with --csv, writes it out. Tuned lengths for the
reference harmonics are listed at the end.
"""

import argparse
import sys

import numpy as np

from piezoharvest.beam import SectionModel, natural_frequencies, section_properties
from piezoharvest.config import load_config
from piezoharvest.design import DesignTarget, length_for_frequency
from piezoharvest._csv import write_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--min", type=float, default=0.04, help="m")
    ap.add_argument("--max", type=float, default=0.12, help="m")
    ap.add_argument("--points", type=int, default=17)
    ap.add_argument("--csv", help="write the sweep here")
    args = ap.parse_args()

    cfg = load_config(args.config)
    bare = section_properties(cfg.geometry, SectionModel.BARE_SUBSTRATE)
    bilayer = section_properties(cfg.geometry, SectionModel.UNIFORM_BILAYER)

    rows = []
    for L in np.linspace(args.min, args.max, args.points):
        fb = natural_frequencies(bare, L, 1)[0].frequency
        fl = natural_frequencies(bilayer, L, 1)[0].frequency
        rows.append((L, fb, fl))
    print(f"{'L [mm]':>8} {'bare [Hz]':>11} {'bilayer [Hz]':>13}")
    for L, fb, fl in rows:
        print(f"{L * 1e3:8.2f} {fb:11.3f} {fl:13.3f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_rows(fh, ["length_m", "f1_bare_hz", "f1_bilayer_hz"], rows)

    print()
    for f in (105.0, 108.0, 114.0, 120.0):
        L = length_for_frequency(bilayer, DesignTarget(f))
        print(f"{f:6.1f} Hz -> {L * 1e3:.3f} mm")
    return 0


if __name__ == "__main__":
    sys.exit(main())
