"""Coarse-to-fine search for points where Im h(z) < 0 near z = -1.

Starts from a box around -1, zooms into the most negative grid point a few
times, then re-evaluates the result with mpmath.

    python3 scripts/locate_loewner_witness.py --beta 2
"""
import argparse

import mpmath as mp
import numpy as np

from tomometrics.monotonicity import loewner_scan, verify_loewner_witness
from tomometrics.petz import catalog


def mp_h(z, beta):
    z = mp.mpc(z)
    return 2 * beta * z * (1 - z) / ((1 + z) ** 2 * mp.sinh(beta * (1 - z) / (1 + z)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--box", default="-1.2,-0.8,0,0.2")
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()
    mp.mp.dps = 40

    h = catalog("exp-scheme", args.beta)
    box = tuple(float(x) for x in args.box.split(","))
    for level in range(args.levels):
        rep = loewner_scan(h, box, (200, 100))
        print(f"level {level}: box {box} -> {rep.verdict}, {rep.violations} negative points, "
              f"{rep.skipped} skipped")
        if not rep.witnesses:
            break
        zr, zi = rep.witnesses[0]["z"]
        print(f"  most negative: z = {zr:.6f}{zi:+.6f}i, Im h = {rep.witnesses[0]['im_f']:.6g}")
        dx, dy = (box[1] - box[0]) / 8, (box[3] - box[2]) / 8
        box = (zr - dx, zr + dx, max(0.0, zi - dy), zi + dy)

    pinned = complex(-1.0, 0.05)
    ref = mp_h(pinned, args.beta)
    print(f"pinned z = {pinned}: Im h = {float(ref.imag):.12g} (mpmath), "
          f"verified = {verify_loewner_witness(h, (pinned.real, pinned.imag))}")
    print("along Re z = -1:")
    for y in np.geomspace(1e-3, 1, 7):
        print(f"  y = {y:.4g}: Im h = {float(mp_h(complex(-1, y), args.beta).imag):.6g}")


if __name__ == "__main__":
    main()
