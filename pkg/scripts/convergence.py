"""Manufactured-solution convergence for both formulations.

    python3 scripts/convergence.py [--levels 8 16 32 64 128]
"""

import argparse

from pfb.benchmarks import convergence_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=[8, 16, 32, 64])
    args = ap.parse_args()
    for f in ("rt0", "vms"):
        rep = convergence_study(f, tuple(args.levels))
        print(f"{f}: velocity rate {rep.velocity_rate:.3f}, pressure rate {rep.pressure_rate:.3f}")
        for h, ev, ep, nd in zip(rep.h, rep.velocity_errors, rep.pressure_errors, rep.dofs):
            print(f"   h={h:.5f}  dofs={nd:7d}  |v-vh|={ev:.3e}  |p-ph|={ep:.3e}")


if __name__ == "__main__":
    main()
