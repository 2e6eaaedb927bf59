"""Cylinder-inclusion sweep over the inclusion permeability, with optional mesh refinement.

    python3 scripts/inclusion_sweep.py [--out DIR] [--scales 1 2 3]
"""

import argparse
from pathlib import Path

from pfb.benchmarks import INCLUSION_SWEEP, inclusion_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/inclusion")
    ap.add_argument("--scales", type=float, nargs="+", default=[1.0])
    args = ap.parse_args()

    print("scale  nodes  " + "  ".join(f"{k:>7.0e}" for k in INCLUSION_SWEEP))
    for s in args.scales:
        sweep = inclusion_sweep(outdir=Path(args.out) / f"scale_{s:g}", mesh_scale=s)
        nodes = sweep.results[0].metrics["mesh"]["nodes"]
        disc = sweep.metrics["discrepancy"]
        print(f"{s:5g}  {nodes:5d}  " + "  ".join(f"{100 * d:6.2f}%" for d in disc))
        print(f"       rt0 mass error max {max(sweep.metrics['rt0_mass_error']):.1e}, "
              f"vms mass error max {max(sweep.metrics['vms_mass_error']):.1e}")


if __name__ == "__main__":
    main()
