"""Leaky-well injection: steady leak rate for RT0 and VMS across Barus exponents.

    python3 scripts/leaky_well.py [--out DIR] [--betas 0 1e-10 1e-9] [--scale 0.5]

Takes a few minutes at the default resolution.
"""

import argparse
from pathlib import Path

from pfb.benchmarks import BETA_SWEEP, beta_sweep, leaky_well, scale_mesh_recipe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/leaky_well")
    ap.add_argument("--betas", type=float, nargs="+", default=list(BETA_SWEEP))
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()

    kw = {}
    if args.scale != 1.0:
        m = scale_mesh_recipe(leaky_well().mesh, args.scale)
        kw = {k: m[k] for k in ("h_min_x", "h_min_y", "h_max")}
    sweep = beta_sweep(args.betas, Path(args.out), **kw)
    print(f"mesh nodes: {sweep.results[0].metrics['mesh']['nodes']}")
    print("beta       rt0 leak     vms leak     gap     t95 rt0    t95 vms")
    for i, b in enumerate(args.betas):
        r, v = sweep.metrics["rt0"], sweep.metrics["vms"]
        print(f"{b:<9.0e}  {r['steady_leak'][i]:.5e}  {v['steady_leak'][i]:.5e}  "
              f"{sweep.metrics['leak_gap'][i]:6.1%}  {r['time_to_95pct'][i]:9.0f}  {v['time_to_95pct'][i]:9.0f}")
    print("all checks pass" if sweep.passed else "some checks FAILED")


if __name__ == "__main__":
    main()
