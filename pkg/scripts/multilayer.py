"""Multilayer benchmark: centerline exactness, local conservation, transport totals.

    python3 scripts/multilayer.py [--out DIR] [--scale 2]
"""

import argparse
from pathlib import Path

from pfb.benchmarks import multilayer, run_benchmark, scale_mesh_recipe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/multilayer")
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()

    spec = multilayer()
    spec.mesh = scale_mesh_recipe(spec.mesh, args.scale)
    res = run_benchmark(spec, Path(args.out))
    for f in ("rt0", "vms"):
        m = res.metrics[f]
        print(f"{f}: centerline rel err {m['centerline_max_rel_error']:.2e}, "
              f"max element imbalance {m['max_element_imbalance']:.2e}, dofs {m['n_dofs']}")
    for name, c in sorted(res.checks.items()):
        print(f"  {name:32s} {'pass' if c.passed else 'FAIL'}  value={c.value}")
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
