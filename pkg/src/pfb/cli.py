"""Command-line entry point.

    pfb run <config.json> [--output DIR]
    pfb bench <name> [--formulation rt0|vms] [--beta X] [--k2 X] [--mesh-scale N] [--output DIR]
    pfb converge <rt0|vms> [--levels 8 16 32 64] [--output DIR]
    pfb check <config.json>

Exit status: 0 when every threshold passes, 1 when a benchmark check fails,
2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import benchmarks
from . import io as pio
from .config import parse_config
from .errors import ConfigError, PfbError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

BENCH_NAMES = ("multilayer", "cylinder_inclusion", "leaky_well", "inclusion_sweep", "beta_sweep")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError("argv", message)


def build_parser():
    p = _Parser(prog="pfb", description="Darcy flow and transport benchmarks (RT0 and VMS).")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="solve a JSON-configured problem")
    r.add_argument("config")
    r.add_argument("--output", help="output directory (overrides the config)")

    b = sub.add_parser("bench", help="run a built-in benchmark")
    b.add_argument("name", choices=BENCH_NAMES)
    b.add_argument("--formulation", choices=("rt0", "vms"))
    b.add_argument("--beta", type=float, help="Barus exponent (leaky_well)")
    b.add_argument("--k2", type=float, help="inclusion permeability (cylinder_inclusion)")
    b.add_argument("--mesh-scale", type=float, default=1.0, help="linear refinement factor")
    b.add_argument("--output")

    c = sub.add_parser("converge", help="manufactured-solution convergence study")
    c.add_argument("formulation", choices=("rt0", "vms"))
    c.add_argument("--levels", type=int, nargs="+", default=[8, 16, 32, 64])
    c.add_argument("--output")

    k = sub.add_parser("check", help="validate a config without solving")
    k.add_argument("config")
    return p


def _run_log(outdir, command, elapsed):
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    path = Path(outdir) / "run.log"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {command} elapsed={elapsed:.2f}s\n")


def _emit(summary):
    sys.stdout.write(pio.dumps_json(summary))


def _scaled(spec, scale):
    if scale != 1.0:
        spec.mesh = benchmarks.scale_mesh_recipe(spec.mesh, scale)
    return spec


def cmd_run(args):
    cfg = parse_config(args.config)
    outdir = pio.output_root(args.output or cfg.output_dir) if (args.output or cfg.output_dir) \
        else pio.output_root() / cfg.spec.name
    t0 = time.perf_counter()
    res = benchmarks.run_benchmark(cfg.spec, outdir, cfg.formulations, cfg.solver)
    _run_log(outdir, f"run {args.config}", time.perf_counter() - t0)
    _emit(res.summary())
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_bench(args):
    outdir = Path(args.output) if args.output else pio.output_root() / args.name
    forms = [args.formulation] if args.formulation else None
    t0 = time.perf_counter()
    if args.name == "multilayer":
        res = benchmarks.run_benchmark(_scaled(benchmarks.multilayer(), args.mesh_scale), outdir, forms)
    elif args.name == "cylinder_inclusion":
        spec = benchmarks.cylinder_inclusion(1e-7 if args.k2 is None else args.k2)
        res = benchmarks.run_benchmark(_scaled(spec, args.mesh_scale), outdir, forms)
    elif args.name == "leaky_well":
        spec = benchmarks.leaky_well(0.0 if args.beta is None else args.beta)
        res = benchmarks.run_benchmark(_scaled(spec, args.mesh_scale), outdir, forms)
    elif args.name == "inclusion_sweep":
        res = benchmarks.inclusion_sweep(outdir=outdir, mesh_scale=args.mesh_scale)
    else:
        base = benchmarks.leaky_well()
        kw = {}
        if args.mesh_scale != 1.0:
            m = benchmarks.scale_mesh_recipe(base.mesh, args.mesh_scale)
            kw = {k: m[k] for k in ("h_min_x", "h_min_y", "h_max")}
        res = benchmarks.beta_sweep(outdir=outdir, formulations=tuple(forms or ("rt0", "vms")), **kw)
    _run_log(outdir, f"bench {args.name}", time.perf_counter() - t0)
    _emit(res.summary())
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_converge(args):
    t0 = time.perf_counter()
    rep = benchmarks.convergence_study(args.formulation, tuple(args.levels))
    if args.output:
        pio.write_json(rep.summary(), Path(args.output) / f"convergence_{args.formulation}.json")
        _run_log(args.output, f"converge {args.formulation}", time.perf_counter() - t0)
    _emit(rep.summary())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_check(args):
    cfg = parse_config(args.config)
    _emit({"valid": True, "name": cfg.spec.name, "formulations": cfg.formulations})
    return EXIT_OK


COMMANDS = {"run": cmd_run, "bench": cmd_bench, "converge": cmd_converge, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"pfb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"pfb: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PfbError as exc:
        print(f"pfb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
