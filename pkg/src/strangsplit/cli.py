"""Command-line front end for the benchmark harness.

``strang-bench run`` executes a named preset or a custom sweep and writes a
CSV; ``strang-bench order`` reads such a CSV back and prints the observed
convergence orders plus the wall-time ranking at the smallest common error
level.  The numeric imports happen inside ``main`` so that the thread cap can
take effect first.
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_ENV = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
               "VECLIB_MAXIMUM_THREADS", "NUMEXPR_NUM_THREADS")

# (name, parser, default) for options settable from a config file; CLI flags
# override file values, which override these defaults.
_OPTION_SPEC = (
    ("preset", str, None),
    ("problem", str, None),
    ("disc", str, None),
    ("nodes", int, None),
    ("h", float, None),
    ("schemes", str, "eo1,eo2,acr1,acr2"),
    ("ks", str, None),
    ("rtol", float, 1e-7),
    ("atol", float, 1e-8),
    ("phi", str, "dense"),
    ("krylov_tol", float, 1e-7),
    ("reps", int, None),
    ("out", str, None),
)


def _cap_threads() -> None:
    """Cap BLAS/OpenMP pools before numpy loads; default is single-threaded."""
    cap = os.environ.get("STRANG_BENCH_THREADS", "1")
    for name in _THREAD_ENV:
        os.environ.setdefault(name, cap)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strang-bench",
        description="Convergence and efficiency benchmarks for boundary-"
                    "corrected Strang splitting.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a sweep and write a CSV")
    run.add_argument("--config", help="key = value file; flags override it")
    run.add_argument("--preset", choices=("fig1", "fig2", "fig3", "fig4"),
                     help="named study preset")
    run.add_argument("--problem", help="built-in problem id (p1d, p2da, p2db)")
    run.add_argument("--disc", choices=("spectral", "fd"),
                     help="discretization family; dimension follows the problem")
    run.add_argument("--nodes", type=int, help="spectral resolution per axis")
    run.add_argument("--h", type=float, help="finite-difference mesh width")
    run.add_argument("--schemes", help="comma list, default eo1,eo2,acr1,acr2")
    run.add_argument("--ks", help="comma list of macro stepsizes, decreasing")
    run.add_argument("--rtol", type=float, help="relative tolerance (default 1e-7)")
    run.add_argument("--atol", type=float, help="absolute tolerance (default 1e-8)")
    run.add_argument("--phi", choices=("dense", "krylov", "dst"),
                     help="phi-function strategy (default dense)")
    run.add_argument("--krylov-tol", type=float, dest="krylov_tol",
                     help="Krylov residual tolerance (default 1e-7)")
    run.add_argument("--reps", type=int,
                     help="timing repetitions, median reported (default 3)")
    run.add_argument("--out", help="output CSV path")

    order = sub.add_parser("order", help="summarize a CSV written by run")
    order.add_argument("csv", help="path to a benchmark CSV")
    return parser


def _merge_options(args: argparse.Namespace, bench) -> dict:
    """Layer flag values over config-file values over defaults."""
    from_file = {}
    if args.config:
        from_file = bench.parse_config_file(args.config)
    merged = {}
    for name, parse, default in _OPTION_SPEC:
        flag = getattr(args, name, None)
        if flag is not None:
            merged[name] = flag
        elif name in from_file:
            merged[name] = parse(from_file[name])
        else:
            merged[name] = default
    return merged


def _custom_configs(opt: dict, bench):
    """Build a single-sweep config from merged custom options."""
    if not opt["problem"]:
        raise SystemExit("error: --problem is required without --preset")
    if not opt["ks"]:
        raise SystemExit("error: --ks is required without --preset")
    if opt["disc"] not in ("spectral", "fd"):
        raise SystemExit("error: --disc must be 'spectral' or 'fd'")
    from .problems import builtin_problem
    problem = builtin_problem(opt["problem"])
    kind = f"{opt['disc']}{problem.dim}d"
    if opt["disc"] == "spectral":
        if opt["nodes"] is None:
            raise SystemExit("error: --nodes is required with --disc spectral")
        resolution = opt["nodes"]
    else:
        if opt["h"] is None:
            raise SystemExit("error: --h is required with --disc fd")
        resolution = opt["h"]
    from .integrators import ToleranceProfile
    cfg = bench.SweepConfig(
        problem=opt["problem"], disc=kind, resolution=resolution,
        schemes=tuple(s.strip() for s in opt["schemes"].split(",") if s.strip()),
        stepsizes=tuple(float(v) for v in opt["ks"].split(",") if v.strip()),
        tol=ToleranceProfile(rtol=opt["rtol"], atol=opt["atol"]),
        phi=opt["phi"], krylov_tol=opt["krylov_tol"],
        reps=opt["reps"] if opt["reps"] is not None else 3)
    return (cfg,)


def _cmd_run(args) -> int:
    from . import bench
    from dataclasses import replace

    opt = _merge_options(args, bench)
    if opt["preset"]:
        configs = bench.PRESETS[opt["preset"]]
        if opt["reps"] is not None:
            configs = tuple(replace(c, reps=opt["reps"]) for c in configs)
        out = opt["out"] or f"{opt['preset']}.csv"
    else:
        configs = _custom_configs(opt, bench)
        out = opt["out"] or "bench.csv"

    def show(rec):
        if rec.failed:
            print(f"{rec.scheme:7s} k={rec.k:.6e}  FAILED: {rec.failure}")
        else:
            print(f"{rec.scheme:7s} k={rec.k:.6e}  err={rec.max_error:.6e}  "
                  f"wall={rec.wall_seconds:.4f}s  setup={rec.setup_seconds:.4f}s")
        sys.stdout.flush()

    records = []
    for cfg in configs:
        records.extend(bench.run_sweep(cfg, progress=show))
    bench.write_csv(out, records)
    failed = [r for r in records if r.failed]
    print(f"wrote {len(records)} rows to {out}"
          + (f" ({len(failed)} failed)" if failed else ""))
    return 1 if failed else 0


def _cmd_order(args) -> int:
    from . import bench

    records = bench.read_csv(args.csv)
    if not records:
        print("no rows")
        return 1
    for scheme, rows in bench.group_by_scheme(records).items():
        try:
            summary = bench.observed_order(rows)
        except ValueError as exc:
            print(f"{scheme:7s} order unavailable: {exc}")
            continue
        pair = ", ".join(f"{p:.3f}" for p in summary.pairwise)
        print(f"{scheme:7s} slope={summary.slope:.3f}  pairwise=[{pair}]")
    report = bench.efficiency_ranking(records)
    print(f"\nwall-time ranking at error level {report.level:.3e}:")
    for e in report.entries:
        print(f"  {e.scheme:7s} {e.wall_seconds:10.4f}s  "
              f"(k={e.k:.6e}, err={e.max_error:.3e})")
    for scheme in report.skipped:
        print(f"  {scheme:7s} skipped: no successful rows")
    return 0


def main(argv=None) -> int:
    _cap_threads()
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_order(args)


if __name__ == "__main__":
    sys.exit(main())
