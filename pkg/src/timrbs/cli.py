"""Command-line entry point: ``timrbs {solve,sweep,compare,receiver}``.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence
(``solve`` only; sweeps flag rows instead), 4 I/O error.
"""
import argparse
from dataclasses import replace
import datetime
import json
import os
import sys
import time

from .errors import ConfigurationError, TimrbsError
from .field_grid import RandomPhase
from .receiver import receive
from .scenario import (
    Scenario, compare_layouts, emit_results, load_scenario, run_sweep, solve_point,
)

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_IO = 0, 2, 3, 4


def _scenario(args):
    s = load_scenario(args.scenario) if args.scenario else Scenario()
    if args.grid_n is not None:
        try:
            s = replace(s, grid=replace(s.grid, n=args.grid_n))
        except ConfigurationError as exc:
            raise ConfigurationError(exc.reason, "--grid-n") from None
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigurationError("must be positive", "--tol")
        s = replace(s, tol=args.tol)
    if args.seed is not None:
        s = replace(s, seed=RandomPhase(seed=args.seed, radius=s.layout.r_in))
    return s


def _sidecar(path, argv, started):
    with open(path + ".log", "w", encoding="utf-8") as fh:
        fh.write(f"started {datetime.datetime.fromtimestamp(started).isoformat()}\n")
        fh.write(f"elapsed_s {time.time() - started:.3f}\n")
        fh.write(f"argv {' '.join(argv)}\n")


def _write_json(obj, path):
    text = json.dumps(obj, indent=1) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args):
    s = _scenario(args)
    layout = s.layout if args.distance is None else replace(s.layout, D_t=args.distance)
    sol = solve_point(s, layout)
    _write_json(sol.summary(), args.out)
    return EXIT_OK if sol.converged else EXIT_NOT_CONVERGED


def _emit(rows, args):
    if args.out:
        emit_results(rows, args.format, args.out)
    else:
        # stdout: go through a temporary buffer so the format stays identical
        import tempfile
        with tempfile.TemporaryDirectory() as d:
            p = emit_results(rows, args.format, os.path.join(d, "rows." + args.format))
            with open(p, encoding="utf-8") as fh:
                sys.stdout.write(fh.read())


def cmd_sweep(args):
    rows = run_sweep(_scenario(args), threads=args.threads)
    _emit(rows, args)
    return EXIT_OK


def cmd_compare(args):
    s = _scenario(args)
    cmp = compare_layouts(s, threads=args.threads)
    summary = {
        layout: {f"{P:g}": d for P, d in cmp.max_reach[flag].items()}
        for layout, flag in (("TIM", True), ("no-TIM", False))
    }
    if args.out:
        root, ext = os.path.splitext(args.out)
        emit_results(cmp.rows[True], args.format, f"{root}.tim{ext}")
        emit_results(cmp.rows[False], args.format, f"{root}.no-tim{ext}")
        _write_json({"max_reach_m": summary}, f"{root}.summary.json")
    else:
        _write_json({"max_reach_m": summary}, None)
    return EXIT_OK


def cmd_receiver(args):
    s = load_scenario(args.scenario) if args.scenario else Scenario()
    rx = receive(args.p_out, args.theta, s.pv, s.apd)
    _write_json({"P_out_W": args.p_out, "theta": args.theta, "P_e_W": rx.P_e,
                 "i_pv_A": rx.i_pv, "v_pv_V": rx.v_pv, "C_bpsHz": rx.C}, args.out)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file (defaults to the reference design)")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--grid-n", type=int, help="samples per side, overrides the scenario")
    common.add_argument("--tol", type=float, help="Fox-Li convergence tolerance")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--seed", type=int, help="start from a random-phase field with this RNG seed")

    ap = argparse.ArgumentParser(prog="timrbs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="solve one cavity mode, print its summary")
    p.add_argument("--distance", type=float, help="transmission distance D_t [m]")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("sweep", parents=[common], help="run a scenario sweep")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("compare", parents=[common], help="sweep with and without the telescope")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("receiver", parents=[common], help="electric power and spectral efficiency")
    p.add_argument("--p-out", type=float, required=True, help="received beam power [W]")
    p.add_argument("--theta", type=float, required=True, help="fraction routed to the PV panel")
    p.set_defaults(func=cmd_receiver)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    started = time.time()
    try:
        code = args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TimrbsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        try:
            _sidecar(args.out, argv, started)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
