"""Command-line front end: every analysis as a reproducible artifact-writing run.

Each subcommand runs pure library calls, prints a short summary, and writes
one CSV plus one JSON manifest named by the content hash of the run
parameters (see artifacts.py).  Deterministic commands are bit-reproducible
from their manifests; Monte-Carlo runs are reproducible from the recorded
master seed and split rule.  Exit codes: 0 success, 1 numerical failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .artifacts import make_manifest, output_dir, write_artifacts
from .channels import load_transfer_table, make_channel, shannon_threshold
from .coupled import (CoupledEnsemble, coupled_threshold_lower_bound,
                      exit_curve_coupled, forward_de_coupled,
                      jit_threshold_coupled, reverse_de, shape_report)
from .simulate import run_trial, sample_graph, split_seeds
from .uncoupled import (RegularEnsemble, exit_curve, forward_de, jit_threshold,
                        jit_threshold_upper_bound)


def _add_ensemble_flags(p, coupled="optional"):
    p.add_argument("--dl", type=int, required=True, help="variable degree")
    p.add_argument("--dr", type=int, required=True, help="check degree")
    if coupled != "never":
        req = coupled == "required"
        p.add_argument("--L", type=int, default=None, required=req,
                       help="chain half-width (sections -L..L); coupled mode")
        p.add_argument("--w", type=int, default=None, required=req,
                       help="coupling window width")


def _add_common_flags(p, channels=("dec", "bec")):
    p.add_argument("--channel", choices=channels, default="dec",
                   help="erasure channel kind")
    p.add_argument("--out-dir", default=None,
                   help="artifact directory (default: $SCDE_OUT_DIR or .)")


def _build_ensemble(args, parser):
    if getattr(args, "L", None) is None and getattr(args, "w", None) is None:
        return RegularEnsemble(args.dl, args.dr)
    if getattr(args, "L", None) is None or getattr(args, "w", None) is None:
        parser.error("--L and --w must be given together")
    return CoupledEnsemble(args.dl, args.dr, args.L, args.w)


def _ens_params(ens):
    return {"dl": ens.dl, "dr": ens.dr,
            "L": getattr(ens, "L", None), "w": getattr(ens, "w", None)}


def _emit(args, command, params, tolerances, seeds, header, rows, summary):
    manifest = make_manifest(command, args._argv, params, tolerances, seeds,
                             version=__version__)
    csv_path, _ = write_artifacts(manifest, header, rows,
                                  output_dir(args.out_dir))
    print(summary)
    print(f"wrote {csv_path}")
    return 0


def cmd_threshold(args, parser):
    ens = _build_ensemble(args, parser)
    coupled = isinstance(ens, CoupledEnsemble)
    tol = args.tol_eps if args.tol_eps else (1.0e-6 if coupled else 1.0e-7)
    if coupled:
        thr = jit_threshold_coupled(ens, args.channel, lo=args.lo, hi=args.hi,
                                    tol_eps=tol, max_sweeps=args.max_iter)
    else:
        thr = jit_threshold(ens, args.channel, tol_eps=tol,
                            max_iter=args.max_iter)
    params = {**_ens_params(ens), "channel": args.channel}
    tols = {"tol_eps": tol, "max_iter": args.max_iter,
            "lo": args.lo, "hi": args.hi}
    header = ["dl", "dr", "L", "w", "channel", "tol_eps", "threshold"]
    row = [ens.dl, ens.dr, getattr(ens, "L", ""), getattr(ens, "w", ""),
           args.channel, tol, f"{thr:.8f}"]
    return _emit(args, "threshold", params, tols, {}, header, [row],
                 f"threshold {thr:.7f}")


def cmd_exit(args, parser):
    ens = _build_ensemble(args, parser)
    if isinstance(ens, CoupledEnsemble):
        grid = np.linspace(args.chi_min, args.chi_max, args.chi_steps)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                futures = [pool.submit(_coupled_exit_point, ens, args.channel,
                                       float(c), args.tol) for c in grid]
                points = [f.result() for f in futures]
        else:
            points = [_coupled_exit_point(ens, args.channel, float(c),
                                          args.tol) for c in grid]
        header = ["chi", "exit_value", "epsilon"]
        rows = [[f"{c:.6f}", _fmt(e_val), _fmt(eps)] for c, e_val, eps in points]
        n_ok = sum(np.isfinite(eps) for _, _, eps in points)
        summary = f"coupled exit curve: {n_ok}/{len(points)} chi points solved"
        params = {**_ens_params(ens), "channel": args.channel,
                  "chi_min": args.chi_min, "chi_max": args.chi_max,
                  "chi_steps": args.chi_steps}
    else:
        points = exit_curve(ens, args.n_points, channel_kind=args.channel)
        header = ["x", "exit_value", "epsilon"]
        rows = [[f"{p.x:.6f}", _fmt(p.exit_value), _fmt(p.epsilon)]
                for p in points]
        n_ok = sum(np.isfinite(p.epsilon) for p in points)
        summary = f"exit curve: {n_ok}/{len(points)} grid points solved"
        params = {**_ens_params(ens), "channel": args.channel,
                  "n_points": args.n_points}
    return _emit(args, "exit", params, {"tol": args.tol}, {}, header, rows,
                 summary)


def _coupled_exit_point(ens, channel, chi, tol):
    point = exit_curve_coupled(ens, channel, [chi], tol=tol)[0]
    return point.chi, point.exit_value, point.epsilon


def _fmt(value):
    return "nan" if not np.isfinite(value) else f"{value:.10g}"


def cmd_forward_de(args, parser):
    ens = _build_ensemble(args, parser)
    if args.channel == "custom":
        if not args.table:
            parser.error("--channel custom requires --table")
        ch = make_channel("custom", args.epsilon,
                          table=load_transfer_table(args.table))
    else:
        ch = make_channel(args.channel, args.epsilon)
    params = {**_ens_params(ens), "channel": args.channel,
              "epsilon": args.epsilon, "x0": args.x0, "table": args.table,
              "schedule": args.schedule}
    tols = {"tol": args.tol, "max_iter": args.max_iter}
    if isinstance(ens, CoupledEnsemble):
        fp = forward_de_coupled(ens, ch, x0=args.x0, tol=args.tol,
                                max_sweeps=args.max_iter,
                                schedule=args.schedule)
        header = ["section", "x"]
        rows = [[i - ens.L, f"{v:.12g}"]
                for i, v in enumerate(fp.constellation.values)]
        summary = (f"status {fp.status}  entropy {fp.entropy:.6g}  "
                   f"residual {fp.residual:.3g}  sweeps {fp.iterations}")
    else:
        trace = forward_de(ens, ch, x0=args.x0, tol=args.tol,
                           max_iter=args.max_iter)
        header = ["iter", "x"]
        rows = [[i, f"{v:.12g}"] for i, v in enumerate(trace.history)]
        summary = (f"final_x {trace.final_x:.6g}  iterations "
                   f"{trace.iterations}  converged_to_zero "
                   f"{trace.converged_to_zero}")
    return _emit(args, "forward-de", params, tols, {}, header, rows, summary)


def cmd_reverse_de(args, parser):
    ens = _build_ensemble(args, parser)
    fp = reverse_de(ens, args.channel, args.chi, tol=args.tol,
                    max_iter=args.max_iter)
    header = ["section", "x"]
    rows = [[i - ens.L, f"{v:.12g}"]
            for i, v in enumerate(fp.constellation.values)]
    summary = (f"epsilon {fp.epsilon:.7f}  entropy {fp.entropy:.6g}  "
               f"residual {fp.residual:.3g}  iterations {fp.iterations}")
    params = {**_ens_params(ens), "channel": args.channel, "chi": args.chi}
    return _emit(args, "reverse-de", params,
                 {"tol": args.tol, "max_iter": args.max_iter}, {},
                 header, rows, summary)


def cmd_constellation(args, parser):
    ens = _build_ensemble(args, parser)
    if args.chi is not None:
        fp = reverse_de(ens, args.channel, args.chi, tol=args.tol,
                        max_iter=args.max_iter)
        mode = f"chi {args.chi}"
    else:
        ch = make_channel(args.channel, args.epsilon)
        fp = forward_de_coupled(ens, ch, tol=args.tol,
                                max_sweeps=args.max_iter)
        mode = f"epsilon {args.epsilon}"
    header = ["section", "x"]
    rows = [[i - ens.L, f"{v:.12g}"]
            for i, v in enumerate(fp.constellation.values)]
    lines = [f"{mode}  epsilon {fp.epsilon:.7f}  entropy {fp.entropy:.6g}  "
             f"status {fp.status}"]
    if fp.constellation.maximum > 0.0 and not fp.decoded:
        rep = shape_report(fp)
        lines.append(
            f"shape: symmetric={rep.is_symmetric} (asymmetry {rep.asymmetry:.3g})"
            f"  unimodal={rep.is_unimodal}  plateau {rep.plateau_value:.6g}"
            f"  transition_width {rep.transition_width}")
    else:
        lines.append("shape: constellation is all zero")
    params = {**_ens_params(ens), "channel": args.channel, "chi": args.chi,
              "epsilon": args.epsilon}
    return _emit(args, "constellation", params,
                 {"tol": args.tol, "max_iter": args.max_iter}, {},
                 header, rows, "\n".join(lines))


def cmd_simulate(args, parser):
    ens = _build_ensemble(args, parser)
    eps_grid = [float(e) for e in args.epsilons.split(",") if e.strip()]
    if not eps_grid:
        parser.error("--epsilons must list at least one value")
    seeds = split_seeds(args.master_seed, len(eps_grid) * args.trials)
    jobs = [(eps, int(seeds[i * args.trials + k]))
            for i, eps in enumerate(eps_grid) for k in range(args.trials)]
    if args.dump_graph:
        graph = sample_graph(ens, args.M, args.master_seed)
        graph.dump_edges(args.dump_graph)
        print(f"wrote graph edge list {args.dump_graph}")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(run_trial, ens, args.M, eps, seed,
                                   args.max_iter) for eps, seed in jobs]
            trials = [f.result() for f in futures]
    else:
        trials = [run_trial(ens, args.M, eps, seed, args.max_iter)
                  for eps, seed in jobs]
    header = ["epsilon", "seed", "residual_erasure_fraction", "iterations"]
    rows = [[t.epsilon, t.seed, f"{t.residual_erasure_fraction:.10g}",
             t.iterations] for t in trials]
    decoded = sum(t.residual_erasure_fraction == 0.0 for t in trials)
    params = {**_ens_params(ens), "M": args.M, "epsilons": eps_grid,
              "trials": args.trials}
    seeds_info = {"master_seed": args.master_seed,
                  "split": "SeedSequence(master).generate_state(n, uint64)"}
    return _emit(args, "simulate", params,
                 {"max_iter": args.max_iter}, seeds_info, header, rows,
                 f"{decoded}/{len(trials)} trials decoded fully")


def cmd_bounds(args, parser):
    ens = _build_ensemble(args, parser)
    if args.rate is not None:
        rate = args.rate
    elif isinstance(ens, CoupledEnsemble):
        rate = ens.design_rate()
    else:
        rate = ens.rate
    shannon = shannon_threshold(rate)
    try:
        upper = jit_threshold_upper_bound(RegularEnsemble(ens.dl, ens.dr))
        upper_s = f"{upper:.7f}"
    except ValueError:
        upper_s = "nan"
    lower = coupled_threshold_lower_bound(ens)
    header = ["dl", "dr", "L", "w", "rate", "shannon_threshold",
              "uncoupled_upper_bound", "coupled_lower_bound"]
    row = [ens.dl, ens.dr, getattr(ens, "L", ""), getattr(ens, "w", ""),
           f"{rate:.8f}", f"{shannon:.8f}", upper_s, f"{lower:.8f}"]
    summary = (f"rate {rate:.6f}  shannon {shannon:.6f}  "
               f"uncoupled upper bound {upper_s}  coupled lower bound "
               f"{lower:.6f}")
    params = {**_ens_params(ens), "rate": args.rate}
    return _emit(args, "bounds", params, {}, {}, header, [row], summary)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="scde",
        description="Density evolution and finite-length simulation for "
                    "spatially coupled LDPC ensembles on erasure channels.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="decoding threshold by bisection")
    _add_ensemble_flags(p)
    _add_common_flags(p)
    p.add_argument("--tol-eps", type=float, default=None,
                   help="bisection width (default 1e-7 uncoupled, 1e-6 coupled)")
    p.add_argument("--max-iter", type=int, default=1_000_000,
                   help="DE iteration budget per probe")
    p.add_argument("--lo", type=float, default=0.0, help="bracket low end")
    p.add_argument("--hi", type=float, default=1.0, help="bracket high end")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("exit", help="EXIT curve (fixed points vs epsilon)")
    _add_ensemble_flags(p)
    _add_common_flags(p)
    p.add_argument("--n-points", type=int, default=2001,
                   help="uncoupled x-grid size")
    p.add_argument("--chi-min", type=float, default=0.025)
    p.add_argument("--chi-max", type=float, default=0.6)
    p.add_argument("--chi-steps", type=int, default=24,
                   help="coupled chi-grid size")
    p.add_argument("--tol", type=float, default=1.0e-12)
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for the coupled chi grid")
    p.set_defaults(func=cmd_exit)

    p = sub.add_parser("forward-de", help="forward density evolution run")
    _add_ensemble_flags(p)
    _add_common_flags(p, channels=("dec", "bec", "custom"))
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--table", default=None,
                   help="CSV transfer table for --channel custom")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1.0e-12)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--schedule", default="parallel",
                   choices=("parallel", "round-robin", "random-admissible"))
    p.set_defaults(func=cmd_forward_de)

    p = sub.add_parser("reverse-de", help="entropy-anchored fixed point")
    _add_ensemble_flags(p, coupled="required")
    _add_common_flags(p)
    p.add_argument("--chi", type=float, required=True,
                   help="target mean erasure of the constellation")
    p.add_argument("--tol", type=float, default=1.0e-12)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=cmd_reverse_de)

    p = sub.add_parser("constellation",
                       help="constellation dump with shape diagnostics")
    _add_ensemble_flags(p, coupled="required")
    _add_common_flags(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--chi", type=float, default=None,
                      help="reverse DE at this entropy")
    mode.add_argument("--epsilon", type=float, default=None,
                      help="forward DE at this channel value")
    p.add_argument("--tol", type=float, default=1.0e-12)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.set_defaults(func=cmd_constellation)

    p = sub.add_parser("simulate", help="finite-length Monte-Carlo decoding")
    _add_ensemble_flags(p)
    _add_common_flags(p)
    p.add_argument("--M", type=int, required=True,
                   help="variables per section (M*dl divisible by dr)")
    p.add_argument("--epsilons", required=True,
                   help="comma-separated channel erasure values")
    p.add_argument("--trials", type=int, default=10,
                   help="trials per epsilon")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes across trials")
    p.add_argument("--dump-graph", default=None,
                   help="also write one sampled graph's edge list here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="capacity and threshold bounds")
    _add_ensemble_flags(p)
    _add_common_flags(p)
    p.add_argument("--rate", type=float, default=None,
                   help="rate for the Shannon threshold (default: ensemble rate)")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args, parser)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
