"""Command line entry point: ``sirbridge <command> [options]``."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import branching, meanfield
from .estimator import CSV_HEADER, estimate
from .experiments import Figure1Config, run_figure1, write_figure1, _number
from .graph import INF_RADIUS, load_edge_list, random_regular
from .rng import make_rng
from .sir import SirParams, read_infection_times, simulate, simulate_tree, trajectory_to_csv


def _float_or_inf(s: str) -> float:
    return math.inf if s.strip().lower() in ("inf", "infinity") else _number(s)


def _list(conv):
    return lambda s: [conv(x) for x in s.split(",")]


def _emit(text: str, args, name: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    params = SirParams(args.lam, args.mu)
    rng = make_rng(args.seed)
    if args.tree is not None:
        traj, _ = simulate_tree(args.tree, params, horizon=args.horizon,
                                u_cap=args.u_cap, seed=rng)
    else:
        if args.graph:
            g = load_edge_list(args.graph)
        elif args.regular:
            g = random_regular(args.regular[0], args.regular[1], seed=rng)
        else:
            raise ValueError("give --graph, --regular N D or --tree KAPPA")
        traj = simulate(g, params, patient_zero=args.patient_zero,
                        horizon=args.horizon, seed=rng)
    _emit(trajectory_to_csv(traj), args, "trajectory.csv")
    return 0


def cmd_estimate(args) -> int:
    g = load_edge_list(args.graph)
    traj = read_infection_times(args.times, g.num_vertices, horizon=args.horizon)
    out = estimate(g, traj, args.r, args.t0, args.t1, seed=args.seed)
    line = out.csv_row() + "\n"
    if args.header:
        line = CSV_HEADER + "\n" + line
    _emit(line, args, "estimate.csv")
    return 0


def cmd_figure1(args) -> int:
    config = Figure1Config.from_file(args.config) if args.config else Figure1Config()
    if args.seed is not None:
        config.master_seed = args.seed
    if args.trials is not None:
        config.trials_per_cell = args.trials
        config.break_threshold = min(config.break_threshold, args.trials)
    if args.d_values:
        config.d_values = args.d_values
    if args.lambda_values:
        config.lambda_values = args.lambda_values
    if args.kappa_rule:
        config.kappa_rule = args.kappa_rule
    config.__post_init__()
    grid = run_figure1(config, workers=args.threads)
    if args.out:
        write_figure1(grid, args.out)
    else:
        sys.stdout.write(grid.to_csv())
    return 0


def cmd_extinction(args) -> int:
    lines = ["kappa,lambda,mu,mean,extinction_exact,bound_intermediate,bound_simple"]
    for kappa in args.kappa:
        for lam in args.lam:
            for mu in args.mu:
                dist = branching.OffspringDist(kappa, lam, mu)
                q = branching.extinction_probability(dist)
                try:
                    inter, simple = branching.extinction_upper_bound(kappa + 1, lam, mu)
                    bounds = f"{inter:.17g},{simple:.17g}"
                except branching.SubcriticalRegime:
                    bounds = "na,na"
                mean = branching.offspring_mean(dist)
                lines.append(f"{kappa},{lam:.17g},{mu:.17g},{mean:.17g},{q:.17g},{bounds}")
    _emit("\n".join(lines) + "\n", args, "extinction.csv")
    return 0


def _svg_lines(curve: meanfield.MeanFieldCurve, stride: int) -> str:
    w, h, pad = 480, 300, 40
    t = curve.t[::stride]
    t_max = t[-1] if t[-1] > 0 else 1.0

    def path(y):
        pts = [f"{pad + (w - 2 * pad) * ti / t_max:.2f},{h - pad - (h - 2 * pad) * yi:.2f}"
               for ti, yi in zip(t, y[::stride])]
        return "M" + "L".join(pts)

    colors = {"sigma": "#3b528b", "iota": "#c0392b", "rho": "#21918c"}
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
             f'<rect x="{pad}" y="{pad}" width="{w - 2 * pad}" height="{h - 2 * pad}" '
             f'fill="none" stroke="#999"/>']
    for name, col in colors.items():
        parts.append(f'<path d="{path(getattr(curve, name))}" fill="none" stroke="{col}"/>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def cmd_meanfield(args) -> int:
    params = meanfield.MeanFieldParams.from_delta_gamma(args.beta, args.mu, args.delta, args.gamma)
    curve = meanfield.integrate(params, args.t_end, args.dt)
    stride = max(1, args.every)
    lines = ["t,sigma,iota,rho"]
    for i in range(0, len(curve.t), stride):
        lines.append(f"{curve.t[i]:.17g},{curve.sigma[i]:.17g},"
                     f"{curve.iota[i]:.17g},{curve.rho[i]:.17g}")
    window = curve.t <= args.fit_window
    idx = np.flatnonzero(window)[::max(1, window.sum() // 200)]
    a, b, c = meanfield.fit_exponential(curve.t[idx], curve.observed[idx])
    lines.append(f"# fit a={a:.17g} b={b:.17g} c={c:.17g} window={args.fit_window:g}")
    _emit("\n".join(lines) + "\n", args, "meanfield.csv")
    if args.svg:
        Path(args.svg).write_text(_svg_lines(curve, stride))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (u64)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker processes for batch commands")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")

    parser = argparse.ArgumentParser(prog="sirbridge", parents=[common],
                                     description="SIR simulation and bridge-based rate estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="sample one SIR path")
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--regular", type=int, nargs=2, metavar=("N", "D"))
    p.add_argument("--tree", type=int, metavar="KAPPA", help="infinite tree with KAPPA children")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--horizon", type=_float_or_inf, default=math.inf)
    p.add_argument("--u-cap", type=int)
    p.add_argument("--patient-zero", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="estimate (lambda, mu) from infection times")
    p.add_argument("--graph", required=True)
    p.add_argument("--times", required=True, help="CSV vertex,infection_time")
    p.add_argument("--r", type=_float_or_inf, default=INF_RADIUS)
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--horizon", type=_float_or_inf, default=math.inf,
                   help="end of the observation window (default: complete data)")
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("figure1", parents=[common], help="tree phase-transition grid")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--trials", type=int)
    p.add_argument("--d-values", type=_list(int))
    p.add_argument("--lambda-values", type=_list(_number))
    p.add_argument("--kappa-rule", choices=["d", "d-1"])
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("extinction", parents=[common], help="extinction probabilities and bounds")
    p.add_argument("--kappa", type=_list(int), default=[2, 3, 7])
    p.add_argument("--lam", type=_list(_number), default=[0.5, 1.0, 2.0])
    p.add_argument("--mu", type=_list(_number), default=[1.0])
    p.set_defaults(func=cmd_extinction)

    p = sub.add_parser("meanfield", parents=[common], help="mean-field curve and early-time fit")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--every", type=int, default=100, help="write every n-th grid point")
    p.add_argument("--fit-window", type=float, default=0.3)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_meanfield)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("seed", None), ("threads", 1), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"sirbridge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
