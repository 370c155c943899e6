"""Batch experiments: the tree phase-transition grid, estimator sweeps on
random regular graphs, and their CSV / SVG output.

Every trial draws from its own stream ``stream(master_seed, *indices)`` and
results are reduced in index order, so output bytes do not depend on the
number of workers.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .estimator import CSV_HEADER, Break, EstimateOutcome, estimate, estimate_tree
from .graph import INF_RADIUS, Graph, load_edge_list, random_regular
from .rng import stream
from .sir import ABSORBED, SAFETY_CAP, SirParams, first_time_u_reaches, simulate, simulate_tree

MAX_TREE_VERTICES = 10**6


@dataclass
class Figure1Config:
    d_values: list[int] = field(default_factory=lambda: [2**k for k in range(1, 8)])
    lambda_values: list[float] = field(default_factory=lambda: [2.0**j for j in range(-5, 2)])
    mu: float = 1.0
    trials_per_cell: int = 100
    u_threshold: int = 100
    tau_after_t0: float = 4.0
    break_threshold: int = 80
    master_seed: int = 0
    # children per tree vertex: "d" or "d-1"
    kappa_rule: str = "d"

    def __post_init__(self):
        if not self.d_values or not self.lambda_values:
            raise ValueError("d_values and lambda_values must be nonempty")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if self.break_threshold > self.trials_per_cell:
            raise ValueError("break_threshold cannot exceed trials_per_cell")
        if self.kappa_rule not in ("d", "d-1"):
            raise ValueError("kappa_rule must be 'd' or 'd-1'")

    def kappa(self, d: int) -> int:
        return d if self.kappa_rule == "d" else d - 1

    @classmethod
    def from_file(cls, path: str | Path) -> "Figure1Config":
        """Plain ``key = value`` lines; lists are comma separated and numbers
        may be written as fractions (``1/32``)."""
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(kinds[key], raw)
        return cls(**values)


def _number(raw: str) -> float:
    return float(Fraction(raw.strip()))


def _parse_value(kind: str, raw: str):
    if kind == "list[int]":
        return [int(x) for x in raw.split(",")]
    if kind == "list[float]":
        return [_number(x) for x in raw.split(",")]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return _number(raw)
    return raw


@dataclass
class CellResult:
    d: int
    lam: float
    mu: float
    trials: int
    prop_t0_inf: float
    broke_count: int
    mean_max_rel_err: float | None


@dataclass
class GridResult:
    config: Figure1Config
    cells: list[CellResult]

    CSV_HEADER = "d,lambda,mu,trials,prop_t0_inf,broke_count,mean_max_rel_err"

    def cell(self, d: int, lam: float) -> CellResult:
        for c in self.cells:
            if c.d == d and c.lam == lam:
                return c
        raise KeyError((d, lam))

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for c in self.cells:
            err = "na" if c.mean_max_rel_err is None else _fmt(c.mean_max_rel_err)
            lines.append(f"{c.d},{_fmt(c.lam)},{_fmt(c.mu)},{c.trials},"
                         f"{_fmt(c.prop_t0_inf)},{c.broke_count},{err}")
        return "\n".join(lines) + "\n"

    def metadata(self) -> dict:
        return {
            "config": asdict(self.config),
            "tree": f"infinite tree, kappa = {self.config.kappa_rule} children per vertex (root included)",
            "safety_caps": {"max_tree_vertices": MAX_TREE_VERTICES},
            "estimator": "r = inf, t0 = T0, t1 = T0 + tau_after_t0",
        }


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "na"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def figure1_trial(kappa: int, lam: float, mu: float, u_threshold: int, tau: float,
                  rng) -> tuple[bool, EstimateOutcome]:
    """One tree run: ``(T0 is infinite, estimator outcome)``."""
    traj, arena = simulate_tree(kappa, SirParams(lam, mu), u_cap=u_threshold,
                                seed=rng, max_vertices=MAX_TREE_VERTICES)
    if traj.stop_reason == ABSORBED:
        return True, EstimateOutcome(broke=Break.T0_INFINITE)
    if traj.stop_reason == SAFETY_CAP:
        return False, EstimateOutcome(broke=Break.UNRESOLVED)
    t0 = traj.horizon
    return False, estimate_tree(traj, arena, t0, t0 + tau, seed=rng)


def run_cell(config: Figure1Config, i: int, j: int) -> CellResult:
    d, lam = config.d_values[i], config.lambda_values[j]
    kappa, mu = config.kappa(d), config.mu
    t0_inf = 0
    errors = []
    for trial in range(config.trials_per_cell):
        rng = stream(config.master_seed, i, j, trial)
        infinite, out = figure1_trial(kappa, lam, mu, config.u_threshold,
                                      config.tau_after_t0, rng)
        t0_inf += infinite
        if out.ok:
            errors.append(out.max_rel_error(lam, mu))
    broke = config.trials_per_cell - len(errors)
    mean_err = None
    if broke < config.break_threshold:
        mean_err = float(np.mean(errors))
    return CellResult(d, lam, mu, config.trials_per_cell,
                      t0_inf / config.trials_per_cell, broke, mean_err)


def _run_cell_task(args):
    return run_cell(*args)


def _ordered_map(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def run_figure1(config: Figure1Config, workers: int = 1) -> GridResult:
    tasks = [(config, i, j) for i in range(len(config.d_values))
             for j in range(len(config.lambda_values))]
    return GridResult(config, _ordered_map(_run_cell_task, tasks, workers))


# --- estimator sweeps on finite graphs ------------------------------------

def resolve_graph(graph_spec, seed: int) -> Graph:
    """``Graph``, edge-list path, or ``(n, d)`` for a random regular graph."""
    if isinstance(graph_spec, Graph):
        return graph_spec
    if isinstance(graph_spec, (str, Path)):
        return load_edge_list(graph_spec)
    n, d = graph_spec
    return random_regular(int(n), int(d), seed=stream(seed, 2**31))


def asymptotic_schedule(n: int, d: int, lam: float, c: float = 0.9,
                     alpha_frac: float = 0.5, beta_frac: float = 0.99):
    """``(r, t0, t1)`` with ``r = floor(c log_{d-1} n)`` and ``t0 < t1`` below
    ``c / (2 e (d-1) lam) * log_{d-1} n``; the fractions place alpha and beta
    inside that window."""
    log_n = math.log(n) / math.log(d - 1)
    ceiling = c / (2 * math.e * (d - 1) * lam)
    return math.floor(c * log_n), alpha_frac * ceiling * log_n, beta_frac * ceiling * log_n


SWEEP_HEADER = "trial,patient_zero,t0,t1," + CSV_HEADER


def _parse_t0(rule):
    if isinstance(rule, str) and rule.startswith("T0:"):
        return None, int(rule[3:])
    return float(rule), None


def _sweep_trial(args) -> str:
    g, params, r, t0_rule, t1_rule, seed, trial = args
    rng = stream(seed, trial)
    fixed_t0, k = _parse_t0(t0_rule)
    relative = isinstance(t1_rule, str) and t1_rule.startswith("+")
    if fixed_t0 is not None and not relative:
        horizon = float(t1_rule)
    elif fixed_t0 is not None:
        horizon = fixed_t0 + float(t1_rule[1:])
    else:
        horizon = math.inf
    traj = simulate(g, params, horizon=horizon, seed=rng)
    t0 = fixed_t0 if fixed_t0 is not None else first_time_u_reaches(traj, k)
    if math.isinf(t0) or math.isnan(t0):
        out = EstimateOutcome(broke=Break.T0_INFINITE if math.isinf(t0) else Break.UNRESOLVED)
        t1 = math.nan
    else:
        t1 = t0 + float(t1_rule[1:]) if relative else float(t1_rule)
        out = estimate(g, traj, r, t0, t1, seed=rng)
    return f"{trial},{traj.patient_zero},{_fmt(t0)},{_fmt(t1)},{out.csv_row()}"


def run_estimator_sweep(graph_spec, params: SirParams, r: float = INF_RADIUS,
                        t0_rule="T0:100", t1_rule="+4", trials: int = 100,
                        seed: int = 0, workers: int = 1) -> str:
    """One CSV row per trial; each trial a fresh epidemic from a uniform
    patient zero on the same graph.

    ``t0_rule`` is a time or ``"T0:k"`` (first time ``|U| >= k``);
    ``t1_rule`` is a time or ``"+tau"`` relative to t0.
    """
    g = resolve_graph(graph_spec, seed)
    tasks = [(g, params, r, t0_rule, t1_rule, seed, i) for i in range(trials)]
    rows = _ordered_map(_sweep_trial, tasks, workers)
    return "\n".join([SWEEP_HEADER, *rows]) + "\n"


# --- SVG output ---------------------------------------------------------------

_VIRIDIS = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]
ERR_RANGE = (0.01, 10.0)


def _color(x: float) -> str:
    x = min(max(x, 0.0), 1.0) * (len(_VIRIDIS) - 1)
    i = min(int(x), len(_VIRIDIS) - 2)
    f = x - i
    rgb = [round(a + (b - a) * f) for a, b in zip(_VIRIDIS[i], _VIRIDIS[i + 1])]
    return "#%02x%02x%02x" % tuple(rgb)


def _lambda_label(lam: float) -> str:
    j = math.log2(lam)
    if j == int(j):
        return f"2^{int(j)}"
    return format(lam, "g")


def render_heatmap(grid: GridResult, which: str, out_path: str | Path | None = None) -> str:
    """SVG heatmap with d across and lambda up.

    ``left``: proportion of runs with T0 = inf on [0, 1].  ``right``: mean
    max relative error on a log scale over ``ERR_RANGE``; masked cells are
    black with a white X.
    """
    if which not in ("left", "right"):
        raise ValueError("which must be 'left' or 'right'")
    if not grid.cells:
        raise ValueError("empty grid")
    ds, lams = grid.config.d_values, grid.config.lambda_values
    cell, margin_l, margin_t = 40, 60, 30
    width = margin_l + cell * len(ds) + 20
    height = margin_t + cell * len(lams) + 50
    title = "P(T0 = inf)" if which == "left" else "mean max relative error"
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
              f'viewBox="0 0 {width} {height}">\n')
    out.write(f'<text x="{width // 2}" y="18" text-anchor="middle" font-size="13">{title}</text>\n')
    lo, hi = (math.log10(v) for v in ERR_RANGE)
    for i, d in enumerate(ds):
        for j, lam in enumerate(lams):
            c = grid.cell(d, lam)
            x = margin_l + i * cell
            y = margin_t + (len(lams) - 1 - j) * cell
            masked = which == "right" and c.broke_count >= grid.config.break_threshold
            if masked:
                fill = "#000000"
            elif which == "left":
                fill = _color(c.prop_t0_inf)
            elif c.mean_max_rel_err is None:
                fill = "#808080"
            else:
                e = max(c.mean_max_rel_err, 1e-300)
                fill = _color((math.log10(e) - lo) / (hi - lo))
            out.write(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" '
                      f'data-d="{d}" data-lambda="{_fmt(lam)}"/>\n')
            if masked:
                p = 8
                out.write(f'<path d="M{x + p} {y + p}L{x + cell - p} {y + cell - p}'
                          f'M{x + cell - p} {y + p}L{x + p} {y + cell - p}" '
                          f'stroke="#ffffff" stroke-width="3" class="mask"/>\n')
    for i, d in enumerate(ds):
        x = margin_l + i * cell + cell // 2
        y = margin_t + len(lams) * cell + 16
        out.write(f'<text x="{x}" y="{y}" text-anchor="middle" font-size="11">{d}</text>\n')
    out.write(f'<text x="{margin_l + cell * len(ds) // 2}" y="{height - 8}" '
              f'text-anchor="middle" font-size="12">d</text>\n')
    for j, lam in enumerate(lams):
        y = margin_t + (len(lams) - 1 - j) * cell + cell // 2 + 4
        out.write(f'<text x="{margin_l - 6}" y="{y}" text-anchor="end" font-size="11">'
                  f'{_lambda_label(lam)}</text>\n')
    out.write(f'<text x="12" y="{margin_t + cell * len(lams) // 2}" font-size="12" '
              f'text-anchor="middle">&#955;</text>\n')
    out.write("</svg>\n")
    text = out.getvalue()
    if out_path is not None:
        Path(out_path).write_text(text)
    return text


def write_figure1(grid: GridResult, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "figure1.csv").write_text(grid.to_csv())
    (out_dir / "figure1_meta.json").write_text(json.dumps(grid.metadata(), indent=2, sort_keys=True) + "\n")
    render_heatmap(grid, "left", out_dir / "figure1_left.svg")
    render_heatmap(grid, "right", out_dir / "figure1_right.svg")
