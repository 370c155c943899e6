"""Cross-infection statistics and the bridge-based estimator of (lam, mu).

A cross-infection time ``CI(lam, mu, tau)`` is the time an infected vertex
takes to infect one particular susceptible neighbour, racing its own
recovery, truncated at ``tau``.  Its hit probability ``p`` and conditional
mean ``q`` determine the rates through ``lam = p/q`` and ``mu = (1-p)/q``
up to an ``e^{-m}`` bias, ``m = (lam + mu) tau``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, ball, bridges
from .rng import SeedLike, make_rng
from .sir import Trajectory, TreeArena


class DegenerateParameters(ValueError):
    pass


class NoHitsError(ValueError):
    """Every sample hit the truncation, so the conditional mean is undefined."""


class Break(str, enum.Enum):
    NO_BRIDGE_SOURCES = "NoBridgeSources"
    NO_HITS = "NoHits"
    T0_INFINITE = "T0Infinite"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class CiParams:
    lam: float
    mu: float
    tau: float

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0 or self.lam + self.mu <= 0:
            raise DegenerateParameters("need lam, mu >= 0 with lam + mu > 0")
        if not self.tau > 0:
            raise DegenerateParameters("tau must be positive")

    @property
    def m(self) -> float:
        return (self.lam + self.mu) * self.tau


def sample_ci(params: CiParams, size: int | None = None, seed: SeedLike = None):
    """Draw from CI(lam, mu, tau) by racing the two exponential clocks.

    The atom at ``tau`` has mass ``(mu + lam e^{-m}) / (lam + mu)``.
    """
    rng = make_rng(seed)
    n = 1 if size is None else size
    if params.lam == 0:
        z = np.full(n, params.tau)
    else:
        infect = rng.exponential(1.0 / params.lam, n)
        recover = rng.exponential(1.0 / params.mu, n) if params.mu > 0 else np.full(n, math.inf)
        z = np.where(infect < recover, np.minimum(infect, params.tau), params.tau)
    return float(z[0]) if size is None else z


def ci_p(params: CiParams) -> float:
    lam, mu = params.lam, params.mu
    return lam / (lam + mu) * -math.expm1(-params.m)


def ci_q(params: CiParams) -> float:
    if params.lam == 0:
        raise DegenerateParameters("q conditions on a null event when lam = 0")
    m = params.m
    one_minus_e = -math.expm1(-m)
    return (one_minus_e - m * math.exp(-m)) / one_minus_e / (params.lam + params.mu)


def recover_params(P: float, Q: float) -> tuple[float, float]:
    if not 0 <= P <= 1:
        raise ValueError(f"P={P} is not a probability")
    if Q <= 0 or math.isnan(Q):
        raise NoHitsError("Q is zero or undefined")
    return P / Q, (1 - P) / Q


def recovery_bounds(lam: float, mu: float, tau: float, epsilon: float = 0.0):
    """``((lo, hi) for P/Q, (lo, hi) for (1-P)/Q)`` guaranteed when m >= 2."""
    m = (lam + mu) * tau
    if m < 2:
        raise ValueError(f"m = {m} < 2 is outside the bound's hypothesis")
    grow = math.exp(2 * epsilon)
    shrink = math.exp(-2 * epsilon)
    lam_hi = grow * (1 + 2 * (m + 1) * math.exp(-m)) * lam
    mu_hi = grow * (1 + 2 * (lam / mu + m + 1) * math.exp(-m)) * mu
    return (shrink * lam, lam_hi), (shrink * mu, mu_hi)


def recovery_check(lam, mu, tau, epsilon, P, Q) -> bool:
    """Do ``P/Q`` and ``(1-P)/Q`` fall in the guaranteed bands?

    P, 1-P and Q must lie within ``e^{+-epsilon}`` of p, 1-p and q.
    """
    params = CiParams(lam, mu, tau)
    p, q = ci_p(params), ci_q(params)
    lo, hi = math.exp(-epsilon) * (1 - 1e-12), math.exp(epsilon) * (1 + 1e-12)
    if not (lo <= P / p <= hi and lo <= (1 - P) / (1 - p) <= hi and lo <= Q / q <= hi):
        raise ValueError("P, Q are outside the e^{+-epsilon} bands of p, q")
    (l_lo, l_hi), (m_lo, m_hi) = recovery_bounds(lam, mu, tau, epsilon)
    lam_hat, mu_hat = P / Q, (1 - P) / Q
    tol = 1e-12
    return (l_lo * (1 - tol) <= lam_hat <= l_hi * (1 + tol)
            and m_lo * (1 - tol) <= mu_hat <= m_hi * (1 + tol))


def aggregate_pq(samples, tau: float) -> tuple[float, float, int]:
    """``(P, Q, |A'|)`` from truncated cross-infection samples."""
    z = np.asarray(samples, dtype=float)
    if z.size == 0:
        raise ValueError("no samples")
    hits = z < tau
    k = int(hits.sum())
    if k == 0:
        raise NoHitsError("all samples equal tau")
    return k / z.size, float(z[hits].mean()), k


@dataclass
class EstimateOutcome:
    num_bridge_sources: int = 0
    num_hits: int = 0
    P: float = math.nan
    Q: float = math.nan
    lambda_hat: float = math.nan
    mu_hat: float = math.nan
    broke: Break | None = None
    sources: tuple = field(default=(), repr=False)
    targets: tuple = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.broke is None

    def max_rel_error(self, lam: float, mu: float) -> float:
        return max(abs(self.lambda_hat - lam) / lam, abs(self.mu_hat - mu) / mu)

    def csv_row(self) -> str:
        def f(x):
            return "na" if math.isnan(x) else format(x, ".17g")
        broke = self.broke.value if self.broke else ""
        return (f"{f(self.lambda_hat)},{f(self.mu_hat)},{f(self.P)},{f(self.Q)},"
                f"{self.num_bridge_sources},{self.num_hits},{broke}")


CSV_HEADER = "lambda_hat,mu_hat,P,Q,num_bridge_sources,num_hits,broke"


def _finish(sources, candidates, T, horizon, t0, t1, rng) -> EstimateOutcome:
    """Shared tail: draw b(a), build Z_a, aggregate.  ``candidates[i]`` is the
    sorted list B_a for ``sources[i]``."""
    if not sources:
        return EstimateOutcome(broke=Break.NO_BRIDGE_SOURCES)
    tau = t1 - t0
    targets = []
    z = np.empty(len(sources))
    for i, cands in enumerate(candidates):
        b = cands[int(rng.integers(len(cands)))]
        targets.append(b)
        tb = T[b]
        if math.isnan(tb):
            if horizon < t1:
                return EstimateOutcome(num_bridge_sources=len(sources),
                                       broke=Break.UNRESOLVED,
                                       sources=tuple(sources), targets=tuple(targets))
            tb = math.inf
        z[i] = min(tb - t0, tau)
    out = EstimateOutcome(num_bridge_sources=len(sources),
                          sources=tuple(sources), targets=tuple(targets))
    try:
        out.P, out.Q, out.num_hits = aggregate_pq(z, tau)
    except NoHitsError:
        out.P = 0.0
        out.broke = Break.NO_HITS
        return out
    out.lambda_hat, out.mu_hat = recover_params(out.P, out.Q)
    return out


def _check_times(traj: Trajectory, t0: float, t1: float):
    if not 0 <= t0 < t1:
        raise ValueError(f"need 0 <= t0 < t1, got t0={t0}, t1={t1}")


def estimate(g: Graph, traj: Trajectory, r: float, t0: float, t1: float,
             seed: SeedLike = None) -> EstimateOutcome:
    """Estimate (lam, mu) from infection times on a graph.

    Take the radius-``r`` ball around patient zero, the set ``U`` of its
    vertices infected by ``t0``, and the ball's bridges leaving ``U``.  For
    every source ``a`` in ``U`` pick one bridge neighbour ``b(a)`` uniformly
    and record ``Z_a = min(T(b(a)) - t0, t1 - t0)``.
    """
    _check_times(traj, t0, t1)
    T = traj.infection_time
    if t0 > traj.horizon:
        return EstimateOutcome(broke=Break.UNRESOLVED)
    finite = T[np.isfinite(T)]
    pz = traj.patient_zero
    if np.count_nonzero(finite == finite.min()) != 1 or T[pz] != finite.min():
        raise ValueError("patient zero is not the unique minimiser of the infection times")
    rng = make_rng(seed)
    view = ball(g, [pz], r)
    in_u = {u for u in view.vertices() if T[u] <= t0}
    groups: dict[int, list[int]] = {}
    for u, v in bridges(view):
        if u in in_u and v not in in_u:
            groups.setdefault(u, []).append(v)
        elif v in in_u and u not in in_u:
            groups.setdefault(v, []).append(u)
    sources = sorted(groups)
    return _finish(sources, [sorted(groups[a]) for a in sources], T, traj.horizon, t0, t1, rng)


def estimate_tree(traj: Trajectory, arena: TreeArena, t0: float, t1: float,
                  seed: SeedLike = None) -> EstimateOutcome:
    """Same estimator on a tree arena with infinite radius.

    Every tree edge is a bridge and a non-root vertex's parent is infected
    before it, so ``B_a`` is just the children of ``a`` not infected by t0.
    Draws are made in the same order as :func:`estimate`, so the two agree
    exactly on ``arena.to_graph()``.
    """
    _check_times(traj, t0, t1)
    if t0 > traj.horizon:
        return EstimateOutcome(broke=Break.UNRESOLVED)
    rng = make_rng(seed)
    T = traj.infection_time
    sources, candidates = [], []
    for a in np.flatnonzero(T <= t0).tolist():
        kids = arena.children(a)
        if not kids:
            continue
        kt = T[kids.start:kids.stop]
        free = np.flatnonzero(~(kt <= t0))
        if free.size:
            sources.append(a)
            candidates.append((free + kids.start).tolist())
    return _finish(sources, candidates, T, traj.horizon, t0, t1, rng)
