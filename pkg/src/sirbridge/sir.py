"""Exact sampling of the SIR Markov chain on graphs and on infinite trees.

Time conventions, used throughout the package:

* ``inf`` means *never* (a vertex that will never be infected, or an
  infected vertex with no recovery channel);
* ``nan`` means *unresolved*: the simulation stopped before the value was
  determined.  The two are never conflated.
"""
from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph
from .rng import SeedLike, make_rng

INF = math.inf
UNRESOLVED = math.nan

# stop reasons
ABSORBED = "absorbed"
HORIZON = "horizon"
U_CAP = "u_cap"
SAFETY_CAP = "safety_cap"


@dataclass(frozen=True)
class SirParams:
    lam: float
    mu: float

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0:
            raise ValueError("rates must be nonnegative")
        if self.lam == 0 and self.mu == 0:
            raise ValueError("lambda and mu cannot both be zero")


@dataclass
class Trajectory:
    """One sample path, stored as per-vertex event times.

    ``horizon`` is the time through which the path is fully resolved; it is
    ``inf`` once the path is known for all time (absorption).
    """

    infection_time: np.ndarray
    recovery_time: np.ndarray
    horizon: float
    patient_zero: int
    stop_reason: str = HORIZON

    @property
    def absorbed(self) -> bool:
        return self.stop_reason == ABSORBED

    @property
    def num_vertices(self) -> int:
        return len(self.infection_time)

    def final_size(self) -> int:
        """Number of vertices ever infected; only defined after absorption."""
        if not self.absorbed:
            raise ValueError("final size of an unabsorbed path is unresolved")
        return int(np.isfinite(self.infection_time).sum())

    def scaled(self, s: float) -> "Trajectory":
        """Same path with the clock sped down by ``s`` (all times times s)."""
        return Trajectory(self.infection_time * s, self.recovery_time * s,
                          self.horizon * s, self.patient_zero, self.stop_reason)


@dataclass
class TreeArena:
    """Lazily materialised infinite tree with ``kappa`` children per vertex.

    Vertex ids are dense in materialisation order and the root is 0.  The
    children of ``v`` are ``first_child[v] .. first_child[v] + kappa - 1``
    and exist only once ``v`` has been infected (``first_child[v] == -1``
    otherwise).
    """

    kappa: int
    parent: np.ndarray
    first_child: np.ndarray

    @property
    def num_vertices(self) -> int:
        return len(self.parent)

    def children(self, v: int) -> range:
        c = int(self.first_child[v])
        if c < 0:
            return range(0)
        return range(c, c + self.kappa)

    def to_graph(self) -> Graph:
        edges = [(int(self.parent[v]), v) for v in range(1, self.num_vertices)]
        return Graph.from_edges(self.num_vertices, edges)


def _pick_patient_zero(g: Graph, patient_zero, rng) -> int:
    if g.num_vertices == 0:
        raise ValueError("graph is empty")
    if patient_zero is None:
        return int(rng.integers(g.num_vertices))
    if not 0 <= patient_zero < g.num_vertices:
        raise ValueError(f"patient zero {patient_zero} not in graph")
    return int(patient_zero)


def _exp(rng, rate: float) -> float:
    return rng.exponential(1.0 / rate) if rate > 0 else INF


def _mask_after(inf_t, rec_t, h):
    """Mark recoveries drawn past ``h`` as unresolved; ``inf`` (mu = 0) stays."""
    late = np.isfinite(rec_t) & (rec_t > h)
    rec_t[late] = UNRESOLVED
    rec_t[np.isnan(inf_t)] = UNRESOLVED


def _finish(inf_t, rec_t, horizon, pz, absorbed) -> Trajectory:
    if absorbed:
        return Trajectory(inf_t, rec_t, INF, pz, ABSORBED)
    # on a general graph nothing is known about vertices not infected by h
    inf_t[~(inf_t <= horizon)] = UNRESOLVED
    _mask_after(inf_t, rec_t, horizon)
    return Trajectory(inf_t, rec_t, horizon, pz, HORIZON)


def simulate(g: Graph, params: SirParams, patient_zero: int | None = None,
             horizon: float = INF, seed: SeedLike = None) -> Trajectory:
    """Next-reaction sampler.

    On infection of ``u`` at ``t`` draw its recovery time ``t + Exp(mu)`` and
    a candidate ``t + Exp(lam)`` for every susceptible neighbour.  Candidates
    that beat the recovery go in a heap; a popped candidate fires only if the
    target is still susceptible.  Memorylessness makes this exact.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    rng = make_rng(seed)
    pz = _pick_patient_zero(g, patient_zero, rng)
    n = g.num_vertices
    inf_t = np.full(n, INF)
    rec_t = np.full(n, INF)
    adj = g.adjacency
    lam, mu = params.lam, params.mu
    heap: list[tuple[float, int]] = [(0.0, pz)]
    while heap:
        t, u = heap[0]
        if t > horizon:
            return _finish(inf_t, rec_t, horizon, pz, absorbed=False)
        heapq.heappop(heap)
        if inf_t[u] < INF:
            continue
        inf_t[u] = t
        r = t + _exp(rng, mu)
        rec_t[u] = r
        if lam == 0:
            continue
        for w in adj[u]:
            if inf_t[w] == INF:
                c = t + rng.exponential(1.0 / lam)
                if c < r:
                    heapq.heappush(heap, (c, w))
    return _finish(inf_t, rec_t, horizon, pz, absorbed=True)


def simulate_gillespie(g: Graph, params: SirParams, patient_zero: int | None = None,
                       horizon: float = INF, seed: SeedLike = None) -> Trajectory:
    """Aggregate-rate (direct method) sampler.

    The total rate is ``lam * e(I, S) + mu * |I|``; the next event is a
    recovery of a uniform infected vertex with probability ``mu|I| / total``
    and otherwise an infection of a susceptible vertex chosen proportionally
    to its number of infected neighbours.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    rng = make_rng(seed)
    pz = _pick_patient_zero(g, patient_zero, rng)
    n = g.num_vertices
    adj = g.adjacency
    lam, mu = params.lam, params.mu
    inf_t = np.full(n, INF)
    rec_t = np.full(n, INF)
    pressure = [0] * n  # infected neighbours of each susceptible vertex
    state = [0] * n  # 0 S, 1 I, 2 R
    infected: list[int] = []
    si_edges = 0
    t = 0.0

    def infect(u, t):
        nonlocal si_edges
        state[u] = 1
        inf_t[u] = t
        infected.append(u)
        si_edges -= pressure[u]
        for w in adj[u]:
            if state[w] == 0:
                pressure[w] += 1
                si_edges += 1

    infect(pz, 0.0)
    while infected:
        total = lam * si_edges + mu * len(infected)
        if total == 0:
            # no infection pressure and no recovery channel: frozen forever
            break
        t += rng.exponential(1.0 / total)
        if t > horizon:
            if mu > 0:
                rec_t[infected] = UNRESOLVED
            return _finish(inf_t, rec_t, horizon, pz, absorbed=False)
        x = rng.random() * total
        if x < mu * len(infected):
            i = int(x / mu) if mu > 0 else 0
            i = min(i, len(infected) - 1)
            u = infected[i]
            infected[i] = infected[-1]
            infected.pop()
            state[u] = 2
            rec_t[u] = t
            for w in adj[u]:
                if state[w] == 0:
                    pressure[w] -= 1
                    si_edges -= 1
        else:
            target = (x - mu * len(infected)) / lam
            acc = 0
            chosen = -1
            for w in range(n):
                if state[w] == 0 and pressure[w]:
                    acc += pressure[w]
                    chosen = w
                    if acc > target:
                        break
            infect(chosen, t)
    return _finish(inf_t, rec_t, horizon, pz, absorbed=True)


def simulate_tree(kappa: int, params: SirParams, horizon: float = INF,
                  u_cap: int | None = None, seed: SeedLike = None,
                  max_vertices: int = 10**6) -> tuple[Trajectory, TreeArena]:
    """SIR from the root of the infinite tree with ``kappa`` children per vertex.

    Children are materialised when their parent is infected, together with
    their infection times: a child's only possible infector is its parent, so
    its infection time is ``t_parent + Exp(lam)`` if that beats the parent's
    recovery and ``inf`` otherwise.  Materialised infection times are therefore
    resolved even past the horizon.  Stops at the horizon, when ``|U|``
    reaches ``u_cap``, at absorption, or when more than ``max_vertices``
    vertices would be materialised (reported as ``safety_cap``).
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if math.isinf(horizon) and u_cap is None and params.mu == 0 and params.lam > 0:
        raise ValueError("process never absorbs; give a finite horizon or u_cap")
    rng = make_rng(seed)
    lam, mu = params.lam, params.mu
    inf_t = [0.0]
    rec_t = [INF]
    parent = [-1]
    first_child = [-1]
    heap: list[tuple[float, int]] = [(0.0, 0)]
    infected = 0
    stop = None
    last_t = 0.0
    while heap:
        t, v = heap[0]
        if t > horizon:
            stop = HORIZON
            break
        if len(parent) + kappa > max_vertices:
            stop = SAFETY_CAP
            break
        heapq.heappop(heap)
        infected += 1
        last_t = t
        r = t + _exp(rng, mu)
        rec_t[v] = r
        c0 = len(parent)
        first_child[v] = c0
        if lam > 0:
            ct = t + rng.exponential(1.0 / lam, size=kappa)
            ct[ct >= r] = INF
        else:
            ct = np.full(kappa, INF)
        times = ct.tolist()
        inf_t.extend(times)
        rec_t.extend([INF if x == INF else UNRESOLVED for x in times])
        parent.extend([v] * kappa)
        first_child.extend([-1] * kappa)
        for i, x in enumerate(times):
            if x < INF:
                heapq.heappush(heap, (x, c0 + i))
        if u_cap is not None and infected >= u_cap:
            stop = U_CAP
            break
    arena = TreeArena(kappa, np.asarray(parent), np.asarray(first_child))
    inf_a = np.asarray(inf_t)
    rec_a = np.asarray(rec_t)
    if stop is None:
        return Trajectory(inf_a, rec_a, INF, 0, ABSORBED), arena
    h = horizon if stop == HORIZON else last_t
    _mask_after(inf_a, rec_a, h)
    return Trajectory(inf_a, rec_a, float(h), 0, stop), arena


def unsusceptible_at(traj: Trajectory, t: float) -> np.ndarray:
    """Sorted ids of vertices with infection time <= t."""
    if t > traj.horizon:
        raise ValueError(f"t={t} is beyond the resolved horizon {traj.horizon}")
    times = traj.infection_time
    return np.flatnonzero(np.isfinite(times) & (times <= t))


def first_time_u_reaches(traj: Trajectory, k: int) -> float:
    """Time the unsusceptible set first has ``k`` members.

    ``inf`` if the path absorbed with fewer infections, ``nan`` if the
    horizon came first.
    """
    if k < 1:
        return 0.0
    times = traj.infection_time
    known = np.sort(times[np.isfinite(times) & (times <= traj.horizon)])
    if len(known) >= k:
        return float(known[k - 1])
    return INF if traj.absorbed else UNRESOLVED


def validate_trajectory(traj: Trajectory, neighbors) -> list[str]:
    """Check the path invariants; returns a list of problems (empty if fine).

    ``neighbors`` maps a vertex to its neighbours (``Graph.neighbors`` or an
    equivalent callable for a tree arena).
    """
    problems = []
    inf_t, rec_t = traj.infection_time, traj.recovery_time
    pz = traj.patient_zero
    if inf_t[pz] != 0.0:
        problems.append("patient zero not infected at time 0")
    finite = np.flatnonzero(np.isfinite(inf_t))
    for v in finite.tolist():
        if not math.isnan(rec_t[v]) and not rec_t[v] > inf_t[v]:
            problems.append(f"vertex {v} recovers at {rec_t[v]} before infection {inf_t[v]}")
        if v == pz:
            continue
        ok = False
        for u in neighbors(v):
            tu, ru = inf_t[u], rec_t[u]
            if tu < inf_t[v] and (math.isnan(ru) or ru > inf_t[v]):
                ok = True
                break
        if not ok:
            problems.append(f"vertex {v} infected at {inf_t[v]} with no infectious neighbour")
    return problems


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "na"
    if math.isinf(x):
        return "inf"
    return format(x, ".17g")


def _parse(s: str) -> float:
    s = s.strip()
    if s == "na":
        return UNRESOLVED
    return float(s)


def trajectory_to_csv(traj: Trajectory, path: str | Path | None = None) -> str:
    buf = io.StringIO()
    buf.write("vertex,infection_time,recovery_time\n")
    for v, (a, b) in enumerate(zip(traj.infection_time.tolist(), traj.recovery_time.tolist())):
        buf.write(f"{v},{_fmt(a)},{_fmt(b)}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_infection_times(path: str | Path, num_vertices: int,
                         horizon: float = INF) -> Trajectory:
    """Load a ``vertex,infection_time[,recovery_time]`` CSV into a Trajectory.

    Unlisted vertices are treated as never infected when ``horizon`` is
    infinite and as unresolved otherwise.  The minimum infection time must
    be unique; it identifies patient zero.
    """
    fill = INF if math.isinf(horizon) else UNRESOLVED
    inf_t = np.full(num_vertices, fill)
    rec_t = np.full(num_vertices, UNRESOLVED)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            v = int(row["vertex"])
            if not 0 <= v < num_vertices:
                raise ValueError(f"vertex {v} not in graph")
            inf_t[v] = _parse(row["infection_time"])
            if row.get("recovery_time") not in (None, ""):
                rec_t[v] = _parse(row["recovery_time"])
    if not np.any(np.isfinite(inf_t)):
        raise ValueError("no infected vertex in file")
    t_min = np.nanmin(inf_t)
    minimizers = np.flatnonzero(inf_t == t_min)
    if len(minimizers) != 1:
        raise ValueError(f"infection-time minimum {t_min} is not unique: {minimizers.tolist()}")
    inf_t = inf_t - t_min
    rec_t = rec_t - t_min
    reason = ABSORBED if math.isinf(horizon) else HORIZON
    return Trajectory(inf_t, rec_t, horizon - t_min, int(minimizers[0]), reason)
