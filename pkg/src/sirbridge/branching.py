"""Galton-Watson analytics for SIR on trees.

An infected vertex with ``kappa`` susceptible children recovers after
``R ~ Exp(mu)`` and each child's infection clock is ``Exp(lam)``, so the
number of children it infects is ``X | R ~ Binomial(kappa, 1 - e^{-lam R})``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.special import betaln, gammaln

from .rng import SeedLike, make_rng

_ALTERNATING_SUM_MAX_KAPPA = 50


class SubcriticalRegime(ValueError):
    """The bound needs ``(d - 2) lam > mu``."""


@dataclass(frozen=True)
class OffspringDist:
    kappa: int
    lam: float
    mu: float

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.lam < 0 or self.mu < 0 or self.lam + self.mu <= 0:
            raise ValueError("need lam, mu >= 0 with lam + mu > 0")

    @cached_property
    def pmf(self) -> np.ndarray:
        return np.array([offspring_pmf(self, k) for k in range(self.kappa + 1)])

    def pgf(self, s):
        """Generating function ``E[s^X]``."""
        return np.polynomial.polynomial.polyval(s, self.pmf)

    def sample(self, size: int, seed: SeedLike = None) -> np.ndarray:
        """Draw X by racing the recovery clock against kappa infection clocks."""
        rng = make_rng(seed)
        r = rng.exponential(1.0 / self.mu, size) if self.mu > 0 else np.full(size, np.inf)
        p_hit = -np.expm1(-self.lam * r)
        return rng.binomial(self.kappa, p_hit)


def offspring_mean(dist: OffspringDist) -> float:
    return dist.kappa * dist.lam / (dist.lam + dist.mu)


def offspring_pmf(dist: OffspringDist, k: int) -> float:
    kappa, lam, mu = dist.kappa, dist.lam, dist.mu
    if not 0 <= k <= kappa:
        return 0.0
    if mu == 0:
        return 1.0 if k == kappa else 0.0
    if lam == 0:
        return 1.0 if k == 0 else 0.0
    if kappa <= _ALTERNATING_SUM_MAX_KAPPA:
        return _pmf_alternating(kappa, lam, mu, k)
    return _pmf_beta(kappa, lam, mu, k)


def _pmf_alternating(kappa, lam, mu, k) -> float:
    # C(kappa,k) sum_j C(k,j) (-1)^j mu / (mu + lam (kappa - k + j)), summed in
    # exact rationals: the terms cancel catastrophically in floating point
    lam_q, mu_q = Fraction(lam), Fraction(mu)
    total = Fraction(0)
    for j in range(k + 1):
        term = math.comb(k, j) * mu_q / (mu_q + lam_q * (kappa - k + j))
        total += -term if j % 2 else term
    return float(math.comb(kappa, k) * total)


def _pmf_beta(kappa, lam, mu, k) -> float:
    # substituting u = e^{-lam R} turns the mixture into a Beta integral:
    # (mu/lam) C(kappa,k) B(kappa - k + mu/lam, k + 1)
    a = mu / lam
    log_c = gammaln(kappa + 1) - gammaln(k + 1) - gammaln(kappa - k + 1)
    return float(math.exp(math.log(a) + log_c + betaln(kappa - k + a, k + 1)))


def p0_closed(d: int, lam: float, mu: float) -> float:
    """P{X = 0} for ``kappa = d - 1`` children."""
    return mu / (mu + (d - 1) * lam)


def p0_plus_p1_closed(d: int, lam: float, mu: float) -> float:
    return (d - 1) * mu / (mu + (d - 2) * lam) - (d - 2) * mu / (mu + (d - 1) * lam)


def extinction_probability(dist: OffspringDist, tol: float = 1e-12,
                           max_iter: int = 10**6) -> float:
    """Smallest fixed point of the generating function on [0, 1].

    Iterates ``s <- f(s)`` from 0, which increases monotonically to the
    smallest fixed point.  Near criticality convergence is slow; the
    iteration cap bounds the work.
    """
    pmf = dist.pmf
    if offspring_mean(dist) <= 1 and pmf[1] < 1:
        return 1.0
    s = 0.0
    for _ in range(max_iter):
        nxt = float(dist.pgf(s))
        if abs(nxt - s) < tol:
            return nxt
        s = nxt
    return s


def extinction_upper_bound(d: int, lam: float, mu: float) -> tuple[float, float]:
    """``(p0 / (1 - p0 - p1), mu / ((d-2) lam - mu))`` for ``kappa = d - 1``.

    Both dominate the exact extinction probability.
    """
    if not (d - 2) * lam > mu:
        raise SubcriticalRegime(f"(d-2) lam = {(d - 2) * lam} <= mu = {mu}")
    p0 = p0_closed(d, lam, mu)
    p01 = p0_plus_p1_closed(d, lam, mu)
    intermediate = p0 / (1 - p01)
    simple = mu / ((d - 2) * lam - mu)
    exact = extinction_probability(OffspringDist(d - 1, lam, mu))
    assert exact <= intermediate + 1e-9 and exact <= simple + 1e-9
    return intermediate, simple


def survival_lower_bound(d: int, lam: float, mu: float) -> float:
    """Asymptotic lower bound ``1 - mu / ((d-2) lam - mu)`` on escaping runs."""
    if not (d - 2) * lam > mu:
        raise SubcriticalRegime(f"(d-2) lam = {(d - 2) * lam} <= mu = {mu}")
    return 1 - mu / ((d - 2) * lam - mu)


def simulate_extinction(dist: OffspringDist, trials: int, cap: int = 10**5,
                        seed: SeedLike = None) -> float:
    """Monte-Carlo extinction frequency; total progeny reaching ``cap`` counts
    as survival.

    Generations are advanced for all trials at once: the offspring counts of
    a generation of size ``z`` are a Multinomial(z, pmf) split.
    """
    rng = make_rng(seed)
    pmf = dist.pmf
    ks = np.arange(len(pmf))
    alive = np.ones(trials, dtype=np.int64)
    total = np.ones(trials, dtype=np.int64)
    extinct = np.zeros(trials, dtype=bool)
    running = np.ones(trials, dtype=bool)
    while running.any():
        idx = np.flatnonzero(running)
        counts = rng.multinomial(alive[idx], pmf)
        nxt = counts @ ks
        alive[idx] = nxt
        total[idx] += nxt
        died = nxt == 0
        extinct[idx[died]] = True
        running[idx[died | (total[idx] >= cap)]] = False
    return float(extinct.mean())


def first_passage_time(d: int, m: int, seed: SeedLike = None) -> float:
    """Exact first time a depth-``m`` vertex joins the pure-growth process on
    the infinite ``d``-ary tree (each child of a member joins at unit rate).

    Best-first search over lazily sampled edge weights; use for small ``m``.
    """
    rng = make_rng(seed)
    heap = [(0.0, 0)]
    while heap:
        t, depth = heapq.heappop(heap)
        if depth == m:
            return t
        for w in rng.exponential(1.0, d).tolist():
            heapq.heappush(heap, (t + w, depth + 1))
    raise AssertionError("unreachable")


def first_passage_experiment(d: int, m: int, trials: int, seed: SeedLike = None) -> float:
    """Frequency of ``{B_m < m / (2 e d)}`` over ``trials`` runs.

    Only joins before the threshold matter, so each run explores the subtree
    of vertices joining before it, generation by generation, for all trials
    at once.
    """
    if m == 0:
        return 0.0
    rng = make_rng(seed)
    threshold = m / (2 * math.e * d)
    times = np.zeros(trials)
    owner = np.arange(trials)
    for _ in range(m):
        if times.size == 0:
            return 0.0
        child = np.repeat(times, d) + rng.exponential(1.0, times.size * d)
        keep = child < threshold
        times = child[keep]
        owner = np.repeat(owner, d)[keep]
    return np.unique(owner).size / trials


def prob_total_progeny_below(dist: OffspringDist, k: int) -> float:
    """P{total progeny < k}, root included.

    Uses the hitting-time identity ``P{N = n} = P{S_n = n - 1} / n`` with
    ``S_n`` a sum of n offspring counts; this is the exact probability that a
    tree run never reaches ``k`` unsusceptible vertices.
    """
    pmf = dist.pmf
    total = 0.0
    power = np.array([1.0])  # pmf of S_n, truncated to [0, k)
    for n in range(1, k):
        power = np.convolve(power, pmf)[:k]
        if n - 1 < power.size:
            total += power[n - 1] / n
    return float(min(total, 1.0))
