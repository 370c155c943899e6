"""Mean-field SIR on the complete graph and why (beta, mu) is not identified
from early data.

With ``beta = lam * n`` the fractions obey

    sigma' = -beta iota sigma,  iota' = beta iota sigma - mu iota,  rho' = mu iota.

While ``sigma ~ 1`` the observable ``iota + rho`` is close to
``a + b e^{c t}`` with ``c = beta - mu``, and every ``beta > c`` admits initial
conditions producing the same ``(a, b, c)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NoGrowthError(ValueError):
    pass


@dataclass(frozen=True)
class MeanFieldParams:
    beta: float
    mu: float
    init: tuple[float, float, float]

    def __post_init__(self):
        if min(self.init) < 0:
            raise ValueError("initial fractions must be nonnegative")
        if abs(sum(self.init) - 1) > 1e-12:
            raise ValueError(f"initial fractions sum to {sum(self.init)}, not 1")

    @classmethod
    def from_delta_gamma(cls, beta, mu, delta, gamma) -> "MeanFieldParams":
        return cls(beta, mu, (1 - delta - gamma, delta, gamma))

    @property
    def r0(self) -> float:
        return self.beta / self.mu


@dataclass
class MeanFieldCurve:
    t: np.ndarray
    sigma: np.ndarray
    iota: np.ndarray
    rho: np.ndarray

    @property
    def observed(self) -> np.ndarray:
        """``iota + rho``: the unsusceptible fraction."""
        return self.iota + self.rho


def _rk4(beta, mu, y0, dt, steps):
    out = np.empty((steps + 1, 3))
    s, i, r = y0
    out[0] = y0

    def f(s, i):
        inf = beta * i * s
        rec = mu * i
        return -inf, inf - rec, rec

    h2 = dt / 2
    for n in range(1, steps + 1):
        a1, b1, c1 = f(s, i)
        a2, b2, c2 = f(s + h2 * a1, i + h2 * b1)
        a3, b3, c3 = f(s + h2 * a2, i + h2 * b2)
        a4, b4, c4 = f(s + dt * a3, i + dt * b3)
        s += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        i += dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        r += dt / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        out[n] = s, i, r
    return out


def integrate(params: MeanFieldParams, t_end: float, dt: float = 1e-4) -> MeanFieldCurve:
    """Classical RK4 on the uniform grid ``0, dt, ..., t_end``."""
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    steps = max(1, round(t_end / dt))
    h = t_end / steps
    y = _rk4(params.beta, params.mu, params.init, h, steps)
    t = np.linspace(0.0, t_end, steps + 1)
    return MeanFieldCurve(t, y[:, 0], y[:, 1], y[:, 2])


def _linear_fit(e, v):
    # least squares for v ~ a + b e
    design = np.column_stack([np.ones_like(e), e])
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    resid = v - design @ coef
    return coef[0], coef[1], float(resid @ resid)


def fit_exponential(t, v, c_range=(1e-3, 20.0), grid: int = 400,
                    tol: float = 1e-12) -> tuple[float, float, float]:
    """Least-squares fit of ``v(t) ~ a + b e^{c t}``.

    ``(a, b)`` are solved linearly for each ``c``; ``c`` comes from a
    log-spaced grid refined by golden-section search.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if t.size < 8:
        raise ValueError("need at least 8 samples")
    if np.ptp(v) <= 1e-14 * max(1.0, np.abs(v).max()):
        raise NoGrowthError("samples are constant")
    t = t - t[0]
    t_scale = t[-1] if t[-1] > 0 else 1.0

    def sse(c):
        return _linear_fit(np.exp(c * t), v)[2]

    cs = np.geomspace(*c_range, grid)
    errs = [sse(c) for c in cs]
    j = int(np.argmin(errs))
    lo = cs[max(j - 1, 0)]
    hi = cs[min(j + 1, grid - 1)]
    inv_phi = (math.sqrt(5) - 1) / 2
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = sse(x1), sse(x2)
    while (hi - lo) * t_scale > tol:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = sse(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = sse(x2)
    c = (lo + hi) / 2
    a, b, _ = _linear_fit(np.exp(c * t), v)
    if b <= 0:
        raise NoGrowthError("no growing exponential component")
    return float(a), float(b), float(c)


def confound(a: float, b: float, c: float, beta: float) -> tuple[float, float, float]:
    """``(mu, delta, gamma)`` that reproduce ``a + b e^{ct}`` at the given beta."""
    if b <= 0 or c <= 0 or beta < c:
        raise ValueError("need b > 0 and beta >= c > 0")
    mu = beta - c
    return mu, c / beta * b, a + mu / beta * b


def early_time_approximation(params: MeanFieldParams) -> tuple[float, float, float]:
    """``(a, b, c)`` of the sigma ~ 1 approximation of ``iota + rho``."""
    _, delta, gamma = params.init
    c = params.beta - params.mu
    return gamma - params.mu / c * delta, params.beta / c * delta, c


def indistinguishability_gap(p1: MeanFieldParams, p2: MeanFieldParams, t_end: float,
                             dt: float = 1e-4) -> float:
    """Sup over the grid of the difference between the two observed curves."""
    c1, c2 = integrate(p1, t_end, dt), integrate(p2, t_end, dt)
    return float(np.max(np.abs(c1.observed - c2.observed)))


def time_dilation_check(params: MeanFieldParams, t_end: float, dt: float = 1e-4) -> float:
    """Max ``|iota(t) - iota_dilated(mu t)|``, the dilated system being the one
    with ``beta = R0`` and ``mu = 1`` run on the grid ``s = mu t``."""
    if params.mu <= 0:
        raise ValueError("dilation needs mu > 0")
    original = integrate(params, t_end, dt)
    dilated = integrate(MeanFieldParams(params.r0, 1.0, params.init),
                        params.mu * t_end, params.mu * dt)
    return float(np.max(np.abs(original.iota - dilated.iota)))


def dilation_pair_gap(p1: MeanFieldParams, p2: MeanFieldParams, t_end: float,
                      dt: float = 1e-4) -> float:
    """For equal R0 and initial conditions, ``iota_1(t) = iota_2((mu_1/mu_2) t)``;
    returns the max violation over ``[0, t_end]`` of the first curve."""
    if not math.isclose(p1.r0, p2.r0, rel_tol=1e-12) or p1.init != p2.init:
        raise ValueError("pair must share R0 and initial conditions")
    ratio = p1.mu / p2.mu
    c1 = integrate(p1, t_end, dt)
    c2 = integrate(p2, ratio * t_end, ratio * dt)
    return float(np.max(np.abs(c1.iota - c2.iota)))
