"""Classical Fisher information of a position measurement on the falling probe."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .freefall import PhysParams, evolved_state
from .numerics import derivative
from .qfi import REL_STEP, superposition_qfi_numeric
from .states import DEFAULT_POINTS, SuperpositionSpec, WaveGrid, uniform_grid

P_FLOOR = 1e-300
CLAMP_FRACTION = 1e-10


@dataclass(frozen=True)
class FisherReport:
    value: float
    method: str
    params: PhysParams
    spec: object = None

    def __post_init__(self):
        if self.method not in ("closed_form", "quadrature"):
            raise DomainError(f"unknown method {self.method!r}")
        if not self.value >= 0:
            raise DomainError(f"Fisher information must be non-negative, got {self.value}")


@dataclass(frozen=True)
class RatioPoint:
    a: float
    sigma: float
    gamma_S: float
    gamma_H: float


def fisher_position(state_builder, g, dg=None):
    """Fisher information of p(x|g) = |psi(x, t)|^2 by grid quadrature.

    Parameters
    ----------
    state_builder : callable
        ``g -> WaveGrid``; every call must return the same grid.
    g : float
        Nominal value of the parameter.
    dg : float, optional
        First finite-difference step, default ``1e-4 g``; one Richardson level.
    """
    if dg is None:
        dg = REL_STEP * (abs(g) if g != 0 else 1.0)
    u = state_builder(g)
    p = u.density
    dp = derivative(lambda gv: _checked(state_builder(gv), u).density, g, h0=dg, levels=1)
    safe = p >= P_FLOOR
    total = float(np.sum(dp[safe] ** 2 / p[safe]) * u.dx)
    clamped = float(np.sum(dp[~safe] ** 2) / P_FLOOR * u.dx)
    if clamped > CLAMP_FRACTION * max(total, 1e-300) and clamped > 0:
        raise NumericError(f"clamped region carries {clamped:.3e} of Fisher information {total:.3e}")
    if total < -1e-10:
        raise NumericError(f"negative Fisher information {total}")
    return max(total, 0.0)


def _checked(v, ref):
    if not v.same_grid(ref):
        raise DomainError("state_builder must return states on one fixed grid")
    return v


def freefall_builder(spec, p, n_points=DEFAULT_POINTS):
    """``g -> WaveGrid`` of the evolved probe on the nominal-g window."""
    x_lo, x_hi = evolved_state(spec, p).window()
    x, dx = uniform_grid(x_lo, x_hi, n_points)
    return lambda g: WaveGrid(x_lo, dx, evolved_state(spec, p.replace(gravity=g))(x))


def fisher_freefall(spec, p, n_points=DEFAULT_POINTS):
    builder = freefall_builder(spec, p, n_points)
    return FisherReport(fisher_position(builder, p.gravity), "quadrature", p, spec)


def f_loc_closed(m, sigma, t):
    """Position-measurement FI m^2 t^4 sigma^2 / (t^2 + 4 m^2 sigma^4) of a Gaussian."""
    if not (m > 0 and sigma > 0 and t >= 0):
        raise DomainError("need m > 0, sigma > 0, t >= 0")
    if t == 0:
        return 0.0
    return m * m * t ** 4 * sigma * sigma / (t * t + 4.0 * m * m * sigma ** 4)


def optimal_width(m, t):
    """Width sqrt(t / (2 m)) that maximises :func:`f_loc_closed`.

    dF/dsigma is proportional to t^2 - 4 m^2 sigma^4.
    """
    if not (m > 0 and t > 0):
        raise DomainError("need m > 0 and t > 0")
    return math.sqrt(t / (2.0 * m))


def qfi_minimizing_width(m, t):
    """Width sqrt(t) / (2 sqrt(m)) that minimises the localized QFI.

    It is not a stationary point of :func:`f_loc_closed`; it sits a factor
    sqrt(2) below :func:`optimal_width`.
    """
    if not (m > 0 and t > 0):
        raise DomainError("need m > 0 and t > 0")
    return math.sqrt(t) / (2.0 * math.sqrt(m))


def gamma_ratios(a, sigma, p0=0.0, m=0.5, t=1.0, g=1.0, n_points=DEFAULT_POINTS):
    """gamma_S = F_sup / F_loc and gamma_H = F_sup / H_sup at one (a, sigma)."""
    p = PhysParams(m, g, t)
    spec = SuperpositionSpec(a, p0, sigma, 0.0)
    f_sup = fisher_freefall(spec, p, n_points).value
    f_loc = f_loc_closed(m, sigma, t)
    h_sup = superposition_qfi_numeric(m, sigma, t, a, p0, g, n_points)
    if f_loc <= 0 or h_sup <= 0:
        raise DomainError("ratio denominator vanishes (t = 0?)")
    return RatioPoint(a=a, sigma=sigma, gamma_S=f_sup / f_loc, gamma_H=f_sup / h_sup)


def ratio_sweep(a_values, sigmas, p0=0.0, m=0.5, t=1.0, g=1.0, threads=1):
    """RatioPoints for every (sigma, a) pair, sigma-major, in input order."""
    jobs = [(a, s) for s in sigmas for a in a_values]
    run = lambda job: gamma_ratios(job[0], job[1], p0, m, t, g)
    if threads <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))
