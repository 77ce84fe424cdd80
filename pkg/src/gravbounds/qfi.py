"""Quantum Fisher information for g: three numerical routes and the closed forms.

Routes
------
overlap    4 (<d psi|d psi> - |<d psi|psi>|^2) with d psi from finite differences
           of the exactly evolved state (the reference every closed form is
           tested against).
generator  4 Var(m t x + t^2 p / 2) on the initial state.
variance   4 Var(m t x - t^2 p / 2) on the evolved state, the same generator
           carried to time t.

The position-only variance 4 m^2 t^2 Var_x(psi_t) is kept as
:func:`position_variance_qfi`; it overestimates the t^4 term by a factor of
four and is not a QFI route.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .errors import DomainError
from .freefall import PhysParams, evolved_state
from .numerics import airy_zeros, derivative
from .states import (DEFAULT_POINTS, GaussianSpec, SuperpositionSpec, WaveGrid,
                     inner_product, sample_gaussian, sample_superposition, uniform_grid)

REL_STEP = 1e-4


@dataclass(frozen=True)
class QfiReport:
    value: float
    route: str
    params: PhysParams
    spec: object = None

    def __post_init__(self):
        if self.route not in ("overlap", "generator", "variance", "closed_form"):
            raise DomainError(f"unknown route {self.route!r}")


@dataclass(frozen=True)
class EnhancementConstants:
    mu: float
    xi: float


def qfi_overlap(psi, dpsi):
    """Pure-state QFI 4 (<d psi|d psi> - |<d psi|psi>|^2)."""
    dd = inner_product(dpsi, dpsi).real
    dp = inner_product(dpsi, psi)
    return float(4.0 * (dd - abs(dp) ** 2))


def state_derivative(builder, g, rel_step=REL_STEP, levels=1):
    """d/dg of ``builder(g)`` (an amplitude array on a fixed grid)."""
    step = rel_step * (abs(g) if g != 0 else 1.0)
    return derivative(builder, g, h0=step, levels=levels)


def freefall_qfi_numeric(spec, p, n_points=DEFAULT_POINTS, rel_step=REL_STEP):
    """Overlap-route QFI for g of a free-falling probe.

    All finite-difference states are evaluated on the default window of the
    state at the nominal g.
    """
    x_lo, x_hi = evolved_state(spec, p).window()
    x, dx = uniform_grid(x_lo, x_hi, n_points)
    builder = lambda g: evolved_state(spec, p.replace(gravity=g))(x)
    psi = WaveGrid(x_lo, dx, builder(p.gravity))
    dpsi = WaveGrid(x_lo, dx, state_derivative(builder, p.gravity, rel_step))
    return qfi_overlap(psi, dpsi)


def _momentum_action(psi, dx):
    # fourth-order central difference; the two points at each edge are dropped
    d = (-psi[4:] + 8.0 * psi[3:-1] - 8.0 * psi[1:-3] + psi[:-4]) / (12.0 * dx)
    return -1j * d


def _generator_variance(u, cx, cp):
    """Var(cx * x + cp * p) on a grid state, edges dropped."""
    psi = u.amplitudes
    inner = psi[2:-2]
    x = u.x[2:-2]
    gpsi = cx * x * inner + cp * _momentum_action(psi, u.dx)
    norm = np.vdot(inner, inner).real
    mean = np.vdot(inner, gpsi).real / norm
    return float(np.vdot(gpsi, gpsi).real / norm - mean * mean)


def qfi_generator(psi0, p):
    """4 Var(m t x + t^2 p / 2) on the initial state."""
    m, t = p.mass, p.time
    return 4.0 * _generator_variance(psi0, m * t, 0.5 * t * t)


def qfi_variance_form(psi_t, m, t):
    """4 Var(m t x - t^2 p / 2) on the evolved state."""
    return 4.0 * _generator_variance(psi_t, m * t, -0.5 * t * t)


def position_variance_qfi(psi_t, m, t):
    """4 m^2 t^2 Var_x(psi_t); differs from the QFI once the packet spreads."""
    x = psi_t.x
    rho = psi_t.density
    mean = np.sum(x * rho) / rho.sum()
    return float(4.0 * m * m * t * t * np.sum((x - mean) ** 2 * rho) / rho.sum())


def h_loc_closed(m, sigma, t):
    """Localised-probe QFI t^4 / (4 sigma^2) + 4 m^2 t^2 sigma^2."""
    if not (m > 0 and sigma > 0 and t >= 0):
        raise DomainError("need m > 0, sigma > 0, t >= 0")
    return t ** 4 / (4.0 * sigma * sigma) + 4.0 * m * m * t * t * sigma * sigma


def crossover_time(m, sigma):
    """Time 4 m sigma^2 after which the t^4 term of :func:`h_loc_closed` dominates."""
    return 4.0 * m * sigma * sigma


def _overlap_weight(a, sigma, p0):
    s = a * a / (2.0 * sigma * sigma) + 2.0 * sigma * sigma * p0 * p0
    return s * expit(-s)


def h_sup_closed(m, sigma, t, a, p0=0.0):
    """Closed-form QFI of the two-packet probe (general a, p0)."""
    if a < 0:
        raise DomainError("half separation must be non-negative")
    w = _overlap_weight(a, sigma, p0)
    s2 = sigma * sigma
    return float(h_loc_closed(m, sigma, t)
                 + 8.0 * m * m * s2 * t * t * (a * a / (2.0 * s2) - w)
                 + 4.0 * a * m * p0 * t ** 3
                 + t ** 4 / (2.0 * s2) * (2.0 * s2 * p0 * p0 - w))


def h_sup_reference_no_momentum(m, sigma, t, a):
    """Reference p0 = 0 special case, kept verbatim; its t^4 term is wrong."""
    th = math.tanh(a * a / (4.0 * sigma * sigma))
    return (h_loc_closed(m, sigma, t) + 2.0 * a * a * m * m * t * t * (1.0 + th)
            + a * a * t ** 4 / (8.0 * sigma * sigma) * (1.0 - th))


def h_sup_reference_no_separation(m, sigma, t, p0):
    """Reference a = 0 special case, kept verbatim; its t^2 term is wrong."""
    th = math.tanh(sigma * sigma * p0 * p0)
    return (h_loc_closed(m, sigma, t) + 0.5 * t ** 4 * p0 * p0 * (1.0 + th)
            - 0.5 * t * t * p0 * p0 * m * m * sigma ** 4 * (1.0 - th))


def superposition_qfi_numeric(m, sigma, t, a, p0=0.0, g=1.0, n_points=DEFAULT_POINTS):
    spec = SuperpositionSpec(a, p0, sigma, 0.0)
    return freefall_qfi_numeric(spec, PhysParams(m, g, t), n_points)


def superposition_discrepancy_report(m, sigma, t, a_values, p0=0.0, g=1.0):
    """Rows comparing the numeric QFI with the general closed form and the reference special case."""
    rows = []
    for a in a_values:
        oracle = superposition_qfi_numeric(m, sigma, t, a, p0, g)
        general = h_sup_closed(m, sigma, t, a, p0)
        if p0 == 0:
            reference = h_sup_reference_no_momentum(m, sigma, t, a)
        elif a == 0:
            reference = h_sup_reference_no_separation(m, sigma, t, p0)
        else:
            reference = general
        rows.append({
            "a": a, "p0": p0, "numeric": oracle, "closed_form": general,
            "reference_special_case": reference,
            "rel_err_closed_form": abs(general - oracle) / oracle if oracle else 0.0,
            "rel_err_reference": abs(reference - oracle) / oracle if oracle else 0.0,
        })
    return rows


def h_stationary(n, g):
    """QFI of the n-th bouncer eigenstate, (1 + 32 z_n^3 / 135) / (7 g^2)."""
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not g > 0:
        raise DomainError(f"g must be positive, got {g}")
    z = airy_zeros(int(n))[int(n) - 1]
    return (1.0 + 32.0 * z ** 3 / 135.0) / (7.0 * g * g)


def enhancement_constants():
    """mu = max_s s / (1 + e^s) and xi = argmax_x x (1 - tanh x)."""
    s_star = brentq(lambda s: 1.0 + math.exp(-s) - s, 0.5, 3.0, xtol=1e-15)
    mu = s_star / (1.0 + math.exp(s_star))
    xi = brentq(lambda x: 1.0 - math.tanh(x) - x / math.cosh(x) ** 2, 0.1, 2.0, xtol=1e-15)
    return EnhancementConstants(mu=mu, xi=xi)


def initial_grid(spec, n_points=DEFAULT_POINTS):
    """Sample an initial spec on its default +- 10 width window."""
    if isinstance(spec, GaussianSpec):
        r = 10.0 * spec.width
        return sample_gaussian(spec, spec.center - r, spec.center + r, n_points)
    r = spec.half_separation + 10.0 * spec.width
    return sample_superposition(spec, spec.height - r, spec.height + r, n_points)


def closed_form_qfi(spec, p):
    if isinstance(spec, GaussianSpec):
        return h_loc_closed(p.mass, spec.width, p.time)
    return h_sup_closed(p.mass, spec.width, p.time, spec.half_separation, spec.momentum)


def compare_routes(spec, p, n_points=DEFAULT_POINTS):
    """QFI of one probe by every route."""
    psi0 = initial_grid(spec, n_points)
    psi_t = evolved_state(spec, p).sample(n_points=n_points)
    return [
        QfiReport(freefall_qfi_numeric(spec, p, n_points), "overlap", p, spec),
        QfiReport(qfi_generator(psi0, p), "generator", p, spec),
        QfiReport(qfi_variance_form(psi_t, p.mass, p.time), "variance", p, spec),
        QfiReport(closed_form_qfi(spec, p), "closed_form", p, spec),
    ]
