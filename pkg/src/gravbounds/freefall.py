"""Exact evolution in the linear potential V = m g x (no floor)."""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NumericError
from .numerics import Interval, integrate
from .states import (DEFAULT_POINTS, GaussianSpec, SuperpositionSpec, WaveGrid,
                     uniform_grid)

WINDOW_SPREADS = 10.0


@dataclass(frozen=True)
class PhysParams:
    mass: float
    gravity: float
    time: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        # g = 0 is admitted so the free-particle limit stays reachable
        if not self.gravity >= 0:
            raise DomainError(f"gravity must be non-negative, got {self.gravity}")
        if not self.time >= 0:
            raise DomainError(f"time must be non-negative, got {self.time}")

    def replace(self, **changes):
        fields = {"mass": self.mass, "gravity": self.gravity, "time": self.time}
        fields.update(changes)
        return PhysParams(**fields)


def _prefactor(m, t):
    # principal branch of sqrt(m / (2 pi i t))
    return cmath.sqrt(m / (2j * math.pi * t))


def propagator(x, x0, p):
    """Kernel K(x, t; x0) of the linear potential."""
    if not p.time > 0:
        raise DomainError("the propagator at t = 0 is a delta distribution")
    m, g, t = p.mass, p.gravity, p.time
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    phase = (m / (2 * t) * (x - x0) ** 2 - 0.5 * m * g * t * (x + x0)
             - m * g * g * t ** 3 / 24.0)
    out = _prefactor(m, t) * np.exp(1j * phase)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EvolvedGaussian:
    """psi(x) = exp(alpha x^2 + beta x + gamma) with complex coefficients."""

    alpha: complex
    beta: complex
    gamma: complex

    def __post_init__(self):
        if not self.alpha.real < 0:
            raise NumericError(f"non-normalisable Gaussian, Re(alpha) = {self.alpha.real}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp((self.alpha * x + self.beta) * x + self.gamma)

    @property
    def mean(self):
        return -self.beta.real / (2.0 * self.alpha.real)

    @property
    def variance(self):
        return -1.0 / (4.0 * self.alpha.real)

    def norm(self):
        ra, rb, rg = self.alpha.real, self.beta.real, self.gamma.real
        return math.sqrt(math.pi / (-2.0 * ra)) * math.exp(-rb * rb / (2.0 * ra) + 2.0 * rg)

    def window(self):
        reach = WINDOW_SPREADS * math.sqrt(self.variance)
        return self.mean - reach, self.mean + reach

    def sample(self, x_lo=None, x_hi=None, n_points=DEFAULT_POINTS):
        if x_lo is None or x_hi is None:
            x_lo, x_hi = self.window()
        x, dx = uniform_grid(x_lo, x_hi, n_points)
        return WaveGrid(x_lo, dx, self(x))


@dataclass(frozen=True)
class EvolvedSuperposition:
    """Sum of closed-form Gaussian branches (weights folded into each gamma)."""

    branches: tuple
    center: float
    reach: float

    def __call__(self, x):
        out = self.branches[0](x)
        for b in self.branches[1:]:
            out = out + b(x)
        return out

    def window(self):
        return self.center - self.reach, self.center + self.reach

    def sample(self, x_lo=None, x_hi=None, n_points=DEFAULT_POINTS):
        if x_lo is None or x_hi is None:
            x_lo, x_hi = self.window()
        x, dx = uniform_grid(x_lo, x_hi, n_points)
        return WaveGrid(x_lo, dx, self(x))


def _initial_coefficients(center, momentum, width, phase_origin=0.0, log_weight=0.0):
    s2 = width * width
    alpha = complex(-1.0 / (4.0 * s2), 0.0)
    beta = complex(center / (2.0 * s2), momentum)
    gamma = complex(-center * center / (4.0 * s2) - 0.25 * math.log(2.0 * math.pi * s2) + log_weight,
                    -momentum * phase_origin)
    return alpha, beta, gamma


def _evolve_coefficients(alpha0, beta0, gamma0, p):
    """Integrate exp(alpha0 x0^2 + beta0 x0 + gamma0) against the kernel in closed form."""
    m, g, t = p.mass, p.gravity, p.time
    if t == 0:
        return alpha0, beta0, gamma0
    # kernel exponent: A x^2 + B x x0 + A x0^2 + D (x + x0) + F
    A = 1j * m / (2.0 * t)
    B = -1j * m / t
    D = -0.5j * m * g * t
    F = -1j * m * g * g * t ** 3 / 24.0
    q = A + alpha0
    b = D + beta0
    alpha = A - B * B / (4.0 * q)
    beta = D - B * b / (2.0 * q)
    gamma = (F + gamma0 - b * b / (4.0 * q) + cmath.log(_prefactor(m, t))
             + 0.5 * cmath.log(math.pi / (-q)))
    return alpha, beta, gamma


def evolve_gaussian(spec, p):
    """Closed-form evolution of a Gaussian packet."""
    return EvolvedGaussian(*_evolve_coefficients(
        *_initial_coefficients(spec.center, spec.momentum, spec.width), p))


def spread_at(width, p):
    """Analytic position spread sigma * sqrt(1 + t^2 / (4 m^2 sigma^4))."""
    return width * math.sqrt(1.0 + p.time ** 2 / (4.0 * p.mass ** 2 * width ** 4))


def evolved_superposition(spec, p):
    """Closed-form evolution of the two-packet state as a callable."""
    h, a, p0, s = spec.height, spec.half_separation, spec.momentum, spec.width
    logw = -0.5 * math.log(spec.normalization)
    branches = tuple(
        EvolvedGaussian(*_evolve_coefficients(
            *_initial_coefficients(h + sign * a, sign * p0, s, phase_origin=h, log_weight=logw), p))
        for sign in (1.0, -1.0))
    center = h - 0.5 * p.gravity * p.time ** 2
    reach = a + abs(p0) * p.time / p.mass + WINDOW_SPREADS * spread_at(s, p)
    return EvolvedSuperposition(branches, center, reach)


def evolved_state(spec, p):
    """Closed-form evolved state for either kind of initial spec."""
    if isinstance(spec, GaussianSpec):
        return evolve_gaussian(spec, p)
    if isinstance(spec, SuperpositionSpec):
        return evolved_superposition(spec, p)
    raise TypeError(f"unsupported state spec {type(spec).__name__}")


def evolve_superposition(spec, p, x_lo=None, x_hi=None, n_points=DEFAULT_POINTS):
    return evolved_superposition(spec, p).sample(x_lo, x_hi, n_points)


def grid_phase_space_moments(u):
    """<x>, <p>, Var x, Var p and the symmetrised covariance of a grid state."""
    psi = u.amplitudes
    x = u.x
    dpsi = np.gradient(psi, u.dx)
    norm = np.sum(np.abs(psi) ** 2)
    mx = float(np.sum(x * np.abs(psi) ** 2) / norm)
    vx = float(np.sum((x - mx) ** 2 * np.abs(psi) ** 2) / norm)
    ppsi = -1j * dpsi
    mp = float(np.real(np.vdot(psi, ppsi)) / norm)
    vp = float(np.real(np.vdot(ppsi, ppsi)) / norm - mp * mp)
    cov = float(np.real(np.vdot((x - mx) * psi, ppsi)) / norm)
    return mx, mp, vx, vp, cov


def evolve_grid(u, p, x_lo=None, x_hi=None, n_points=None, backend=None):
    """Propagate a sampled state by trapezoid quadrature of the kernel at every output point.

    The default output window is the Ehrenfest mean +- 10 spreads of the
    evolved state; in that case the norm must survive to 1e-6.
    """
    if not p.time > 0:
        raise DomainError("evolve_grid needs t > 0")
    m, g, t = p.mass, p.gravity, p.time
    default_window = x_lo is None or x_hi is None
    if default_window:
        mx, mp, vx, vp, cov = grid_phase_space_moments(u)
        mean = mx + mp * t / m - 0.5 * g * t * t
        spread = math.sqrt(max(vx + (t / m) ** 2 * vp + 2.0 * (t / m) * cov, 0.0))
        x_lo, x_hi = mean - WINDOW_SPREADS * spread, mean + WINDOW_SPREADS * spread
    if n_points is None:
        n_points = u.n_points
    x_out, dx_out = uniform_grid(x_lo, x_hi, n_points)
    w = np.full(u.n_points, u.dx)
    w[0] = w[-1] = 0.5 * u.dx
    out = _prefactor(m, t) * kernels.propagate(x_out, u.x, u.amplitudes * w, m, g, t,
                                               backend=backend)
    result = WaveGrid(x_lo, dx_out, out)
    if default_window:
        drift = abs(result.norm() - u.norm())
        if drift > 1e-6:
            raise NumericError(f"kernel quadrature lost norm {drift:.3e}; refine the input grid")
    return result


def evolve_by_quadrature(psi0, x_points, p, support, tol=1e-10):
    """Adaptive-quadrature evolution of a callable initial state at chosen points.

    Slow; meant as an independent check of the closed forms.
    """
    lo, hi = support
    out = np.empty(len(x_points), dtype=complex)
    for i, x in enumerate(x_points):
        out[i] = integrate(lambda x0, x=x: propagator(x, x0, p) * psi0(x0), Interval(lo, hi, tol))
    return out
