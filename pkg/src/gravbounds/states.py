"""Initial probe states sampled on uniform grids."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

COVERAGE_SIGMAS = 8.0
DEFAULT_POINTS = 4097


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian packet centred at ``center`` with mean momentum ``momentum``."""

    center: float = 0.0
    momentum: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"width must be positive, got {self.width}")


@dataclass(frozen=True)
class SuperpositionSpec:
    """Two Gaussians at ``height +- half_separation`` with momenta ``+-momentum``.

    The momentum phases are taken relative to ``height``, so ``height`` is a
    pure translation of the packet.
    """

    half_separation: float = 0.0
    momentum: float = 0.0
    width: float = 1.0
    height: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"width must be positive, got {self.width}")
        if self.half_separation < 0 or self.height < 0:
            raise DomainError("half_separation and height must be non-negative")

    @property
    def overlap(self):
        """Real overlap exp(-(a^2 + 4 p0^2 sigma^4) / (2 sigma^2)) of the two branches."""
        a, p0, s = self.half_separation, self.momentum, self.width
        return math.exp(-(a * a + 4.0 * p0 * p0 * s ** 4) / (2.0 * s * s))

    @property
    def normalization(self):
        """The constant A = 2 (1 + overlap)."""
        return 2.0 * (1.0 + self.overlap)


@dataclass(frozen=True, eq=False)
class WaveGrid:
    """Complex amplitudes on ``x_lo + i * dx``; read-only after construction."""

    x_lo: float
    dx: float
    amplitudes: np.ndarray

    def __post_init__(self):
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise DomainError("amplitudes must be a 1-d array with at least 2 entries")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_points(self):
        return self.amplitudes.size

    @property
    def x(self):
        return self.x_lo + self.dx * np.arange(self.n_points)

    @property
    def density(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        return float(np.sum(self.density) * self.dx)

    def same_grid(self, other):
        return (self.n_points == other.n_points and self.dx == other.dx
                and self.x_lo == other.x_lo)

    def with_amplitudes(self, amplitudes):
        return WaveGrid(self.x_lo, self.dx, amplitudes)


def uniform_grid(x_lo, x_hi, n_points):
    if n_points < 2 or not x_hi > x_lo:
        raise DomainError(f"bad grid [{x_lo}, {x_hi}] with {n_points} points")
    return x_lo + (x_hi - x_lo) / (n_points - 1) * np.arange(n_points), (x_hi - x_lo) / (n_points - 1)


def gaussian_amplitude(x, center, momentum, width, phase_origin=0.0):
    """Normalised Gaussian with momentum phase measured from ``phase_origin``."""
    return ((2.0 * math.pi * width * width) ** -0.25
            * np.exp(-(x - center) ** 2 / (4.0 * width * width)
                     + 1j * momentum * (x - phase_origin)))


def _check_window(x_lo, x_hi, lo_needed, hi_needed):
    if x_lo > lo_needed or x_hi < hi_needed:
        raise DomainError(
            f"window [{x_lo}, {x_hi}] does not cover [{lo_needed:.6g}, {hi_needed:.6g}]")


def sample_gaussian(spec, x_lo, x_hi, n_points=DEFAULT_POINTS):
    reach = COVERAGE_SIGMAS * spec.width
    _check_window(x_lo, x_hi, spec.center - reach, spec.center + reach)
    x, dx = uniform_grid(x_lo, x_hi, n_points)
    return WaveGrid(x_lo, dx, gaussian_amplitude(x, spec.center, spec.momentum, spec.width))


def superposition_amplitude(x, spec):
    h, a, p0, s = spec.height, spec.half_separation, spec.momentum, spec.width
    both = (gaussian_amplitude(x, h + a, p0, s, phase_origin=h)
            + gaussian_amplitude(x, h - a, -p0, s, phase_origin=h))
    return both / math.sqrt(spec.normalization)


def sample_superposition(spec, x_lo, x_hi, n_points=DEFAULT_POINTS, floor=False):
    """Sample the two-packet state; ``floor=True`` also demands clearance above x = 0."""
    reach = spec.half_separation + COVERAGE_SIGMAS * spec.width
    if floor and spec.height < reach:
        raise DomainError(
            f"height {spec.height} is below half_separation + 8 width = {reach:.6g}")
    _check_window(x_lo, x_hi, spec.height - reach, spec.height + reach)
    x, dx = uniform_grid(x_lo, x_hi, n_points)
    return WaveGrid(x_lo, dx, superposition_amplitude(x, spec))


def inner_product(u, v):
    """<u|v> as a rectangle sum."""
    if not u.same_grid(v):
        raise DomainError("inner product of states on different grids")
    return complex(np.vdot(u.amplitudes, v.amplitudes) * u.dx)


def moments(u):
    """Mean and variance of position under |u|^2."""
    rho = u.density
    x = u.x
    total = rho.sum()
    mean = float(np.sum(x * rho) / total)
    var = float(np.sum((x - mean) ** 2 * rho) / total)
    return mean, var
