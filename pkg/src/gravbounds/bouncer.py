"""Quantum bouncer: Airy eigenbasis above an impenetrable floor at x = 0."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .freefall import PhysParams
from .numerics import airy_zeros, derivative
from .qfi import REL_STEP, closed_form_qfi, qfi_overlap
from .states import (GaussianSpec, WaveGrid, gaussian_amplitude, superposition_amplitude,
                     uniform_grid)
from . import kernels

DEFAULT_MODES = 120
TAIL_TOL = 1e-8
DECAY_MARGIN = 12.0  # Ai(12) ~ 1e-11: modes are negligible this far past their turning point
POINTS_PER_WAVELENGTH = 40


@dataclass(frozen=True, eq=False)
class BouncerBasis:
    mass: float
    gravity: float
    k: float
    zeros: object
    energies: np.ndarray
    norms: np.ndarray
    n_modes: int

    def modes(self, x):
        """Matrix of eigenfunctions, shape (len(x), n_modes); zero below the floor."""
        x = np.asarray(x, dtype=float)
        z = self.zeros.as_array()
        ai, _ = kernels.airy(self.k * x[:, None] - z[None, :])
        out = ai * self.norms[None, :]
        out[x < 0, :] = 0.0
        return out

    @property
    def support(self):
        """Point beyond which every mode is below ~1e-11."""
        return (self.zeros[self.n_modes - 1] + DECAY_MARGIN) / self.k


@dataclass(frozen=True, eq=False)
class SpectralState:
    coefficients: np.ndarray
    basis: BouncerBasis
    time: float = 0.0
    tail_mass: float = 0.0

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def weight(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def energy(self):
        return float(np.sum(np.abs(self.coefficients) ** 2 * self.basis.energies))


def gravitational_k(m, g):
    """Inverse length scale (2 m^2 g)^(1/3) with hbar = 1."""
    return (2.0 * m * m * g) ** (1.0 / 3.0)


def build_basis(m, g, n_modes=DEFAULT_MODES):
    if not (m > 0 and g > 0):
        raise DomainError("bouncer needs m > 0 and g > 0")
    if n_modes < 1:
        raise DomainError(f"n_modes must be >= 1, got {n_modes}")
    table = airy_zeros(int(n_modes))
    z = table.as_array()
    k = gravitational_k(m, g)
    _, aip = kernels.airy(-z)
    return BouncerBasis(mass=m, gravity=g, k=k, zeros=table, energies=m * g * z / k,
                        norms=math.sqrt(k) / aip, n_modes=int(n_modes))


def bouncer_grid(basis, extent=0.0, width=None, n_points=None):
    """Uniform grid on [0, x_hi] resolving the fastest mode (and ``width`` if given)."""
    x_hi = max(basis.support, extent) * (1.0 + 1e-3)
    if n_points is None:
        z_top = basis.zeros[basis.n_modes - 1]
        dx = 2.0 * math.pi / (basis.k * math.sqrt(z_top)) / POINTS_PER_WAVELENGTH
        if width is not None:
            dx = min(dx, width / 10.0)
        n_points = int(math.ceil(x_hi / dx)) + 1
    return uniform_grid(0.0, x_hi, n_points)


def _trapezoid_weights(n, dx):
    w = np.full(n, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


def _required_modes(u, basis):
    x = u.x
    rho = u.density / u.density.sum()
    mean = np.sum(x * rho)
    sx = math.sqrt(np.sum((x - mean) ** 2 * rho))
    dpsi = np.gradient(u.amplitudes, u.dx)
    norm = np.vdot(u.amplitudes, u.amplitudes).real
    mp = np.vdot(u.amplitudes, -1j * dpsi).real / norm
    sp = math.sqrt(max(np.vdot(dpsi, dpsi).real / norm - mp * mp, 0.0))
    m, g = basis.mass, basis.gravity
    energy = m * g * (mean + 8.0 * sx) + (abs(mp) + 8.0 * sp) ** 2 / (2.0 * m)
    z = energy * basis.k / (m * g)
    return int(math.ceil((8.0 * z ** 1.5 / (3.0 * math.pi) + 1.0) / 4.0)) + 10


def project(u, basis, tail_tol=TAIL_TOL):
    """Expansion coefficients c_n = int_0^inf Psi_n psi dx by trapezoid quadrature."""
    rho = u.density
    x = u.x
    below = rho[x <= 0]
    if below.size and below.max() > 1e-12 * rho.max():
        raise DomainError("state does not vanish at and below the floor")
    keep = x >= 0
    xs = x[keep]
    psi = u.amplitudes[keep]
    w = _trapezoid_weights(xs.size, u.dx)
    coeffs = basis.modes(xs).T @ (w * psi)
    norm = float(np.sum(w * np.abs(psi) ** 2))
    tail = norm - float(np.sum(np.abs(coeffs) ** 2))
    if tail > tail_tol * norm:
        needed = _required_modes(u, basis)
        raise TruncationError(
            f"{basis.n_modes} modes leave tail mass {tail:.3e}; about {needed} modes needed",
            tail_mass=tail, required_modes=needed)
    return SpectralState(coeffs, basis, 0.0, max(tail, 0.0))


def evolve_spectral(s, t):
    """Advance every coefficient by exp(-i E_n t)."""
    if not t >= 0:
        raise DomainError(f"t must be non-negative, got {t}")
    phases = np.exp(-1j * s.basis.energies * t)
    return SpectralState(s.coefficients * phases, s.basis, s.time + t, s.tail_mass)


def reconstruct(s, x_lo, x_hi, n_points):
    x, dx = uniform_grid(x_lo, x_hi, n_points)
    return WaveGrid(x_lo, dx, s.basis.modes(x) @ s.coefficients)


def _height(init):
    if isinstance(init, GaussianSpec):
        return init.center, init.width, 0.0
    return init.height, init.width, init.half_separation


def _initial_amplitude(init, x):
    if isinstance(init, GaussianSpec):
        return gaussian_amplitude(x, init.center, init.momentum, init.width)
    return superposition_amplitude(x, init)


def _check_clearance(init):
    h, width, a = _height(init)
    if h < 8.0 * width + a:
        raise DomainError(f"drop height {h} must be at least 8 widths + a = {8 * width + a:.6g}")


def impact_time(init, g):
    """Classical time sqrt(2 h / g) for the packet centre to reach the floor."""
    return math.sqrt(2.0 * _height(init)[0] / g)


class BouncerQfi:
    """QFI for g of a dropped probe, as a function of time.

    Bases, mode matrices and projections at the finite-difference points
    g +- dg, g +- dg/2 are built once on one shared grid; each time point
    then costs a phase update and a matrix-vector product per g value.
    """

    def __init__(self, init, m, g, n_modes=DEFAULT_MODES, rel_step=REL_STEP, tail_tol=TAIL_TOL,
                 n_points=None):
        _check_clearance(init)
        self.init, self.m, self.g = init, m, g
        self.step = rel_step * g
        h, width, a = _height(init)
        nominal = build_basis(m, g, n_modes)
        self.x, self.dx = bouncer_grid(nominal, extent=h + a + 10.0 * width, width=width,
                                       n_points=n_points)
        self.psi0 = WaveGrid(0.0, self.dx, _initial_amplitude(init, self.x))
        self._cache = {}
        self.n_modes = n_modes
        self.tail_tol = tail_tol
        self.nominal = self._spectral(g)

    def _spectral(self, gv):
        if gv not in self._cache:
            basis = build_basis(self.m, gv, self.n_modes)
            state = project(self.psi0, basis, self.tail_tol)
            self._cache[gv] = (basis.modes(self.x), state)
        return self._cache[gv]

    def state(self, gv, t):
        phi, s = self._spectral(gv)
        return phi @ (s.coefficients * np.exp(-1j * s.basis.energies * t))

    def __call__(self, t):
        psi = WaveGrid(0.0, self.dx, self.state(self.g, t))
        dpsi = derivative(lambda gv: self.state(gv, t), self.g, h0=self.step, levels=1)
        return qfi_overlap(psi, WaveGrid(0.0, self.dx, dpsi))

    def nofloor(self, t):
        """Closed-form QFI of the same probe without the floor."""
        if t == 0:
            return 0.0
        return closed_form_qfi(self.init, PhysParams(self.m, self.g, t))


def bouncer_qfi_g(init, m, g, t, n_modes=DEFAULT_MODES, rel_step=REL_STEP):
    return BouncerQfi(init, m, g, n_modes, rel_step)(t)


BEYOND_WINDOW = math.inf


def nofloor_validity_time(init, m, g, n_modes=DEFAULT_MODES, rel_threshold=0.05,
                          n_scan=60, window=1.5, model=None):
    """Earliest t with |H_bouncer - H_nofloor| / H_nofloor > rel_threshold.

    Scans ``n_scan`` times up to ``window`` impact times and bisects inside
    the first bracket. Returns :data:`BEYOND_WINDOW` when the threshold is
    never crossed.
    """
    if not 0 < rel_threshold < 1:
        raise DomainError("rel_threshold must lie in (0, 1)")
    model = model or BouncerQfi(init, m, g, n_modes)
    t_end = window * impact_time(init, g)

    def deviation(t):
        ref = model.nofloor(t)
        return abs(model(t) - ref) / ref

    prev = 0.0
    for i in range(1, n_scan + 1):
        t = t_end * i / n_scan
        if deviation(t) > rel_threshold:
            if i == 1:
                return t
            lo, hi = prev, t
            while hi - lo > 1e-6 * t_end:
                mid = 0.5 * (lo + hi)
                if deviation(mid) > rel_threshold:
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = t
    return BEYOND_WINDOW


def eigenstate_family(n, m, t, x):
    """g -> Psi_n(x; g) exp(-i E_n(g) t): an eigenstate prepared at the true g."""
    def build(gv):
        basis = build_basis(m, gv, n)
        phi = basis.modes(x)[:, n - 1]
        return phi * np.exp(-1j * basis.energies[n - 1] * t)
    return build


def stationary_qfi_numeric(n, m, g, t=0.0, rel_step=REL_STEP):
    """Finite-difference QFI of the n-th eigenstate family on the bouncer grid."""
    basis = build_basis(m, g, n)
    x, dx = bouncer_grid(basis)
    build = eigenstate_family(n, m, t, x)
    psi = WaveGrid(0.0, dx, build(g))
    dpsi = WaveGrid(0.0, dx, derivative(build, g, h0=rel_step * g, levels=1))
    return qfi_overlap(psi, dpsi)


def orthonormality_error(basis, n_points=None):
    """max |<Psi_i|Psi_j> - delta_ij| by trapezoid quadrature on the bouncer grid."""
    x, dx = bouncer_grid(basis, n_points=n_points)
    phi = basis.modes(x)
    w = _trapezoid_weights(x.size, dx)
    gram = phi.T @ (w[:, None] * phi)
    return float(np.abs(gram - np.eye(basis.n_modes)).max())
