"""Cross-module property checks run by ``gravbounds validate``."""

import math
from dataclasses import dataclass

import numpy as np

from .bouncer import build_basis, bouncer_grid, evolve_spectral, orthonormality_error, project, reconstruct
from .freefall import PhysParams, evolve_grid
from .multiparam import Overlaps2, qfi_matrix, r_quantumness, uhlmann_matrix
from .numerics import airy_ai, airy_ai_prime, derivative
from .qfi import compare_routes
from .states import GaussianSpec, SuperpositionSpec, WaveGrid, gaussian_amplitude, sample_gaussian


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float


def check_airy_ode(threshold=1e-8):
    """max |Ai''(y) - y Ai(y)| / (1 + |y|) on [-15, 8], Ai'' by differencing Ai'."""
    worst = 0.0
    for y in np.linspace(-15.0, 8.0, 47):
        second = derivative(airy_ai_prime, float(y), h0=1e-3, levels=2)
        worst = max(worst, abs(second - y * airy_ai(float(y))) / (1.0 + abs(y)))
    return CheckResult("airy_ode_residual", worst < threshold, worst, threshold)


def check_orthonormality(threshold=1e-8):
    err = orthonormality_error(build_basis(2 ** -0.5, 1.0, 120))
    return CheckResult("eigenbasis_orthonormality", err < threshold, err, threshold)


def _bouncer_gaussian(basis, height=20.0, width=1.0):
    x, dx = bouncer_grid(basis, extent=height + 10.0 * width, width=width)
    return WaveGrid(0.0, dx, gaussian_amplitude(x, height, 0.0, width))


def check_parseval(threshold=1e-8):
    """Coefficient weight equals the grid norm, before and after reconstruction."""
    basis = build_basis(2 ** -0.5, 1.0, 120)
    u = _bouncer_gaussian(basis)
    s = project(u, basis)
    back = reconstruct(s, 0.0, u.x[-1], u.n_points)
    err = max(abs(s.weight - u.norm()), abs(back.norm() - s.weight))
    return CheckResult("parseval", err < threshold, err, threshold)


def check_unitarity(threshold=1e-8):
    """Norm kept by spectral phases and by kernel propagation."""
    basis = build_basis(2 ** -0.5, 1.0, 120)
    s = project(_bouncer_gaussian(basis), basis)
    err = abs(evolve_spectral(s, 3.7).weight - s.weight)
    u = sample_gaussian(GaussianSpec(0.0, 0.3, 0.5), -5.0, 5.0, 2049)
    for t in (0.5, 1.0, 2.0):
        v = evolve_grid(u, PhysParams(0.5, 1.0, t))
        err = max(err, abs(v.norm() - u.norm()))
    return CheckResult("unitarity", err < threshold, err, threshold)


def check_route_agreement(threshold=1e-4):
    """Largest relative spread between the overlap, generator, variance and closed-form QFI."""
    cases = [
        (GaussianSpec(0.0, 0.0, 0.5), PhysParams(0.5, 1.0, 1.0)),
        (GaussianSpec(1.0, 0.4, 0.25), PhysParams(1.0, 2.0, 0.5)),
        (SuperpositionSpec(1.0, 0.0, 0.5, 0.0), PhysParams(0.5, 1.0, 1.0)),
        (SuperpositionSpec(0.6, 0.8, 0.4, 0.0), PhysParams(0.25, 1.0, 0.75)),
    ]
    worst = 0.0
    for spec, p in cases:
        vals = [r.value for r in compare_routes(spec, p)]
        ref = vals[-1]
        worst = max(worst, max(abs(v - ref) for v in vals) / ref)
    return CheckResult("qfi_route_agreement", worst < threshold, worst, threshold)


def random_pure_model(rng, dim=6):
    """Overlaps of a random normalised state with two random derivative vectors."""
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    d1 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    d2 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    # keep <psi|d psi> imaginary, as for a normalised family
    d1 -= np.vdot(psi, d1).real * psi
    d2 -= np.vdot(psi, d2).real * psi
    return Overlaps2(np.vdot(d1, psi), np.vdot(d2, psi), np.vdot(d1, d2),
                     np.vdot(d1, d1).real, np.vdot(d2, d2).real)


def check_r_range(n_models=200, seed=12345):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_models):
        o = random_pure_model(rng)
        r = r_quantumness(qfi_matrix(o), uhlmann_matrix(o))
        if not 0.0 <= r:
            return CheckResult("r_in_unit_interval", False, r, 1.0)
        worst = max(worst, r)
    return CheckResult("r_in_unit_interval", worst <= 1.0 + 1e-12, worst, 1.0)


def check_cli_determinism():
    from . import cli
    from .golden import GOLDEN_ARGV, golden_text
    first = cli.render(cli.parse_config(GOLDEN_ARGV), threads=1)
    second = cli.render(cli.parse_config(GOLDEN_ARGV), threads=2)
    mismatches = int(first != second) + int(first != golden_text())
    return CheckResult("cli_determinism_golden", mismatches == 0, float(mismatches), 0.0)


CHECKS = (check_airy_ode, check_orthonormality, check_parseval, check_unitarity,
          check_route_agreement, check_r_range, check_cli_determinism)


def run_all():
    return [check() for check in CHECKS]
