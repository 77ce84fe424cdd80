import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gravbounds.errors import DomainError
from gravbounds.states import (GaussianSpec, SuperpositionSpec, WaveGrid, inner_product, moments,
                               sample_gaussian, sample_superposition, uniform_grid)


def test_gaussian_is_normalised():
    u = sample_gaussian(GaussianSpec(1.0, 2.0, 0.3), -3.0, 5.0, 4001)
    assert u.norm() == pytest.approx(1.0, abs=1e-12)
    mean, var = moments(u)
    assert mean == pytest.approx(1.0, abs=1e-12)
    assert var == pytest.approx(0.09, rel=1e-10)


def test_window_must_cover_packet():
    with pytest.raises(DomainError):
        sample_gaussian(GaussianSpec(0.0, 0.0, 1.0), -5.0, 5.0)


def test_width_must_be_positive():
    with pytest.raises(DomainError):
        GaussianSpec(width=0.0)
    with pytest.raises(DomainError):
        SuperpositionSpec(1.0, 0.0, -1.0, 0.0)


@pytest.mark.parametrize("a,p0,sigma", [(0.0, 0.0, 0.5), (0.3, 0.0, 0.5), (0.2, 1.5, 0.4), (2.0, 0.7, 0.3)])
def test_superposition_normalisation_and_overlap(a, p0, sigma):
    spec = SuperpositionSpec(a, p0, sigma, 10.0)
    u = sample_superposition(spec, 0.0, 20.0, 20001)
    assert u.norm() == pytest.approx(1.0, abs=1e-12)
    # overlap of the two normalised branches, by quadrature
    x = u.x
    s2 = sigma * sigma
    plus = (2 * math.pi * s2) ** -0.25 * np.exp(-(x - 10 - a) ** 2 / (4 * s2) + 1j * p0 * (x - 10))
    minus = (2 * math.pi * s2) ** -0.25 * np.exp(-(x - 10 + a) ** 2 / (4 * s2) - 1j * p0 * (x - 10))
    numeric = np.vdot(plus, minus).real * u.dx
    assert numeric == pytest.approx(spec.overlap, abs=1e-12)


def test_floor_clearance():
    spec = SuperpositionSpec(1.0, 0.0, 1.0, 8.5)
    with pytest.raises(DomainError):
        sample_superposition(spec, -10.0, 30.0, floor=True)
    sample_superposition(spec, -10.0, 30.0, floor=False)


def test_wavegrid_read_only_and_checked():
    u = WaveGrid(0.0, 0.1, np.ones(5))
    with pytest.raises(ValueError):
        u.amplitudes[0] = 2.0
    with pytest.raises(DomainError):
        WaveGrid(0.0, 0.0, np.ones(5))
    with pytest.raises(DomainError):
        inner_product(u, WaveGrid(0.0, 0.2, np.ones(5)))


def test_uniform_grid():
    x, dx = uniform_grid(-1.0, 1.0, 5)
    assert dx == 0.5
    assert list(x) == [-1.0, -0.5, 0.0, 0.5, 1.0]
    with pytest.raises(DomainError):
        uniform_grid(1.0, 1.0, 5)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4),
       st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4))
def test_inner_product_cauchy_schwarz(a, b):
    u = WaveGrid(0.0, 0.5, a)
    v = WaveGrid(0.0, 0.5, b)
    lhs = abs(inner_product(u, v)) ** 2
    rhs = inner_product(u, u).real * inner_product(v, v).real
    assert lhs <= rhs * (1 + 1e-12) + 1e-300
