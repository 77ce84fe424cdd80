import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from gravbounds import kernels
from gravbounds.errors import DomainError, NumericError
from gravbounds.numerics import (Interval, airy_ai, airy_ai_and_prime, airy_ai_prime, airy_zeros,
                                 derivative, integrate)

# first Airy zeros to 16 digits (tabulated values)
KNOWN_ZEROS = [2.338107410459767, 4.087949444130971, 5.520559828095551, 6.786708090071759]


def test_airy_at_origin():
    assert airy_ai(0.0) == pytest.approx(0.3550280538878172, abs=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(-0.2588194037928068, abs=1e-15)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_airy_matches_scipy(backend):
    y = np.linspace(-50.0, 50.0, 20001)
    ai, aip = kernels.airy(y, backend=backend)
    ref_ai, ref_aip, _, _ = special.airy(y)
    assert np.max(np.abs(ai - ref_ai)) < 1e-12
    assert np.max(np.abs(aip - ref_aip)) < 1e-12 * 10  # |Ai'| grows like |y|^(1/4)


def test_airy_large_positive_decays():
    assert 0.0 <= airy_ai(200.0) < 1e-300
    assert airy_ai(50.0) == pytest.approx(special.airy(50.0)[0], rel=1e-10)


def test_airy_rejects_nonfinite():
    with pytest.raises(DomainError):
        airy_ai(math.nan)
    with pytest.raises(DomainError):
        airy_ai_and_prime(np.array([0.0, math.inf]))


def test_airy_ode_residual():
    for y in np.linspace(-12.0, 6.0, 19):
        second = derivative(airy_ai_prime, float(y), h0=1e-3, levels=2)
        assert abs(second - y * airy_ai(float(y))) < 1e-9 * (1 + abs(y))


@given(st.floats(-80.0, 80.0))
def test_backends_agree(y):
    a = kernels.airy(np.array([y]), backend="numpy")
    b = kernels.airy(np.array([y]), backend="numba")
    assert abs(a[0][0] - b[0][0]) <= 1e-13 * (1 + abs(a[0][0]))
    assert abs(a[1][0] - b[1][0]) <= 1e-13 * (1 + abs(a[1][0]))


def test_airy_zeros_known_values():
    z = airy_zeros(4)
    for got, want in zip(z.zeros, KNOWN_ZEROS):
        assert got == pytest.approx(want, rel=1e-14)


def test_airy_zeros_many():
    z = airy_zeros(120)
    assert len(z) == 120
    diffs = np.diff(z.as_array())
    assert np.all(diffs > 0)
    # scipy's ai_zeros is only good to ~1e-12 here, so mpmath is the oracle
    ref = np.array([float(-mpmath.airyaizero(n)) for n in (1, 5, 17, 60, 120)])
    got = z.as_array()[[0, 4, 16, 59, 119]]
    assert np.max(np.abs(got - ref) / ref) < 1e-14
    assert np.max(np.abs(airy_ai(-z.as_array()))) < 1e-13


def test_airy_zeros_bad_count():
    with pytest.raises(DomainError):
        airy_zeros(0)


def test_integrate_gaussian_infinite():
    val = integrate(lambda x: math.exp(-x * x), Interval(-math.inf, math.inf))
    assert val == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_integrate_complex():
    val = integrate(lambda x: np.exp(1j * x), Interval(0.0, math.pi))
    assert abs(val - 2j) < 1e-10


def test_integrate_failure_raises():
    with pytest.raises(NumericError):
        integrate(lambda x: 1.0 / math.sqrt(abs(x - 0.3)) * math.sin(1e4 * x),
                  Interval(0.0, 1.0, 1e-14), limit=5)


def test_interval_validation():
    with pytest.raises(DomainError):
        Interval(1.0, 0.0)
    with pytest.raises(DomainError):
        Interval(0.0, 1.0, tol=0.0)


def test_derivative_richardson():
    assert derivative(math.sin, 1.0) == pytest.approx(math.cos(1.0), abs=1e-10)  # roundoff ~ eps / h
    out = derivative(lambda x: np.array([x ** 3, np.exp(1j * x)]), 0.5, levels=1)
    assert np.allclose(out, [0.75, 1j * np.exp(0.5j)], atol=1e-10)


def test_derivative_underflow():
    with pytest.raises(NumericError):
        derivative(math.sin, 1e20, h0=1e-10)


def test_airy_closed_form_constants():
    assert airy_ai(0.0) == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), abs=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), abs=1e-15)
    assert airy_ai(10.0) == pytest.approx(float(mpmath.airyai(10)), abs=1e-22)
    assert airy_ai(10.0) == pytest.approx(1.1048e-10, abs=1e-13)


def test_airy_ode_residual_dense():
    worst = max(abs(derivative(airy_ai_prime, y, h0=1e-3) - y * airy_ai(y))
                for y in np.round(np.arange(-10.0, 10.0001, 0.1), 10))
    assert worst < 1e-8


def test_airy_prime_by_richardson():
    assert derivative(airy_ai, 1.0) == pytest.approx(airy_ai_prime(1.0), abs=1e-12)


def test_integrate_examples():
    assert integrate(lambda x: x * x, Interval(0.0, 1.0)) == pytest.approx(1 / 3, abs=1e-12)
    assert integrate(airy_ai, Interval(0.0, math.inf)) == pytest.approx(1 / 3, abs=1e-10)


def test_derivative_examples():
    assert derivative(math.sin, 0.0) == pytest.approx(1.0, rel=1e-10)
    assert derivative(lambda x: x ** 3, 2.0) == pytest.approx(12.0, rel=1e-10)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 5), st.floats(0.1, 5))
def test_integrate_is_linear(alpha, beta, k1, k2):
    iv = Interval(-1.0, 2.0, 1e-10)
    f = lambda x: math.cos(k1 * x)
    g = lambda x: math.exp(-k2 * x * x)
    both = integrate(lambda x: alpha * f(x) + beta * g(x), iv)
    assert abs(both - alpha * integrate(f, iv) - beta * integrate(g, iv)) < 2 * iv.tol * (1 + abs(alpha) + abs(beta))
