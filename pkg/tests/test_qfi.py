import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from gravbounds.errors import DomainError
from gravbounds.freefall import PhysParams, evolved_state
from gravbounds.qfi import (QfiReport, compare_routes, crossover_time, enhancement_constants,
                            freefall_qfi_numeric, h_loc_closed, h_stationary, h_sup_closed,
                            h_sup_reference_no_momentum, h_sup_reference_no_separation,
                            initial_grid, position_variance_qfi, qfi_generator, qfi_variance_form,
                            superposition_discrepancy_report, superposition_qfi_numeric)
from gravbounds.states import GaussianSpec, SuperpositionSpec


def test_h_loc_value():
    assert h_loc_closed(0.5, 0.5, 1.0) == pytest.approx(1.25, abs=1e-15)
    assert h_loc_closed(0.5, 0.5, 0.0) == 0.0
    with pytest.raises(DomainError):
        h_loc_closed(0.5, -0.5, 1.0)


def test_crossover_balances_terms():
    m, s = 0.7, 0.3
    t = crossover_time(m, s)
    assert t ** 4 / (4 * s * s) == pytest.approx(4 * m * m * t * t * s * s, rel=1e-14)


@pytest.mark.parametrize("spec,p", [
    (GaussianSpec(0.0, 0.0, 0.5), PhysParams(0.5, 1.0, 1.0)),
    (GaussianSpec(2.0, 1.1, 0.3), PhysParams(0.25, 3.0, 0.6)),
    (SuperpositionSpec(1.0, 0.0, 0.5, 0.0), PhysParams(0.5, 1.0, 1.0)),
    (SuperpositionSpec(0.4, 1.2, 0.35, 0.0), PhysParams(1.0, 1.0, 1.5)),
])
def test_routes_agree(spec, p):
    reports = compare_routes(spec, p)
    ref = reports[-1].value
    for r in reports:
        assert r.value == pytest.approx(ref, rel=1e-4), r.route


def test_position_variance_is_not_the_qfi():
    spec, p = GaussianSpec(0.0, 0.0, 0.5), PhysParams(0.5, 1.0, 1.0)
    psi_t = evolved_state(spec, p).sample()
    assert position_variance_qfi(psi_t, 0.5, 1.0) == pytest.approx(4.25, rel=1e-8)
    assert qfi_variance_form(psi_t, 0.5, 1.0) == pytest.approx(1.25, rel=1e-6)
    assert qfi_generator(initial_grid(spec), p) == pytest.approx(1.25, rel=1e-6)


def test_report_route_checked():
    with pytest.raises(DomainError):
        QfiReport(1.0, "guess", PhysParams(1.0, 1.0, 1.0))


@pytest.mark.parametrize("a,p0", [(0.0, 0.0), (0.3, 0.0), (1.0, 0.0), (0.0, 1.0), (0.7, -0.9), (1.5, 0.4)])
def test_h_sup_closed_against_numeric(a, p0):
    m, s, t = 0.5, 0.4, 1.0
    assert h_sup_closed(m, s, t, a, p0) == pytest.approx(
        superposition_qfi_numeric(m, s, t, a, p0), rel=1e-6)


def test_h_sup_reduces_to_h_loc():
    assert h_sup_closed(0.5, 0.5, 1.0, 0.0, 0.0) == pytest.approx(h_loc_closed(0.5, 0.5, 1.0), rel=1e-15)


def test_reference_special_cases_disagree_with_oracle():
    # p0 = 0: the reference t^4 term overshoots
    assert h_sup_reference_no_momentum(0.5, 0.5, 1.0, 1.0) == pytest.approx(2.25)
    assert superposition_qfi_numeric(0.5, 0.5, 1.0, 1.0) == pytest.approx(1.653985389889, rel=1e-8)
    # a = 0: the reference t^2 term is off
    numeric = superposition_qfi_numeric(0.5, 0.5, 1.0, 0.0, 1.0)
    ref = h_sup_reference_no_separation(0.5, 0.5, 1.0, 1.0)
    assert abs(ref - numeric) / numeric > 1e-3
    # the corrected a = 0 form: t^2 term -8 m^2 sigma^4 p0^2 t^2 (1 - tanh(sigma^2 p0^2))
    th = math.tanh(0.25)
    fixed = 1.25 + 0.5 * (1 + th) - 8 * 0.25 * 0.0625 * (1 - th)
    assert numeric == pytest.approx(fixed, rel=1e-6)


def test_discrepancy_report_rows():
    rows = superposition_discrepancy_report(0.5, 0.5, 1.0, [0.5, 1.0])
    assert [r["a"] for r in rows] == [0.5, 1.0]
    for r in rows:
        assert r["rel_err_closed_form"] < 1e-6
        assert r["rel_err_reference"] > 1e-2


def test_quadratic_scaling_in_separation():
    m, s, t = 0.5, 0.3, 1.0
    a = np.linspace(2.0, 4.0, 9)
    excess = np.array([h_sup_closed(m, s, t, x) - h_loc_closed(m, s, t) for x in a])
    slope, icept = np.polyfit(a * a, excess, 1)
    # overlap terms ~ s exp(-s), s = a^2 / 2 sigma^2 >= 22, bias the fit at ~1e-8
    assert slope == pytest.approx(4 * m * m * t * t, rel=1e-7)


def test_enhancement_constants_against_optimiser():
    c = enhancement_constants()
    mu = -minimize_scalar(lambda s: -s / (1 + math.exp(s)), bounds=(0, 5), method="bounded",
                          options={"xatol": 1e-12}).fun
    xi = minimize_scalar(lambda x: -x * (1 - math.tanh(x)), bounds=(0, 3), method="bounded",
                         options={"xatol": 1e-12}).x
    assert c.mu == pytest.approx(mu, rel=1e-10)
    assert c.xi == pytest.approx(xi, abs=1e-8)
    assert c.mu == pytest.approx(0.278, abs=1e-3)


def test_h_stationary_value():
    assert h_stationary(1, 1.0) == pytest.approx(0.5757, abs=1e-3)
    assert h_stationary(2, 2.0) == pytest.approx(h_stationary(2, 1.0) / 4, rel=1e-15)
    with pytest.raises(DomainError):
        h_stationary(0, 1.0)
    with pytest.raises(DomainError):
        h_stationary(1, 0.0)


def test_h_loc_independent_of_g():
    spec = GaussianSpec(0.0, 0.3, 0.4)
    h1 = freefall_qfi_numeric(spec, PhysParams(0.5, 1.0, 1.0))
    h2 = freefall_qfi_numeric(spec, PhysParams(0.5, 2.0, 1.0))
    assert abs(h2 - h1) / h1 < 1e-6


@given(st.floats(0.1, 2.0), st.floats(0.1, 1.0), st.floats(0.1, 2.0), st.floats(0.0, 3.0),
       st.floats(-2.0, 2.0))
def test_h_sup_non_negative(m, s, t, a, p0):
    assert h_sup_closed(m, s, t, a, p0) >= 0.0
