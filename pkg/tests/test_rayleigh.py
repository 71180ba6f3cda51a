import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robin_asymptotics.errors import DomainError, NonNegativeQuotient
from robin_asymptotics.geometry import PolyhedralCone, section_profile
from robin_asymptotics.model_solvers import ModelDomain, model_lambda
from robin_asymptotics import rayleigh
from robin_asymptotics.rayleigh import (DPSI_SQ, PSI_SQ, TestFunction as Trial,
                                        angle_exp_quotient, ball_exp_quotient,
                                        box_cosh_quotient, closed_form_cone_quotient,
                                        cusp_mass_exact, cusp_quotient, cusp_scan, dpsi,
                                        halfline_exp_quotient, halfline_inequality_check,
                                        psi, strip_chi_quotient,
                                        strip_chi_quotient_quadrature)
from robin_asymptotics.corner_constants import optimal_decay


def test_cutoff_moments_are_exact():
    assert PSI_SQ == pytest.approx(643 / 462, rel=1e-15)
    assert DPSI_SQ == pytest.approx(40 / 7, rel=1e-15)


def test_cutoff_shape():
    assert psi(0.0) == 1.0 and psi(0.5) == 1.0
    assert psi(1.0) == 0.0 and psi(-1.2) == 0.0
    s = np.linspace(-1.2, 1.2, 241)
    h = 1e-6
    fd = (psi(s + h) - psi(s - h)) / (2 * h)
    assert np.allclose(fd, dpsi(s), atol=1e-6)


def test_octant_quotient():
    prof = section_profile(PolyhedralCone.orthant(3), np.ones(3) / math.sqrt(3))
    assert closed_form_cone_quotient(math.sqrt(3), prof) == pytest.approx(-3.0, rel=1e-12)


def test_incircle_quotient():
    alpha = math.pi / 5
    prof = section_profile(PolyhedralCone.circular_surrogate(alpha, 64), np.array([0, 0, 1.0]))
    s = math.sqrt(1 + 1 / prof.d[0] ** 2)
    assert closed_form_cone_quotient(s, prof) == pytest.approx(-s * s, rel=1e-10)


@given(st.floats(-0.2, 0.2), st.floats(-0.2, 0.2), st.floats(0.2, 4.0))
def test_cone_quotient_minimised_at_optimal_decay(dx, dy, a):
    theta = np.array([1 + dx, 1 + dy, 1.0])
    theta /= np.linalg.norm(theta)
    prof = section_profile(PolyhedralCone.orthant(3), theta)
    a_star = optimal_decay(prof)
    j_star = closed_form_cone_quotient(a_star, prof)
    assert j_star == pytest.approx(-a_star**2, rel=1e-12)
    assert closed_form_cone_quotient(a, prof) >= j_star - 1e-12


def test_strip_closed_form_example():
    assert strip_chi_quotient(101.0, 1.0) == pytest.approx(-1 + DPSI_SQ / (PSI_SQ + 200),
                                                           rel=1e-15)


@pytest.mark.parametrize("tau,gamma", [(1.5, 0.7), (10.0, 2.0), (101.0, 1.0), (500.0, 4.0)])
def test_strip_quadrature_matches_closed_form(tau, gamma):
    q = strip_chi_quotient_quadrature(tau, gamma)
    assert q == pytest.approx(strip_chi_quotient(tau, gamma), abs=1e-8)


@given(st.floats(1.01, 1e4), st.floats(0.1, 50.0))
def test_strip_approaches_halfplane_value(tau, gamma):
    j = strip_chi_quotient(tau, gamma)
    assert j > -gamma**2
    # tau * (J + gamma^2) / gamma^2 lies between K and K * (1 + 2 / tau) for tau >= 2
    scaled = tau * (j + gamma**2) / gamma**2
    if tau >= 2:
        assert DPSI_SQ / 2 <= scaled <= DPSI_SQ / 2 * (1 + 2 / tau)


def test_strip_rejects_small_tau():
    with pytest.raises(DomainError):
        strip_chi_quotient(1.0, 1.0)


@pytest.mark.parametrize("p", [1.1, 1.5, 1.9])
@pytest.mark.parametrize("gamma", [5.0, 30.0, 100.0])
def test_cusp_mass_closed_form(p, gamma):
    _, _, mass = rayleigh._cusp_integrals(p, gamma)
    assert mass.value == pytest.approx(cusp_mass_exact(p, gamma), rel=1e-12)


def test_cusp_exponents():
    gammas = np.geomspace(10, 100, 10)
    assert abs(cusp_scan(1.5, gammas).slope - 4) <= 0.2
    assert abs(cusp_scan(1.9, gammas).slope - 20) <= 2.0
    assert abs(cusp_scan(1.05, gammas).slope - 2 / 0.95) <= 0.05 * 2 / 0.95


@given(st.floats(1.05, 1.95), st.floats(5.0, 200.0))
@settings(max_examples=25)
def test_cusp_quotient_negative(p, gamma):
    assert cusp_quotient(p, gamma) < 0


def test_cusp_scan_rejections(monkeypatch):
    with pytest.raises(DomainError, match="unbounded"):
        cusp_scan(2.0, np.geomspace(10, 100, 5))
    with pytest.raises(DomainError):
        cusp_scan(1.5, [10, 20, 30])
    monkeypatch.setattr(rayleigh, "cusp_quotient", lambda p, g: 1.0 if g < 20 else -g)
    with pytest.raises(NonNegativeQuotient) as exc:
        cusp_scan(1.5, np.geomspace(10, 100, 6))
    assert exc.value.gamma == 10.0


def test_halfline_equality_case():
    g = 1.7
    x = np.linspace(0.0, 40.0 / g, 4001)
    v = np.exp(-g * x)
    v[-1] = 0.0
    dv = -g * np.exp(-g * x)
    assert abs(halfline_inequality_check(x, v, g, dv=dv)) < 1e-8


def test_halfline_bump_away_from_origin():
    g = 2.0
    x = np.linspace(0.0, 3.0, 601)
    v = np.where((x > 1) & (x < 2), np.sin(np.pi * (x - 1)) ** 2, 0.0)
    dv = np.where((x > 1) & (x < 2), np.pi * np.sin(2 * np.pi * (x - 1)), 0.0)
    margin = halfline_inequality_check(x, v, g, dv=dv)
    expected = np.pi**2 / 2 + g * g * 3 / 8
    assert margin == pytest.approx(expected, rel=1e-6)


@settings(max_examples=100)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=12), st.floats(0.5, 8.0))
def test_halfline_random_splines(coef, length):
    x = np.linspace(0.0, length, 8 * len(coef) + 1)
    s = x / length
    v = sum(c * s**k for k, c in enumerate(coef)) * (1 - s) ** 2
    v[-1] = 0.0
    for g in (0.5, 1.0, 2.0):
        assert halfline_inequality_check(x, v, g) >= -1e-8


def test_halfline_needs_vanishing_end():
    with pytest.raises(DomainError):
        halfline_inequality_check(np.linspace(0, 1, 5), np.ones(5), 1.0)


@given(st.floats(0.2, 20.0), st.floats(0.0, 40.0))
def test_variational_models(gamma, a):
    slack = 1e-8
    assert halfline_exp_quotient(a + 1e-3, gamma) >= -gamma**2 - slack
    for m in (1, 2, 3):
        assert ball_exp_quotient(a, m, gamma) >= model_lambda(ModelDomain.ball(m), gamma) - slack
    box = ModelDomain.box(0.4, 1.0)
    assert box_cosh_quotient((a, a / 2), box.half_sides, gamma) >= model_lambda(box, gamma) - slack
    alpha = 0.7
    assert angle_exp_quotient(a + 1e-3, alpha, gamma) >= \
        model_lambda(ModelDomain.angle(alpha), gamma) - slack


def test_test_function_dispatch():
    prof = section_profile(PolyhedralCone.orthant(3), np.ones(3) / math.sqrt(3))
    assert Trial("cone-exp", a=math.sqrt(3), profile=prof).quotient() == pytest.approx(-3.0)
    assert Trial("strip-chi", tau=101.0, gamma=1.0).quotient() == strip_chi_quotient(101.0, 1.0)
    assert Trial("halfline-exp", gamma=2.0).quotient() == -4.0
    assert Trial("cusp-exp", p=1.5, gamma=10.0).quotient() == cusp_quotient(1.5, 10.0)
    with pytest.raises(DomainError):
        Trial("sphere")
