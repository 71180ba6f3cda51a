import math

import numpy as np
import pytest

from robin_asymptotics.errors import DomainError
from robin_asymptotics.model_solvers import (ModelDomain, cone_rescale,
                                             cusp_upper_exponent, model_lambda)
from robin_asymptotics.special_functions import mu_tanh_root


def test_unit_square():
    mu = mu_tanh_root(0.5).root
    assert abs(mu**2 - 0.59555) < 5e-5
    lam = model_lambda(ModelDomain.box(0.5, 0.5), 1.0)
    assert lam == pytest.approx(-8 * mu * mu, rel=1e-14)
    assert abs(lam + 4.765) < 1e-3


def test_angles():
    assert model_lambda(ModelDomain.angle(math.pi / 4), 2.0) == pytest.approx(-8.0)
    assert model_lambda(ModelDomain.angle(3 * math.pi / 4), 1.0) == -1.0
    eps = 1e-12
    left = model_lambda(ModelDomain.angle(math.pi / 2 - eps), 3.0)
    right = model_lambda(ModelDomain.angle(math.pi / 2), 3.0)
    assert left == pytest.approx(right, rel=1e-10)


def test_halfline_and_halfspace():
    assert model_lambda(ModelDomain.halfline(), 3.0) == -9.0
    assert model_lambda(ModelDomain.halfspace_cone(), 0.5) == -0.25


def test_cone_rescale():
    assert cone_rescale(-3.0, 2.0) == -12.0
    assert cone_rescale(-1.0, 1.0) == -1.0
    assert cone_rescale(-3.0, 10.0) == pytest.approx(-300.0)


def test_cusp_exponent():
    assert cusp_upper_exponent(1.5) == 4.0
    assert cusp_upper_exponent(1 + 1e-9) == pytest.approx(2.0, rel=1e-8)
    assert math.isinf(cusp_upper_exponent(2.0))
    with pytest.raises(DomainError):
        cusp_upper_exponent(1.0)


@pytest.mark.parametrize("sides", [(0.5,), (0.5, 0.5), (0.3, 1.0, 2.0)])
def test_box_large_gamma(sides):
    m = len(sides)
    assert abs(model_lambda(ModelDomain.box(*sides), 100.0) / 1e4 + m) < 0.02 * m


def test_ball_upper_direction():
    assert model_lambda(ModelDomain.ball(3), 100.0) <= -1e4 * 0.95


@pytest.mark.parametrize("bad", [
    lambda: ModelDomain("torus"),
    lambda: ModelDomain.ball(0),
    lambda: ModelDomain.box(1.0, -1.0),
    lambda: ModelDomain.angle(math.pi),
])
def test_invalid_domains(bad):
    with pytest.raises(DomainError):
        bad()


def test_gamma_must_be_positive():
    with pytest.raises(DomainError):
        model_lambda(ModelDomain.halfline(), 0.0)
