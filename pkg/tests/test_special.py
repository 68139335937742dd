import math

import numpy as np
import pytest

from hitchin_glue.errors import DomainError
from hitchin_glue.special import EULER_GAMMA, bessel_k0, bessel_k0e, bessel_k1, bessel_k1e
from oracles import k0_quadrature


@pytest.mark.parametrize("x", [1e-3, 0.1, 0.5, 1.0, 1.999, 2.0, 2.001, 5.0, 12.0, 40.0])
def test_k0_matches_integral_representation(x):
    assert bessel_k0(x) == pytest.approx(k0_quadrature(x), rel=1e-10)


def test_k0_at_one():
    assert bessel_k0(1.0) == pytest.approx(0.4210244382407083, rel=1e-13)


@pytest.mark.parametrize("x", [1e-6, 1e-9, 1e-12])
def test_k0_log_divergence(x):
    assert bessel_k0(x) / (-math.log(x / 2) - EULER_GAMMA) == pytest.approx(1.0, abs=1e-9)


def test_k0_envelope_at_ten():
    v = bessel_k0(10.0)
    assert 0 < v < math.exp(-10.0)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_domain(x):
    with pytest.raises(DomainError):
        bessel_k0(x)
    with pytest.raises(DomainError):
        bessel_k1e(x)


def test_k1_is_minus_derivative_of_k0():
    x = np.linspace(0.3, 20, 41)
    h = 1e-5
    deriv = (bessel_k0(x + h) - bessel_k0(x - h)) / (2 * h)
    np.testing.assert_allclose(-deriv, bessel_k1(x), rtol=1e-8)


def test_scaled_forms_and_underflow():
    x = np.array([0.5, 3.0, 30.0])
    np.testing.assert_allclose(bessel_k0e(x) * np.exp(-x), bessel_k0(x), rtol=1e-14)
    np.testing.assert_allclose(bessel_k1e(x) * np.exp(-x), bessel_k1(x), rtol=1e-14)
    assert bessel_k0(800.0) == 0.0
    assert bessel_k0e(800.0) == pytest.approx(math.sqrt(math.pi / 1600), rel=1e-3)
