import math

import numpy as np
import pytest

from finite_blt.bridge import (
    SmoothFunction,
    continuous_zak,
    derivative_l1,
    gaussian_function,
    poisson_fourier_check,
    poisson_zak_check,
    sample_periodize,
    tv_domination_check,
    zero_function,
)
from finite_blt.errors import PreconditionError, TheoremViolation
from finite_blt.generators import gaussian_generator
from finite_blt.lattice import LatticeParams
from finite_blt.quantitative import scaled_rho

LATTICES = [LatticeParams(8, 8), LatticeParams(16, 16), LatticeParams(4, 9), LatticeParams(9, 4)]


def test_certificate_must_be_finite():
    with pytest.raises(ValueError):
        SmoothFunction(lambda t: t, None, None, math.inf)


def test_gaussian_samples_match_generator():
    b = sample_periodize(gaussian_function(0.0), LatticeParams(8, 8))
    assert np.max(np.abs(b.values - gaussian_generator(8, 0.0).values)) < 1e-15
    b = sample_periodize(gaussian_function(0.3), LatticeParams(5, 7))
    assert np.max(np.abs(b.values - gaussian_generator(7, 0.3, M=5).values)) < 1e-15


def test_zero_function():
    assert not np.any(sample_periodize(zero_function(), LatticeParams(3, 4)).values)
    assert poisson_fourier_check(zero_function(), LatticeParams(3, 4)) == 0
    assert tv_domination_check(zero_function(), LatticeParams(3, 4)) == (0.0, 0.0)


def test_truncation_stable():
    g = gaussian_function(0.3)
    wide = SmoothFunction(g.f, g.df, g.ft, g.c2, tail_radius=lambda eps: 2 * g.tail_radius(eps))
    lat = LatticeParams(8, 8)
    assert np.max(np.abs(sample_periodize(g, lat).values - sample_periodize(wide, lat).values)) < 1e-14


def test_certificate_only_periodization_refuses_slow_decay():
    slow = SmoothFunction(lambda t: 1 / (1 + np.asarray(t) ** 2), None, None, 1.0)
    with pytest.raises(PreconditionError):
        sample_periodize(slow, LatticeParams(4, 4))


@pytest.mark.parametrize("lat", LATTICES)
@pytest.mark.parametrize("tau", [0.0, 0.3])
def test_poisson_identities_gaussian(lat, tau):
    g = gaussian_function(tau)
    assert poisson_zak_check(g, lat) < 1e-10
    assert poisson_fourier_check(g, lat) < 1e-10


@pytest.mark.parametrize("lat", LATTICES)
@pytest.mark.parametrize("scale", [1, 2])
def test_poisson_identities_scaled_rho(lat, scale):
    f = scaled_rho(scale)
    assert poisson_zak_check(f, lat) < 1e-10
    assert poisson_fourier_check(f, lat) < 1e-10


def test_continuous_zak_routes_agree():
    # the Gaussian has no compact transform; compare its direct series with the dual route
    g = gaussian_function(0.3)
    x = np.linspace(0, 1, 7)[:, None]
    y = np.linspace(0, 1, 5)[None, :]
    direct = continuous_zak(g, x, y)
    # Zf(x, y) = e^(2 pi i x y) Z(Ff)(y, -x)
    dual = np.exp(2j * np.pi * x * y) * continuous_zak(g.dual(), y, -x)
    assert np.max(np.abs(direct - dual)) < 1e-12


def test_gaussian_zak_zero():
    tau = 0.3
    assert abs(continuous_zak(gaussian_function(tau), 0.5 + tau, 0.5)) < 1e-8


def test_tv_domination_gaussian():
    lhs, rhs = tv_domination_check(gaussian_function(0.0), LatticeParams(16, 16))
    assert rhs == 2.0
    assert lhs <= 2.0


def test_derivative_l1_by_quadrature():
    g = gaussian_function(0.0)
    no_hint = SmoothFunction(g.f, g.df, g.ft, g.c2, tail_radius=g.tail_radius)
    assert derivative_l1(no_hint) == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("scale", [1, 2, 4])
def test_tv_domination_scaled_rho(scale):
    lhs, rhs = tv_domination_check(scaled_rho(scale), LatticeParams(64, 64))
    assert lhs <= 10 * scale


def test_tv_domination_detects_violation():
    g = gaussian_function(0.0)
    lying = SmoothFunction(g.f, g.df, g.ft, g.c2, tail_radius=g.tail_radius, tv=0.5)
    with pytest.raises(TheoremViolation):
        tv_domination_check(lying, LatticeParams(8, 8))
