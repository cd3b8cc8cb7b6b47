"""Property-based checks of the algebraic invariants."""

import numpy as np
from hypothesis import given, settings, strategies as st

from finite_blt.bridge import gaussian_function, poisson_fourier_check, poisson_zak_check
from finite_blt.functionals import sandwich_check
from finite_blt.gabor import riesz_bounds_via_gram, riesz_bounds_via_zak
from finite_blt.generators import random_unimodular_generator
from finite_blt.jumps import certify
from finite_blt.lattice import LatticeParams, Signal, circular_convolve, fourier_forward, fourier_inverse
from finite_blt.zak import convolved_field, fourier_zak_discrepancy, zak_convolve_first, zak_forward, zak_inverse

sizes = st.integers(1, 12)
seeds = st.integers(0, 2**32 - 1)


def _signal(M, N, seed):
    rng = np.random.default_rng(seed)
    lat = LatticeParams(M, N)
    return Signal(lat, rng.standard_normal(lat.d) + 1j * rng.standard_normal(lat.d))


@settings(max_examples=60, deadline=None)
@given(M=sizes, N=sizes, seed=seeds)
def test_transforms_unitary_and_invertible(M, N, seed):
    a = _signal(M, N, seed)
    Z = zak_forward(a)
    F = fourier_forward(a)
    scale = a.norm_sq()
    assert abs(Z.norm_sq() - scale) <= 1e-12 * scale
    assert abs(F.norm_sq() - scale) <= 1e-12 * scale
    assert np.max(np.abs(zak_inverse(Z).values - a.values)) < 1e-12
    assert np.max(np.abs(fourier_inverse(F).values - a.values)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(M=sizes, N=sizes, seed=seeds)
def test_fourier_zak_relation(M, N, seed):
    assert fourier_zak_discrepancy(_signal(M, N, seed)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(M=sizes, N=sizes, seed=seeds)
def test_convolution_relation(M, N, seed):
    a, phi = _signal(M, N, seed), _signal(M, N, seed + 1)
    lhs = zak_convolve_first(zak_forward(a), phi).fundamental
    rhs = zak_forward(circular_convolve(a, phi)).fundamental
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * (1 + np.max(np.abs(rhs)))
    assert np.max(np.abs(convolved_field(a, phi).fundamental - rhs)) < 1e-12 * (1 + np.max(np.abs(rhs)))


@settings(max_examples=40, deadline=None)
@given(M=st.integers(1, 8), N=st.integers(1, 8), seed=seeds)
def test_riesz_routes_agree(M, N, seed):
    b = _signal(M, N, seed)
    z, g = riesz_bounds_via_zak(b), riesz_bounds_via_gram(b)
    assert abs(z.B - g.B) <= 1e-9 * z.B
    assert abs(z.A - g.A) <= 1e-9 * z.B


@settings(max_examples=60, deadline=None)
@given(M=st.integers(2, 16), N=st.integers(2, 16), seed=seeds)
def test_sandwich_on_random_signals(M, N, seed):
    sandwich_check(_signal(M, N, seed))


@settings(max_examples=25, deadline=None)
@given(N=st.integers(5, 40), seed=seeds)
def test_certificate_never_exceeds_beta(N, seed):
    c = certify(random_unimodular_generator(N, seed))
    assert c.certificate <= c.charged <= c.beta * (1 + 1e-12)
    assert c.collection.coordinates_disjoint()


@settings(max_examples=25, deadline=None)
@given(M=st.integers(1, 12), N=st.integers(1, 12), tau=st.floats(-1, 1))
def test_poisson_identities(M, N, tau):
    g = gaussian_function(tau)
    lat = LatticeParams(M, N)
    assert poisson_zak_check(g, lat) < 1e-10
    assert poisson_fourier_check(g, lat) < 1e-10
