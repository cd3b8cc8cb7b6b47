import math

import numpy as np
import pytest

from finite_blt.generators import (
    PhaseSpec,
    bcgp_field,
    bcgp_generator,
    bcgp_phase,
    gaussian_generator,
    gaussian_samples,
    gaussian_zero_misses_grid,
    random_unimodular_generator,
)
from finite_blt.lattice import LatticeParams
from finite_blt.zak import zak_forward


def test_phase_boundary_values():
    assert bcgp_phase(0.0, 0.3) == 1.0
    # gamma = 1 on (0, 1/4]: H = clamp(y/x)
    assert bcgp_phase(0.2, 0.1) == pytest.approx(0.5)
    assert bcgp_phase(0.2, 0.5) == pytest.approx(1.0)
    # gamma = 0 on [1/2, 1]: H = y
    assert bcgp_phase(0.7, 0.3) == pytest.approx(0.3)
    # halfway down the ramp
    assert bcgp_phase(0.375, 0.75) == pytest.approx(0.5 * 1 + 0.5 * 0.75)


def test_phase_quasi_periodic_boundary_conditions():
    y = np.linspace(0, 1, 11)
    # H(1, y) - H(0, y) = y - 1 and H(x, 1) - H(x, 0) is an integer
    assert np.allclose(bcgp_phase(1.0, y) - bcgp_phase(0.0, y), y - 1)
    x = np.linspace(0, 1, 17)
    diff = bcgp_phase(x, 1.0) - bcgp_phase(x, 0.0)
    assert np.allclose(diff, np.round(diff))


def test_phase_domain_checked():
    with pytest.raises(ValueError):
        bcgp_phase(1.5, 0.2)


@pytest.mark.parametrize("variant", ["piecewise-linear", "smoothstep"])
def test_bcgp_unimodular_and_round_trip(variant):
    spec = PhaseSpec.named(variant)
    lat = LatticeParams(16, 16)
    F = bcgp_field(lat, spec)
    assert np.max(np.abs(np.abs(F.fundamental) - 1)) < 1e-12
    b = bcgp_generator(16, spec)
    assert np.max(np.abs(zak_forward(b).fundamental - F.fundamental)) < 1e-12


def test_named_variants():
    assert PhaseSpec.named("pl").variant == "piecewise-linear"
    assert PhaseSpec.named("smooth").variant == "smoothstep"
    with pytest.raises(ValueError):
        PhaseSpec.named("cubic")


def test_smoothstep_is_a_step():
    spec = PhaseSpec.smoothstep()
    assert spec.phi(np.array([-1.0, 0.0, 1.0, 2.0])).tolist() == [0, 0, 1, 1]
    assert spec.phi(np.array([0.5]))[0] == pytest.approx(0.5)
    assert spec.gamma(np.array([0.1, 0.6])).tolist() == [1, 0]


def test_phase_continuity_away_from_the_corner():
    N = 64
    x = np.arange(N + 1)[:, None] / N
    y = np.arange(N + 1)[None, :] / N
    H = bcgp_phase(x, y)
    # outside {y < x, x <= 1/2} neighbors differ by O(1/N)
    bad = (y < x) & (x <= 0.5)
    good = ~bad[1:, :] & ~bad[:-1, :]
    dx = np.abs(np.diff(H, axis=0))[good[:, :]]
    assert dx.max() <= 4.0 / N + 1e-12


def test_bcgp_rectangular():
    b = bcgp_generator(8, M=12)
    assert b.lattice == LatticeParams(12, 8)
    with pytest.raises(ValueError):
        bcgp_generator(1)


def test_gaussian_truncation_stable():
    lat = LatticeParams(8, 8)
    a = gaussian_samples(lat, 0.3, cutoff=1e-18)
    b = gaussian_samples(lat, 0.3, cutoff=1e-36)
    assert np.max(np.abs(a - b)) < 1e-14


def test_gaussian_samples_direct():
    lat = LatticeParams(4, 4)
    t = np.arange(16) / 4
    direct = sum(np.exp(-math.pi * (t + l * 4 - 0.3) ** 2) for l in range(-6, 7))
    assert np.allclose(gaussian_samples(lat, 0.3), direct, atol=1e-15)


@pytest.mark.parametrize("N", [8, 16, 32, 64, 128])
def test_gaussian_zero_misses_grid(N):
    assert gaussian_zero_misses_grid(N, 0.3)
    assert zak_forward(gaussian_generator(N)).min_modulus_sq() > 0


def test_gaussian_zero_on_grid_detected():
    assert not gaussian_zero_misses_grid(4, 0.25)


def test_random_generator_reproducible():
    a = random_unimodular_generator(6, seed=9)
    b = random_unimodular_generator(6, seed=9)
    assert np.array_equal(a.values, b.values)
    assert np.allclose(np.abs(zak_forward(a).fundamental), 1)
