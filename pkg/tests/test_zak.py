import numpy as np
import pytest

from conftest import random_signal
from finite_blt.errors import TheoremViolation
from finite_blt.lattice import LatticeMismatch, LatticeParams, Signal, circular_convolve, delta
from finite_blt.zak import (
    ZakField,
    convolved_field,
    fourier_zak_discrepancy,
    translate_field,
    zak_convolve_first,
    zak_extend,
    zak_forward,
    zak_inverse,
    zak_of_fourier,
)
from finite_blt import zak as zak_module
from oracles import zak_direct, zak_point

SHAPES = [(2, 2), (5, 3), (3, 5), (4, 9), (7, 7), (12, 20)]


@pytest.mark.parametrize("M,N", [(2, 2), (5, 3), (4, 9), (6, 6)])
def test_forward_matches_direct_sum(rng, M, N):
    a = random_signal(rng, M, N)
    assert np.max(np.abs(zak_forward(a).fundamental - zak_direct(a.values, M, N))) < 1e-12


@pytest.mark.parametrize("M,N", SHAPES)
def test_unitary_and_invertible(rng, M, N):
    a = random_signal(rng, M, N)
    Z = zak_forward(a)
    assert abs(Z.norm_sq() - a.norm_sq()) < 1e-12 * a.norm_sq()
    assert np.max(np.abs(zak_inverse(Z).values - a.values)) < 1e-12


@pytest.mark.parametrize("M,N", [(3, 4), (5, 3)])
def test_extension_matches_defining_sum(rng, M, N):
    a = random_signal(rng, M, N)
    Z = zak_forward(a)
    for m, n in [(-4, 2), (M, 1), (2 * M + 1, -3), (7, 11), (-M * N - 1, 5)]:
        assert abs(Z.extend(m, n) - zak_point(a.values, M, N, m, n)) < 1e-11


def test_extend_inside_domain_is_stored_value(rng):
    Z = zak_forward(random_signal(rng, 3, 4))
    assert Z.extend(2, 3) == Z.fundamental[2, 3]


def test_two_by_two_ones_field():
    Z = ZakField(LatticeParams(2, 2), np.ones((2, 2)))
    assert abs(zak_extend(Z, 2, 1) - (-1)) < 1e-15


def test_quasi_periodicity(rng):
    Z = zak_forward(random_signal(rng, 4, 5))
    m = np.arange(4)[:, None]
    n = np.arange(5)[None, :]
    lhs = zak_extend(Z, m + 4, n)
    rhs = np.exp(2j * np.pi * n / 5) * zak_extend(Z, m, n)
    assert np.max(np.abs(lhs - rhs)) < 1e-13
    assert np.max(np.abs(zak_extend(Z, m, n + 5) - Z.fundamental)) == 0


def test_full_period_in_first_variable(rng):
    a = random_signal(rng, 3, 5)
    Z = zak_forward(a)
    m = rng.integers(-50, 50, 100)
    n = rng.integers(-50, 50, 100)
    assert np.max(np.abs(zak_extend(Z, m + a.d, n) - zak_extend(Z, m, n))) < 1e-12


def test_eta_extension():
    eta = np.exp(0.7j)
    Z = ZakField(LatticeParams(2, 3), np.ones((2, 3)), eta)
    assert abs(Z.extend(2, 0) - eta) < 1e-15
    with pytest.raises(ValueError):
        ZakField(LatticeParams(2, 3), np.ones((2, 3)), 2.0)


def test_wrong_shape_rejected():
    with pytest.raises(ValueError):
        ZakField(LatticeParams(2, 3), np.ones((3, 2)))


@pytest.mark.parametrize("M,N", [(2, 2), (7, 7), (3, 5), (5, 3), (4, 9)])
def test_fourier_zak_relation(rng, M, N):
    a = random_signal(rng, M, N)
    assert fourier_zak_discrepancy(a) < 1e-10
    Zf = zak_of_fourier(a)
    assert Zf.lattice == LatticeParams(N, M)


def test_fourier_zak_delta_two_routes_agree():
    a = delta(LatticeParams(2, 2))
    assert fourier_zak_discrepancy(a) < 1e-12


def test_zak_of_fourier_self_test_catches_drift(rng, monkeypatch):
    a = random_signal(rng, 3, 3)
    real = zak_module.zak_forward
    calls = {"n": 0}

    def drifting(x):
        Z = real(x)
        calls["n"] += 1
        if calls["n"] == 1:  # corrupt the direct route only
            return ZakField(Z.lattice, Z.fundamental + 1e-3, Z.eta)
        return Z

    monkeypatch.setattr(zak_module, "zak_forward", drifting)
    with pytest.raises(TheoremViolation):
        zak_of_fourier(a)
    calls["n"] = 0
    zak_of_fourier(a, self_test=False)


@pytest.mark.parametrize("M,N", [(4, 4), (3, 5), (8, 8)])
def test_convolution_in_first_variable(rng, M, N):
    a, phi = random_signal(rng, M, N), random_signal(rng, M, N)
    lhs = zak_convolve_first(zak_forward(a), phi).fundamental
    assert np.max(np.abs(lhs - zak_forward(circular_convolve(a, phi)).fundamental)) < 1e-10
    assert np.max(np.abs(lhs - convolved_field(a, phi).fundamental)) < 1e-10


def test_convolve_with_scaled_delta_is_identity(rng):
    a = random_signal(rng, 4, 4)
    unit = Signal(a.lattice, 4 * delta(a.lattice).values)
    Z = zak_forward(a)
    assert np.max(np.abs(zak_convolve_first(Z, unit).fundamental - Z.fundamental)) < 1e-12


def test_convolve_lattice_mismatch(rng):
    with pytest.raises(LatticeMismatch):
        zak_convolve_first(zak_forward(random_signal(rng, 2, 3)), random_signal(rng, 3, 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_convolution_lipschitz_bound(rng, k):
    M = N = 8
    a, phi = random_signal(rng, M, N), random_signal(rng, M, N)
    Z = zak_forward(a)
    W = convolved_field(a, phi)
    tv = np.sum(np.abs(np.roll(phi.values, -1) - phi.values))
    m = np.arange(M)[:, None]
    n = np.arange(N)[None, :]
    lhs = np.abs(W.extend(m + k, n) - W.extend(m, n))
    assert lhs.max() <= (k / N) * np.max(np.abs(Z.fundamental)) * tv + 1e-12


def test_translate_field(rng):
    Z = zak_forward(random_signal(rng, 3, 4))
    T = translate_field(Z, 2, 3)
    m = np.arange(-4, 9)[:, None]
    n = np.arange(-5, 9)[None, :]
    assert np.max(np.abs(T.extend(m, n) - Z.extend(m + 2, n + 3))) < 1e-12


def test_json_and_csv_round_trip(rng, tmp_path):
    Z = zak_forward(random_signal(rng, 3, 4))
    Z.save_json(tmp_path / "z.json")
    assert np.array_equal(ZakField.load_json(tmp_path / "z.json").fundamental, Z.fundamental)
    Z.save_csv(tmp_path / "z.csv")
    assert np.array_equal(ZakField.load_csv(tmp_path / "z.csv", Z.lattice).fundamental, Z.fundamental)
