"""Generator families for Gabor bases.

* ``bcgp_generator``: the Zak field is a sampled unimodular phase e^(2 pi i H),
  where H winds once across the square and is smooth except near x = 0.
* ``gaussian_generator``: a sampled, periodized Gaussian whose continuous Zak
  transform has exactly one zero on the unit square.
* ``random_unimodular_generator``: i.i.d. uniform Zak phases, always an ONB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lattice import LatticeParams, Signal
from .zak import ZakField, zak_inverse

__all__ = [
    "PhaseSpec",
    "bcgp_phase",
    "bcgp_field",
    "bcgp_generator",
    "gaussian_samples",
    "gaussian_generator",
    "gaussian_zero_misses_grid",
    "random_unimodular_generator",
    "DEFAULT_TAU",
]

DEFAULT_TAU = 0.3


def _clamp01(t):
    return np.clip(t, 0.0, 1.0)


def _ramp_down(x):
    # 1 on (0, 1/4], linear to 0 at 1/2
    return np.clip(2.0 - 4.0 * np.asarray(x, dtype=float), 0.0, 1.0)


def _bump_tail(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a, b = _bump_tail(t), _bump_tail(1.0 - t)
    return a / (a + b)


@dataclass(frozen=True)
class PhaseSpec:
    """The step profile phi and cutoff gamma used to build H."""

    phi: Callable
    gamma: Callable
    variant: str

    @classmethod
    def piecewise_linear(cls) -> "PhaseSpec":
        return cls(_clamp01, _ramp_down, "piecewise-linear")

    @classmethod
    def smoothstep(cls) -> "PhaseSpec":
        return cls(_smoothstep, lambda x: 1.0 - _smoothstep(4.0 * np.asarray(x, dtype=float) - 1.0), "smoothstep")

    @classmethod
    def named(cls, variant: str) -> "PhaseSpec":
        if variant in ("piecewise-linear", "linear", "pl"):
            return cls.piecewise_linear()
        if variant in ("smoothstep", "smooth"):
            return cls.smoothstep()
        raise ValueError(f"unknown phase variant {variant!r}")


def bcgp_phase(x, y, spec: PhaseSpec | None = None):
    """H(x, y) = gamma(x) phi(y/x) + (1 - gamma(x)) y on (0,1] x [0,1], and 1 at x = 0.

    Vectorized over broadcastable x, y.
    """
    spec = spec or PhaseSpec.piecewise_linear()
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
        raise ValueError("bcgp_phase is defined on the closed unit square")
    out = np.ones(x.shape)
    pos = x > 0
    xp, yp = x[pos], y[pos]
    g = spec.gamma(xp)
    out[pos] = g * spec.phi(yp / xp) + (1.0 - g) * yp
    return out[()] if out.ndim == 0 else out


def bcgp_field(lattice: LatticeParams, spec: PhaseSpec | None = None) -> ZakField:
    """The unimodular field Z(m, n) = exp(2 pi i H(m/M, n/N))."""
    M, N = lattice.M, lattice.N
    x = np.arange(M)[:, None] / M
    y = np.arange(N)[None, :] / N
    return ZakField(lattice, np.exp(2j * np.pi * bcgp_phase(x, y, spec)))


def bcgp_generator(N: int, spec: PhaseSpec | None = None, M: int | None = None) -> Signal:
    if N < 2 or (M is not None and M < 2):
        raise ValueError("bcgp_generator needs M, N >= 2")
    lattice = LatticeParams(N if M is None else M, N)
    return zak_inverse(bcgp_field(lattice, spec))


def _periodization_range(N: int, tau: float, width: float) -> range:
    # t = j/M + l N - tau with j/M in [0, N); keep every l whose t can land in [-width, width]
    lo = math.floor((-width + tau - N) / N)
    hi = math.ceil((width + tau) / N)
    return range(lo, hi + 1)


def gaussian_samples(lattice: LatticeParams, tau: float = 0.0, cutoff: float = 1e-18) -> np.ndarray:
    """sum_l h(j/M + l N) for h(t) = exp(-pi (t - tau)^2), dropping terms below ``cutoff``."""
    M, N = lattice.M, lattice.N
    width = math.sqrt(-math.log(cutoff) / math.pi)
    t = np.arange(lattice.d) / M
    vals = np.zeros(lattice.d)
    for l in _periodization_range(N, tau, width):
        vals += np.exp(-math.pi * (t + l * N - tau) ** 2)
    return vals


def gaussian_zero_misses_grid(N: int, tau: float = DEFAULT_TAU, M: int | None = None) -> bool:
    """True when the Zak zero at (1/2 + tau, 1/2) is not a lattice point."""
    M = N if M is None else M
    x = (0.5 + tau) * M
    y = 0.5 * N
    return not (abs(x - round(x)) < 1e-12 and abs(y - round(y)) < 1e-12)


def gaussian_generator(N: int, tau: float = DEFAULT_TAU, M: int | None = None) -> Signal:
    if N < 2:
        raise ValueError("gaussian_generator needs N >= 2")
    lattice = LatticeParams(N if M is None else M, N)
    return Signal(lattice, gaussian_samples(lattice, tau))


def random_unimodular_generator(N: int, seed: int, M: int | None = None) -> Signal:
    if N < 2:
        raise ValueError("random_unimodular_generator needs N >= 2")
    lattice = LatticeParams(N if M is None else M, N)
    theta = np.random.default_rng(seed).random((lattice.M, lattice.N))
    return zak_inverse(ZakField(lattice, np.exp(2j * np.pi * theta)))
