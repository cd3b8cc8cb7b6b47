"""Localization functionals alpha and beta and the sandwich inequality between them.

On a lattice (M, N)

    alpha(b) = M sum_j |Delta b(j)|^2 + N sum_k |Delta F b(k)|^2,
    beta(b)  = (M/N) sum |Delta Z|^2 + (N/M) sum |Gamma Z|^2,

where Delta and Gamma are forward differences in the first and second Zak
variable.  The beta sums run over the fundamental domain; the difference at the
last row reaches across the quasi-periodic seam through ``zak_extend``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TheoremViolation
from .gabor import RieszBounds
from .lattice import LatticeParams, Signal, fourier_forward
from .zak import ZakField, zak_extend, zak_forward

__all__ = [
    "discrete_derivative",
    "alpha_terms",
    "alpha_functional",
    "beta_terms",
    "beta_of_field",
    "beta_functional",
    "BltReport",
    "sandwich_check",
    "SANDWICH_CONSTANT",
]

SANDWICH_CONSTANT = 8 * math.pi**2


def discrete_derivative(a: Signal) -> Signal:
    """Cyclic forward difference j -> a(j+1) - a(j)."""
    return a.with_values(np.roll(a.values, -1) - a.values)


def alpha_terms(b: Signal) -> tuple[float, float]:
    """(time term, frequency term) of alpha."""
    M, N = b.lattice.M, b.lattice.N
    time = M * float(np.sum(np.abs(discrete_derivative(b).values) ** 2))
    spec = fourier_forward(b)
    freq = N * float(np.sum(np.abs(np.roll(spec.values, -1) - spec.values) ** 2))
    return time, freq


def alpha_functional(b: Signal) -> float:
    return sum(alpha_terms(b))


def beta_terms(Z: ZakField) -> tuple[float, float]:
    """Weighted (Delta, Gamma) sums of a field over its fundamental domain."""
    M, N = Z.M, Z.N
    F = Z.fundamental
    n = np.arange(N)
    # only the row m = M can leave the stored block
    nxt = np.vstack([F[1:], zak_extend(Z, np.full(N, M), n)[None, :]])
    dsum = float(np.sum(np.abs(nxt - F) ** 2))
    gsum = float(np.sum(np.abs(np.roll(F, -1, axis=1) - F) ** 2))
    return (M / N) * dsum, (N / M) * gsum


def beta_of_field(Z: ZakField) -> float:
    return sum(beta_terms(Z))


def beta_functional(b: Signal) -> float:
    return beta_of_field(zak_forward(b))


@dataclass(frozen=True)
class BltReport:
    alpha: float
    beta: float
    bounds: RieszBounds
    lattice: LatticeParams
    time_term: float
    freq_term: float
    delta_sum: float
    gamma_sum: float
    extras: dict = field(default_factory=dict)

    @property
    def lower_margin(self) -> float:
        """alpha - (beta/2 - 8 pi^2 B); nonnegative when the left inequality holds."""
        return self.alpha - (0.5 * self.beta - SANDWICH_CONSTANT * self.bounds.B)

    @property
    def upper_margin(self) -> float:
        """(2 beta + 8 pi^2 B) - alpha."""
        return 2 * self.beta + SANDWICH_CONSTANT * self.bounds.B - self.alpha

    def as_dict(self) -> dict:
        return {
            "M": self.lattice.M,
            "N": self.lattice.N,
            "alpha": self.alpha,
            "beta": self.beta,
            "A": self.bounds.A,
            "B": self.bounds.B,
            "time_term": self.time_term,
            "freq_term": self.freq_term,
            "delta_sum": self.delta_sum,
            "gamma_sum": self.gamma_sum,
            **self.extras,
        }


def sandwich_check(b: Signal) -> BltReport:
    """Compute alpha and beta and assert beta/2 - 8pi^2 B <= alpha <= 2 beta + 8pi^2 B."""
    Z = zak_forward(b)
    time, freq = alpha_terms(b)
    dsum, gsum = beta_terms(Z)
    A = Z.min_modulus_sq()
    bounds = RieszBounds(A, max(A, Z.max_modulus_sq()))
    rep = BltReport(time + freq, dsum + gsum, bounds, b.lattice, time, freq, dsum, gsum)
    slack = 1e-9 * (1 + rep.alpha + rep.beta)
    if rep.lower_margin < -slack or rep.upper_margin < -slack:
        raise TheoremViolation(
            f"sandwich inequality fails on {b.lattice}: alpha={rep.alpha:.6g}, "
            f"beta={rep.beta:.6g}, B={bounds.B:.6g}"
        )
    return rep
