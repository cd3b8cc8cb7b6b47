"""Sampling and periodizing rapidly decaying functions, and the identities that tie
the finite transforms to their continuous counterparts.

For f on the real line and a lattice (M, N)

    S_M P_N f = { sum_l f(j/M + l N) }_{j < d},

and the two identities checked here are

    Z_(M,N)(S_M P_N f)(m, n) = Zf(m/M, n/N),
    F_(M,N) S_M P_N f        = S_N P_M (Ff),

with Zf(x, y) = sum_k f(x - k) e^(2 pi i k y) and Ff(xi) = int f(t) e^(-2 pi i t xi) dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import PreconditionError, TheoremViolation
from .lattice import LatticeParams, Signal, fourier_forward
from .zak import zak_forward

__all__ = [
    "SmoothFunction",
    "gaussian_function",
    "zero_function",
    "sample_periodize",
    "continuous_zak",
    "poisson_zak_check",
    "poisson_fourier_check",
    "derivative_l1",
    "tv_domination_check",
    "TAIL_EPS",
    "MAX_TERMS",
]

TAIL_EPS = 1e-14
# refuse truncated periodizations that would need more shifts than this
MAX_TERMS = 200_000


@dataclass(frozen=True)
class SmoothFunction:
    """A function on R known analytically together with its derivative and Fourier transform.

    ``c2`` bounds both sup |t^2 f(t)| and sup |xi^2 Ff(xi)|.  The optional hooks
    give sharper handles than the certificate alone:

    * ``tail_radius(eps)``: a radius T past which the periodization tail is below eps;
    * ``support``: f vanishes outside [-support, support];
    * ``periodized(x, N)``: closed form of P_N f at the points x;
    * ``tv``: the exact value of int |f'|;
    * ``ft_support`` and ``ft_tail_radius``: the same handles for Ff.
    """

    f: Callable
    df: Callable | None
    ft: Callable | None
    c2: float
    tail_radius: Callable[[float], float] | None = None
    support: float | None = None
    periodized: Callable | None = None
    tv: float | None = None
    ft_support: float | None = None
    ft_tail_radius: Callable[[float], float] | None = None
    name: str = "f"

    def __post_init__(self):
        if not math.isfinite(self.c2) or self.c2 < 0:
            raise ValueError(f"decay certificate must be finite and nonnegative, got {self.c2}")

    def dual(self) -> "SmoothFunction":
        """Ff as a SmoothFunction.  Its own transform is f(-t)."""
        if self.ft is None:
            raise PreconditionError(f"{self.name} has no Fourier transform evaluator")
        f = self.f
        return SmoothFunction(
            f=self.ft,
            df=None,
            ft=lambda t: f(-np.asarray(t, dtype=float)),
            c2=self.c2,
            tail_radius=self.ft_tail_radius,
            support=self.ft_support,
            ft_support=self.support,
            ft_tail_radius=self.tail_radius,
            name=f"F[{self.name}]",
        )


def gaussian_function(tau: float = 0.0) -> SmoothFunction:
    """e^(-pi (t - tau)^2), whose transform is e^(-2 pi i tau xi) e^(-pi xi^2)."""

    def f(t):
        return np.exp(-math.pi * (np.asarray(t, dtype=float) - tau) ** 2)

    def df(t):
        u = np.asarray(t, dtype=float) - tau
        return -2 * math.pi * u * np.exp(-math.pi * u**2)

    def ft(xi):
        xi = np.asarray(xi, dtype=float)
        return np.exp(-2j * math.pi * tau * xi - math.pi * xi**2)

    def radius(eps):
        return abs(tau) + math.sqrt(-math.log(eps) / math.pi) + 1.0

    # t^2 <= 2u^2 + 2 tau^2 and sup u^2 e^(-pi u^2) = 1/(pi e)
    c2 = 2 / (math.pi * math.e) + 2 * tau**2
    def ft_radius(eps):
        return math.sqrt(-math.log(eps) / math.pi) + 1.0

    return SmoothFunction(
        f, df, ft, c2, tail_radius=radius, tv=2.0, ft_tail_radius=ft_radius, name=f"gaussian(tau={tau})"
    )


def zero_function() -> SmoothFunction:
    zero = lambda t: np.zeros(np.shape(t))  # noqa: E731
    return SmoothFunction(zero, zero, zero, 0.0, support=0.0, ft_support=0.0, tv=0.0, name="zero")


def _shift_range(x_lo: float, x_hi: float, period: float, radius: float) -> range:
    # every l with x + l*period inside [-radius, radius] for some x in [x_lo, x_hi]
    lo = math.floor((-radius - x_hi) / period)
    hi = math.ceil((radius - x_lo) / period)
    return range(lo, hi + 1)


def _periodize(func: SmoothFunction, x: np.ndarray, period: int) -> np.ndarray:
    if func.periodized is not None:
        return np.asarray(func.periodized(x, period))
    if func.support is not None:
        radius = func.support
    elif func.tail_radius is not None:
        radius = func.tail_radius(TAIL_EPS)
    else:
        # |f(t)| <= c2 / t^2 gives a dropped tail <= 4 c2 / (period^2 (L - 1))
        if func.c2 == 0:
            return np.zeros(x.shape, dtype=complex)
        count = math.ceil(4 * func.c2 / (period**2 * TAIL_EPS)) + 2
        if count > MAX_TERMS:
            raise PreconditionError(
                f"{func.name}: the decay certificate alone needs {count} shifts; supply a closed form"
            )
        radius = count * period
    shifts = _shift_range(float(x.min()), float(x.max()), period, radius)
    if len(shifts) > MAX_TERMS:
        raise PreconditionError(f"{func.name}: periodization needs {len(shifts)} shifts")
    out = np.zeros(x.shape, dtype=complex)
    for l in shifts:
        out += func.f(x + l * period)
    return out


def _as_signal(lattice: LatticeParams, vals: np.ndarray) -> Signal:
    vals = np.asarray(vals)
    if np.iscomplexobj(vals) and np.max(np.abs(vals.imag), initial=0.0) == 0:
        vals = vals.real
    return Signal(lattice, vals)


def sample_periodize(f: SmoothFunction, lattice: LatticeParams) -> Signal:
    """S_M P_N f: the values sum_l f(j/M + l N) for j = 0 .. d-1."""
    x = np.arange(lattice.d) / lattice.M
    return _as_signal(lattice, _periodize(f, x, lattice.N))


def continuous_zak(f: SmoothFunction, x, y):
    """Truncated series for Zf(x, y) = sum_k f(x - k) e^(2 pi i k y).

    When Ff has compact support the equivalent finite series
    Zf(x, y) = e^(2 pi i x y) sum_k Ff(y - k) e^(-2 pi i k x) is used instead.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    out = np.zeros(x.shape, dtype=complex)
    if f.ft_support is not None and f.ft is not None:
        for k in _shift_range(-float(y.max()), -float(y.min()), 1.0, f.ft_support):
            out += f.ft(y + k) * np.exp(2j * math.pi * k * x)
        return out * np.exp(2j * math.pi * x * y)
    if f.support is not None:
        radius = f.support
    elif f.tail_radius is not None:
        radius = f.tail_radius(TAIL_EPS)
    else:
        raise PreconditionError(f"{f.name}: no way to truncate the Zak series")
    for k in _shift_range(-float(x.max()), -float(x.min()), 1.0, radius):
        out += f.f(x + k) * np.exp(-2j * math.pi * k * y)
    return out


def poisson_zak_check(f: SmoothFunction, lattice: LatticeParams) -> float:
    """max |Z(S_M P_N f)(m, n) - Zf(m/M, n/N)| over the fundamental domain."""
    Z = zak_forward(sample_periodize(f, lattice))
    x = np.arange(lattice.M)[:, None] / lattice.M
    y = np.arange(lattice.N)[None, :] / lattice.N
    return float(np.max(np.abs(Z.fundamental - continuous_zak(f, x, y))))


def poisson_fourier_check(f: SmoothFunction, lattice: LatticeParams) -> float:
    """max |F(S_M P_N f) - S_N P_M Ff|."""
    lhs = fourier_forward(sample_periodize(f, lattice))
    rhs = sample_periodize(f.dual(), lattice.transposed())
    return float(np.max(np.abs(lhs.values - rhs.values), initial=0.0))


def _sign_change_points(g: Callable, lo: float, hi: float, step: float) -> list[float]:
    t = np.linspace(lo, hi, max(3, int(math.ceil((hi - lo) / step)) + 1))
    v = g(t)
    roots = []
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
        roots.append(optimize.brentq(g, t[i], t[i + 1], xtol=1e-14))
    return roots


def derivative_l1(f: SmoothFunction, step: float = 0.01) -> float:
    """int |f'| by adaptive quadrature split at the sign changes of f'."""
    if f.tv is not None:
        return float(f.tv)
    if f.df is None:
        raise PreconditionError(f"{f.name}: no derivative evaluator")
    if f.support is not None:
        radius = f.support
    elif f.tail_radius is not None:
        radius = f.tail_radius(TAIL_EPS)
    else:
        raise PreconditionError(f"{f.name}: cannot bound the integration window")

    def dre(t):
        return np.real(f.df(t))

    pts = [-radius, *_sign_change_points(dre, -radius, radius, step), radius]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(lambda t: abs(f.df(t)), a, b, epsabs=1e-12, limit=200)
        total += val
    return total


def tv_domination_check(f: SmoothFunction, lattice: LatticeParams) -> tuple[float, float]:
    """(sum |Delta S_M P_N f|, int |f'|); raises when the first exceeds the second."""
    a = sample_periodize(f, lattice).values
    lhs = float(np.sum(np.abs(np.roll(a, -1) - a)))
    rhs = derivative_l1(f)
    if lhs > rhs * (1 + 1e-9) + 1e-12:
        raise TheoremViolation(f"{f.name}: discrete variation {lhs:.6g} exceeds int |f'| = {rhs:.6g}")
    return lhs, rhs
