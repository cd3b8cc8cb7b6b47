"""Tail bounds for Gabor basis generators via mollified Zak fields.

The kernel rho is the inverse transform of the trapezoid

    rho_hat(xi) = 1 on |xi| <= 1/2,  2(1 - |xi|) on 1/2 <= |xi| <= 1,  0 beyond,

so rho(t) = 2 sin(3 pi t / 2) sin(pi t / 2) / (pi t)^2.  Dilates of rho, sampled
and periodized, give mollifiers phi (time side) and psi (frequency side) whose
spectra equal one on a plateau.  Convolving with them barely moves a Zak field
across a coarse grid, so every guaranteed jump of Z(b) leaves a point where
Z(b) and Z(b * phi), or Z(Fb) and Z(Fb * psi), differ by a fixed amount.  The
energy of those differences is controlled by the spectral tails of b, which
gives

    (1/M) sum_{j >= MQ} |b(j)|^2 + (1/N) sum_{k >= NR} |Fb(k)|^2 >= C / (QR).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .bridge import SmoothFunction, sample_periodize
from .errors import PreconditionError, TheoremViolation
from .jumps import build_sublattice, grid_loss, guaranteed_delta
from .lattice import LatticeParams, Signal, circular_convolve, fourier_forward
from .zak import ZakField, convolved_field, zak_forward, zak_of_fourier

__all__ = [
    "rho_eval",
    "rho_hat",
    "rho_derivative",
    "rho_derivative_l1",
    "scaled_rho",
    "mollifier_samples",
    "GapPoint",
    "GapJumpSet",
    "conv_gap_jump_set",
    "TailReport",
    "tails",
    "verify_quantitative",
    "check_hypotheses",
    "base_delta",
    "RHO_TV_BOUND",
]

RHO_TV_BOUND = 10.0
_SERIES_CUTOFF = 1e-4
_TOL = 1e-9


# --------------------------------------------------------------------------
# the kernel


def rho_eval(t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = np.abs(t) < _SERIES_CUTOFF
    ts = t[small]
    p2 = math.pi**2
    out[small] = 1.5 - 15 * p2 * ts**2 / 24 + 63 * p2**2 * ts**4 / 720
    tb = t[~small]
    out[~small] = 2 * np.sin(1.5 * math.pi * tb) * np.sin(0.5 * math.pi * tb) / (p2 * tb**2)
    return out[()] if out.ndim == 0 else out


def rho_hat(xi):
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.clip(2 * (1 - a), 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def _rho_series_coeffs(terms: int = 10) -> np.ndarray:
    # rho(t) = sum_{k>=1} (-1)^(k+1) (4^k - 1) pi^(2k-2) t^(2k-2) / (2k)!
    k = np.arange(1, terms + 1)
    return np.array([(-1) ** (i + 1) * (4**i - 1) * math.pi ** (2 * i - 2) / math.factorial(2 * i) for i in k])


_RHO_COEFFS = _rho_series_coeffs()
# the closed-form derivative cancels near 0, so its series branch reaches further out
_DERIV_SERIES_CUTOFF = 0.05


def rho_derivative(t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = np.abs(t) < _DERIV_SERIES_CUTOFF
    ts = t[small]
    acc = np.zeros_like(ts)
    for i, c in enumerate(_RHO_COEFFS[1:], start=2):
        acc += c * (2 * i - 2) * ts ** (2 * i - 3)
    out[small] = acc
    tb = t[~small]
    p2 = math.pi**2
    g = np.cos(math.pi * tb) - np.cos(2 * math.pi * tb)
    dg = -math.pi * np.sin(math.pi * tb) + 2 * math.pi * np.sin(2 * math.pi * tb)
    out[~small] = (dg * tb - 2 * g) / (p2 * tb**3)
    return out[()] if out.ndim == 0 else out


@functools.lru_cache(maxsize=8)
def rho_derivative_l1(window: float = 1e4, step: float = 0.05) -> float:
    """int |rho'| over R, as quadrature on [-window, window] plus the tail bound 5/(pi t^2).

    rho is even, so the half line is integrated and doubled.  The quadrature is
    split at every sign change of rho' found on a grid of the given step.
    """
    t = np.arange(0.0, window + step, step)
    v = rho_derivative(t)
    cuts = [0.0]
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
        cuts.append(optimize.brentq(rho_derivative, t[i], t[i + 1], xtol=1e-15))
    cuts.append(window)
    half = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = integrate.quad(rho_derivative, a, b, epsabs=1e-13, epsrel=1e-12, limit=100)
        half += abs(val)
    total = 2 * half + 2 * 5 / (math.pi * window)
    if total > RHO_TV_BOUND:
        raise TheoremViolation(f"int |rho'| = {total:.6g} exceeds {RHO_TV_BOUND}")
    return total


def _periodized_scaled_rho(x: np.ndarray, s: int, N: int) -> np.ndarray:
    """sum_l s rho(s (x + l N)) in closed form.

    With t_l = x + l N one has cos(2 pi s t_l) = cos(2 pi s x) and
    cos(pi s t_l) = (-1)^(s N l) cos(pi s x), so only the sums of 1/t_l^2 and
    (-1)^l / t_l^2 are needed; both are classical.
    """
    x = np.asarray(x, dtype=float)
    r = np.mod(x, N)
    r = np.where(r > N / 2, r - N, r)
    sin_r = np.sin(math.pi * r / N)
    at_zero = sin_r == 0
    rs = np.where(at_zero, 1.0, r)
    # cos(pi s r) - cos(2 pi s r), written without cancellation
    num = 2 * np.sin(1.5 * math.pi * s * rs) * np.sin(0.5 * math.pi * s * rs)
    zero_val = 1.5 * s
    if (s * N) % 2:
        num = num - 2 * np.cos(math.pi * s * rs) * np.sin(math.pi * rs / (2 * N)) ** 2
        zero_val -= 1 / (2 * s * N**2)
    den = s * N**2 * np.where(at_zero, 1.0, sin_r) ** 2
    return np.where(at_zero, zero_val, num / den)


def scaled_rho(scale: int) -> SmoothFunction:
    """t -> scale rho(scale t), whose transform is rho_hat(xi / scale)."""
    s = int(scale)
    if s < 1:
        raise PreconditionError(f"scale must be a positive integer, got {scale}")
    tv = rho_derivative_l1()
    return SmoothFunction(
        f=lambda t: s * rho_eval(s * np.asarray(t, dtype=float)),
        df=lambda t: s * s * rho_derivative(s * np.asarray(t, dtype=float)),
        ft=lambda xi: rho_hat(np.asarray(xi, dtype=float) / s),
        # |t^2 s rho(s t)| <= 2/(pi^2 s) and |xi^2 rho_hat(xi/s)| <= s^2
        c2=max(2 / (math.pi**2 * s), float(s * s)),
        periodized=lambda x, N: _periodized_scaled_rho(x, s, N),
        # the variation of s rho(s t) is s times that of rho
        tv=s * tv,
        ft_support=float(s),
        support=None,
        name=f"rho[{s}]",
    )


def mollifier_samples(scale: int, lattice: LatticeParams, side: str = "time") -> Signal:
    """The mollifier S_P P_Q (scale rho(scale .)) on the time or frequency lattice.

    ``side='time'`` returns a signal on ``lattice`` = (M, N); ``side='freq'`` one on
    the transposed lattice (N, M).  Writing (P, Q) for the lattice of the result,
    its spectrum equals sum_l rho_hat((k/Q + l P)/scale), which is one for
    k <= scale*Q/2 and for the mirrored indices, and lies in [0, 1] as long as
    2*scale <= P.  Both that and sum |Delta| <= 10 scale are asserted.
    """
    if side not in ("time", "freq"):
        raise ValueError(f"side must be 'time' or 'freq', got {side!r}")
    target = lattice if side == "time" else lattice.transposed()
    P, Qn, d = target.M, target.N, target.d
    if scale < 1 or 2 * scale > P:
        raise PreconditionError(f"need 1 <= scale <= {P // 2} on {target}, got {scale}")
    phi = sample_periodize(scaled_rho(scale), target)
    tv = float(np.sum(np.abs(np.roll(phi.values, -1) - phi.values)))
    if tv > RHO_TV_BOUND * scale:
        raise TheoremViolation(f"mollifier variation {tv:.6g} exceeds {RHO_TV_BOUND * scale}")
    spec = fourier_forward(phi).values
    if np.max(np.abs(spec.imag)) > 1e-8 or spec.real.min() < -1e-8 or spec.real.max() > 1 + 1e-8:
        raise TheoremViolation("mollifier spectrum leaves [0, 1]")
    h = scale * Qn // 2
    k = np.arange(d)
    plateau = (k <= h) | (k >= d - h)
    if np.max(np.abs(spec[plateau] - 1.0)) > 1e-8:
        raise TheoremViolation("mollifier spectrum is not one on its plateau")
    return phi


# --------------------------------------------------------------------------
# the jump set


def base_delta(A: float) -> float:
    """2 sqrt(A) sin(pi/4 - pi/200)."""
    return 2 * math.sqrt(A) * math.sin(math.pi / 4 - math.pi / 200)


def _tv(a: Signal) -> float:
    return float(np.sum(np.abs(np.roll(a.values, -1) - a.values)))


def check_hypotheses(lattice: LatticeParams, A: float, B: float, Q: int, R: int) -> None:
    """Raise PreconditionError unless min(M, N) >= 200 sqrt(B/A), Q <= N/16 sqrt(A/B), R <= M/16 sqrt(A/B)."""
    M, N = lattice.M, lattice.N
    if A <= 0:
        raise PreconditionError("the generator does not span a Riesz basis (A = 0)")
    ratio = math.sqrt(B / A)
    if min(M, N) < 200 * ratio * (1 - _TOL):
        raise PreconditionError(f"need M, N >= 200 sqrt(B/A) = {200 * ratio:.6g}, got ({M}, {N})")
    for name, val, side in (("Q", Q, N), ("R", R, M)):
        if int(val) != val or val < 1:
            raise PreconditionError(f"{name} must be a positive integer, got {val}")
        if val > side / 16 / ratio * (1 + _TOL):
            raise PreconditionError(f"{name} = {val} exceeds {side}/16 sqrt(A/B) = {side / 16 / ratio:.6g}")


@dataclass(frozen=True)
class GapPoint:
    """One point of the jump set.

    ``point`` is on the fundamental domain of Z(b) for the time side and of
    Z(Fb) for the frequency side; ``gap`` is the difference that was measured
    there and ``edge`` the size of the grid jump that produced it.
    """

    anchor: tuple[int, int]
    side: str
    point: tuple[int, int]
    gap: float
    threshold: float
    edge: float


@dataclass(frozen=True)
class GapJumpSet:
    points: tuple[GapPoint, ...]
    delta1: float
    delta_time: float
    delta_freq: float
    edge_delta: float
    K: int
    L: int
    Sigma: int
    Omega: int
    A: float
    B: float

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def promised_size(self) -> float:
        return self.Sigma * self.Omega / 2

    def energy(self) -> float:
        """sum over the set of threshold^2 (a lower bound for the gap energy times d)."""
        return float(sum(p.threshold**2 for p in self.points))


def _grid_values(W: ZakField, u: int, v: int, sigma: np.ndarray, omega: np.ndarray) -> np.ndarray:
    return W.extend(u + sigma[:, None], v + omega[None, :])


def _anchor_point(Z, D, E, u, v, sub, edge_delta, dt, df):
    """First endpoint of a guaranteed grid jump that shows a convolution gap."""
    M, N = Z.M, Z.N
    sig, om = sub.sigma, sub.omega
    P = _grid_values(Z, u, v, sig, om)
    hor = np.abs(P[1:, :-1] - P[:-1, :-1])
    ver = np.abs(P[:-1, 1:] - P[:-1, :-1])
    K, L = hor.shape
    for s in range(K):
        for t in range(L):
            m0, n0 = u + int(sig[s]), v + int(om[t])
            if hor[s, t] >= edge_delta:
                for m in (m0, u + int(sig[s + 1])):
                    g = abs(D.extend(m, n0))
                    if g >= dt:
                        return GapPoint((u, v), "time", (m % M, n0 % N), float(g), dt, float(hor[s, t]))
            if ver[s, t] >= edge_delta:
                # Z(b)(m0, n) = e^(2 pi i m0 n / d) Z(Fb)(n, -m0), so a jump along n in Z(b)
                # is a jump along the first variable of Z(Fb)
                for n in (n0, v + int(om[t + 1])):
                    g = abs(E.extend(n, -m0))
                    if g >= df:
                        return GapPoint((u, v), "freq", (n % N, -m0 % M), float(g), df, float(ver[s, t]))
    return None


def conv_gap_jump_set(
    b: Signal, phi: Signal, psi: Signal, Q: int, R: int, A: float | None = None, B: float | None = None
) -> GapJumpSet:
    """Points where b or Fb visibly differs from its mollification, one per anchor.

    K and L are the smallest integers with K >= 200 sqrt(B) R / (9 delta1) and
    L >= (sqrt(B)/delta1) max(200 Q / 9, 80 pi), delta1 = 2 sqrt(A) sin(pi/4 - pi/200).
    For every anchor (u, v) in [0, Sigma-1] x [0, Omega-1] the coarse grid carries
    an edge of size at least 2 sqrt(A) sin(pi (1/4 - 1/(4L) - e)), e the grid
    rounding loss.  A horizontal edge yields an endpoint with
    |Z(b) - Z(b * phi)| >= delta1/20, a vertical one an endpoint with
    |Z(Fb) - Z(Fb * psi)| >= delta1/40.
    """
    lat = b.lattice
    M, N = lat.M, lat.N
    Z = zak_forward(b)
    A = Z.min_modulus_sq() if A is None else A
    B = Z.max_modulus_sq() if B is None else B
    if Z.min_modulus_sq() < A * (1 - _TOL) or Z.max_modulus_sq() > B * (1 + _TOL):
        raise PreconditionError("|Z(b)|^2 leaves the stated bounds [A, B]")
    check_hypotheses(lat, A, B, Q, R)
    if phi.lattice != lat or psi.lattice != lat.transposed():
        raise PreconditionError("phi must live on (M, N) and psi on (N, M)")
    if _tv(phi) > 10 * R * (1 + _TOL):
        raise PreconditionError(f"sum |Delta phi| = {_tv(phi):.6g} exceeds 10 R")
    if _tv(psi) > 10 * Q * (1 + _TOL):
        raise PreconditionError(f"sum |Delta psi| = {_tv(psi):.6g} exceeds 10 Q")

    d1 = base_delta(A)
    rb = math.sqrt(B)
    K = math.ceil(200 * rb * R / (9 * d1))
    L = math.ceil(rb / d1 * max(200 * Q / 9, 80 * math.pi))
    sub = build_sublattice(lat, K, L)
    Sigma, Omega = int(sub.sigma_gaps.min()), int(sub.omega_gaps.min())
    edge_delta = guaranteed_delta(A, L, grid_loss(L, N))

    D = ZakField(lat, Z.fundamental - convolved_field(b, phi).fundamental)
    Fb = fourier_forward(b)
    ZF = zak_of_fourier(b)
    E = ZakField(lat.transposed(), ZF.fundamental - convolved_field(Fb, psi).fundamental)

    dt, df = d1 / 20, d1 / 40
    points = []
    for u in range(Sigma):
        for v in range(Omega):
            p = _anchor_point(Z, D, E, u, v, sub, edge_delta, dt, df)
            if p is None:
                raise TheoremViolation(f"anchor ({u}, {v}) has no convolution gap")
            points.append(p)
    points.sort(key=lambda p: (p.side, p.point))
    for side in ("time", "freq"):
        pts = [p.point for p in points if p.side == side]
        if len(set(pts)) != len(pts):
            raise TheoremViolation(f"repeated {side}-side points in the jump set")
    out = GapJumpSet(tuple(points), d1, dt, df, edge_delta, K, L, Sigma, Omega, A, B)
    if out.size < out.promised_size:
        raise TheoremViolation(f"jump set of size {out.size} below the promised {out.promised_size}")
    return out


# --------------------------------------------------------------------------
# the tail theorem


def tails(b: Signal, Q: int, R: int) -> tuple[float, float]:
    """((1/M) sum_{j >= MQ} |b(j)|^2, (1/N) sum_{k >= NR} |Fb(k)|^2)."""
    M, N = b.lattice.M, b.lattice.N
    time = float(np.sum(np.abs(b.values[M * Q :]) ** 2)) / M
    freq = float(np.sum(np.abs(fourier_forward(b).values[N * R :]) ** 2)) / N
    return time, freq


@dataclass(frozen=True)
class TailReport:
    Q: int
    R: int
    time_tail: float
    freq_tail: float
    jump_set_size: int
    promised_size: float
    chain: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    recentered: bool = False

    @property
    def lhs(self) -> float:
        return self.time_tail + self.freq_tail

    @property
    def scaled_lhs(self) -> float:
        """lhs * Q * R, the quantity bounded below by the constant C."""
        return self.lhs * self.Q * self.R

    def as_dict(self) -> dict:
        return {
            "Q": self.Q,
            "R": self.R,
            "time_tail": self.time_tail,
            "freq_tail": self.freq_tail,
            "lhs": self.lhs,
            "lhs_times_QR": self.scaled_lhs,
            "jump_set_size": self.jump_set_size,
            "promised_size": self.promised_size,
            "recentered": self.recentered,
            **{f"chain_{k}": v for k, v in self.chain.items()},
            **self.constants,
        }


def _complement(d: int, h: int) -> slice:
    # indices h+1 .. d-1-h, where a plateau of half-width h does not reach
    return slice(h + 1, d - h)


def recenter_signal(b: Signal, Q: int, R: int) -> Signal:
    """The time-frequency translate whose tails contain the plateau complements of b."""
    M, N = b.lattice.M, b.lattice.N
    shift = -(-M * Q // 2) - 1
    mod = -(-N * R // 2) - 1
    return b.shift(shift).modulate(mod)


def verify_quantitative(b: Signal, Q: int, R: int, recenter: bool = False) -> TailReport:
    """Run the mollifier argument on b and check each inequality of the chain

        jump energy <= gap energy at the jump set
                    <= ||Z(b) - Z(b*phi)||^2 + ||Z(Fb) - Z(Fb*psi)||^2
                     = ||b - b*phi||^2 + ||Fb - Fb*psi||^2
                     = ||Fb (1 - F phi)||^2 + ||b(-.) (1 - F psi)||^2
                    <= plateau-complement tails
                    <= tails from the half indices.

    The reported tails start at MQ and NR.  With ``recenter`` they are taken of
    the translate from ``recenter_signal``, whose tails dominate the plateau
    complements of b, and that last link is checked as well.
    """
    lat = b.lattice
    M, N, d = lat.M, lat.N, lat.d
    Z = zak_forward(b)
    A, B = Z.min_modulus_sq(), Z.max_modulus_sq()
    check_hypotheses(lat, A, B, Q, R)
    phi = mollifier_samples(R, lat, "time")
    psi = mollifier_samples(Q, lat, "freq")
    S = conv_gap_jump_set(b, phi, psi, Q, R, A, B)

    Fb = fourier_forward(b)
    jump_energy = S.energy() / d
    point_energy = sum(p.gap**2 for p in S.points) / d
    Zc = convolved_field(b, phi)
    ZF = zak_of_fourier(b)
    ZFc = convolved_field(Fb, psi)
    zak_gap = float(np.sum(np.abs(Z.fundamental - Zc.fundamental) ** 2) + np.sum(np.abs(ZF.fundamental - ZFc.fundamental) ** 2)) / d
    diff_t = b.values - circular_convolve(b, phi).values
    diff_f = Fb.values - circular_convolve(Fb, psi).values
    signal_gap = float(np.sum(np.abs(diff_t) ** 2)) / M + float(np.sum(np.abs(diff_f) ** 2)) / N
    Fphi = fourier_forward(phi).values
    Fpsi = fourier_forward(psi).values
    b_rev = np.roll(b.values[::-1], 1)
    multiplier_gap = (
        float(np.sum(np.abs(Fb.values * (1 - Fphi)) ** 2)) / N
        + float(np.sum(np.abs(b_rev * (1 - Fpsi)) ** 2)) / M
    )
    ht, hf = M * Q // 2, N * R // 2
    pb = np.abs(b.values) ** 2
    pF = np.abs(Fb.values) ** 2
    complement = float(np.sum(pb[_complement(d, ht)])) / M + float(np.sum(pF[_complement(d, hf)])) / N
    half_tails = float(np.sum(pb[ht + 1 :])) / M + float(np.sum(pF[hf + 1 :])) / N

    target = recenter_signal(b, Q, R) if recenter else b
    time_tail, freq_tail = tails(target, Q, R)

    chain = {
        "jump_energy": jump_energy,
        "point_energy": point_energy,
        "zak_gap": zak_gap,
        "signal_gap": signal_gap,
        "multiplier_gap": multiplier_gap,
        "complement_tails": complement,
        "half_index_tails": half_tails,
    }
    scale = 1 + zak_gap

    def le(name_a, a, name_b, b_):
        if a > b_ + _TOL * scale:
            raise TheoremViolation(f"chain link {name_a} <= {name_b} fails: {a:.12g} > {b_:.12g}")

    def eq(name_a, a, name_b, b_):
        if abs(a - b_) > _TOL * scale:
            raise TheoremViolation(f"chain link {name_a} = {name_b} fails: {a:.12g} vs {b_:.12g}")

    le("jump_energy", jump_energy, "point_energy", point_energy)
    le("point_energy", point_energy, "zak_gap", zak_gap)
    eq("zak_gap", zak_gap, "signal_gap", signal_gap)
    eq("signal_gap", signal_gap, "multiplier_gap", multiplier_gap)
    le("multiplier_gap", multiplier_gap, "complement_tails", complement)
    le("complement_tails", complement, "half_index_tails", half_tails)
    if recenter:
        le("complement_tails", complement, "lhs", time_tail + freq_tail)

    constants = {
        "M": M,
        "N": N,
        "A": A,
        "B": B,
        "delta1": S.delta1,
        "delta_time": S.delta_time,
        "delta_freq": S.delta_freq,
        "edge_delta": S.edge_delta,
        "K": S.K,
        "L": S.L,
        "Sigma": S.Sigma,
        "Omega": S.Omega,
        "time_points": sum(p.side == "time" for p in S.points),
        "freq_points": sum(p.side == "freq" for p in S.points),
    }
    return TailReport(Q, R, time_tail, freq_tail, S.size, S.promised_size, chain, constants, recenter)
