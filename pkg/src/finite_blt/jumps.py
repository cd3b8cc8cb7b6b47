"""Guaranteed phase jumps of quasi-periodic fields and the dyadic log N certificate.

A field W with W(m + M, n) = eta e^(2 pi i n / N) W(m, n) and W(m, n + N) = W(m, n)
cannot have a continuous argument.  On every coarse grid

    {(u + sigma_s, v + omega_t)},   sigma_s = floor(s M / K),  omega_t = floor(t N / L),

some edge therefore carries a large argument increment.  The threshold that is
actually guaranteed is 1/4 - 1/(4L) - e (mod 1), where e <= 1/N is the rounding
loss of the omega grid: the extra 1/(4L) pays for the twist t/L that the last
column of the grid inherits from quasi-periodicity, and it cannot be dropped
(see ``LEMMA_COUNTEREXAMPLE``).  With |W|^2 >= A an argument increment theta
forces |increment of W| >= 2 sqrt(A) sin(pi theta).

Collecting such edges on dyadic grids whose coordinates never repeat, and
charging every row/column energy at most once, bounds beta from below by a
multiple of log N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import PreconditionError, TheoremViolation
from .functionals import beta_of_field
from .lattice import LatticeParams, Signal
from .zak import ZakField, zak_forward

__all__ = [
    "SubLattice",
    "build_sublattice",
    "JumpRecord",
    "JumpCollection",
    "jump_delta",
    "guaranteed_delta",
    "grid_loss",
    "JumpNotFound",
    "find_jump",
    "collect_separated_jumps",
    "Certificate",
    "certify",
    "lower_bound_certificate",
    "RectCertificate",
    "certify_rect",
    "lower_bound_certificate_rect",
    "phase_distance",
    "lemma_jump_scan",
    "random_admissible_phase",
    "LEMMA_COUNTEREXAMPLE",
]

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class JumpNotFound(LookupError):
    """No edge reached a caller-supplied threshold (which carries no guarantee)."""


def jump_delta(A: float, N0: int) -> float:
    """The nominal jump size 2 sqrt(A) sin(pi (1/4 - 1/N0))."""
    return 2.0 * math.sqrt(A) * math.sin(math.pi * (0.25 - 1.0 / N0))


def guaranteed_delta(A: float, L: int, loss: float) -> float:
    """2 sqrt(A) sin(pi (1/4 - 1/(4L) - loss)), the jump size every L-row grid must contain."""
    theta = 0.25 - 0.25 / L - loss
    if theta <= 0:
        raise PreconditionError(f"no jump is guaranteed: threshold {theta:.4g} <= 0 (L={L}, loss={loss:.4g})")
    return 2.0 * math.sqrt(A) * math.sin(math.pi * theta)


def grid_loss(L: int, size: int) -> float:
    """max_t (t/L - floor(t size / L)/size), the phase error of the floor grid."""
    t = np.arange(L + 1)
    return float(np.max((t * size) % L)) / (L * size)


def phase_distance(h):
    """Distance of h to the nearest integer."""
    h = np.asarray(h, dtype=float)
    return np.abs(h - np.round(h))


# --------------------------------------------------------------------------
# sublattices


@dataclass(frozen=True, eq=False)
class SubLattice:
    K: int
    L: int
    sigma: np.ndarray
    omega: np.ndarray

    @property
    def sigma_gaps(self) -> np.ndarray:
        return np.diff(self.sigma)

    @property
    def omega_gaps(self) -> np.ndarray:
        return np.diff(self.omega)


def _floor_grid(count: int, size: int) -> np.ndarray:
    # integer floors, no float rounding
    return (np.arange(count + 1, dtype=np.int64) * size) // count


def build_sublattice(lattice: LatticeParams, K: int, L: int) -> SubLattice:
    M, N = lattice.M, lattice.N
    if not (2 <= K <= M and 2 <= L <= N):
        raise PreconditionError(f"need 2 <= K <= {M} and 2 <= L <= {N}, got K={K}, L={L}")
    sigma, omega = _floor_grid(K, M), _floor_grid(L, N)
    assert sigma[-1] == M and omega[-1] == N
    for arr in (sigma, omega):
        arr.setflags(write=False)
    return SubLattice(K, L, sigma, omega)


# --------------------------------------------------------------------------
# single jumps


@dataclass(frozen=True)
class JumpRecord:
    anchor: tuple[int, int]
    cell: tuple[int, int]
    direction: str
    magnitude: float
    argument_jump: float
    point: tuple[int, int]
    level: int = 0
    # number of unit steps the coarse edge spans in the underlying field
    span: int = 1


def _scan(evaluate: Callable, u: int, v: int, sigma: np.ndarray, omega: np.ndarray, delta: float):
    """First cell (s, t) in row-major order with a coarse edge of size >= delta.

    Returns (s, t, direction, magnitude, argument jump) or None.
    """
    P = evaluate(u + sigma[:, None], v + omega[None, :])
    base = P[:-1, :-1]
    hor = np.abs(P[1:, :-1] - base)
    ver = np.abs(P[:-1, 1:] - base)
    hit = (hor >= delta) | (ver >= delta)
    if not hit.any():
        return None
    s, t = np.unravel_index(int(np.argmax(hit)), hit.shape)
    if hor[s, t] >= delta:
        direction, other, mag = HORIZONTAL, P[s + 1, t], hor[s, t]
    else:
        direction, other, mag = VERTICAL, P[s, t + 1], ver[s, t]
    arg = float(phase_distance(np.angle(other / P[s, t]) / (2 * np.pi)))
    return int(s), int(t), direction, float(mag), arg


def find_jump(
    W: ZakField, u: int, v: int, sub: SubLattice, N0: int, delta: float | None = None
) -> JumpRecord:
    """First coarse edge of the grid anchored at (u, v) whose increment is at least ``delta``.

    By default ``delta`` is the guaranteed size 2 sqrt(A) sin(pi (1/4 - 1/(4L) - 1/N0)),
    and a miss is a bug.  An explicit ``delta`` (for instance the nominal
    ``jump_delta(A, N0)``) may legitimately be missed; that raises JumpNotFound.
    """
    M, N = W.M, W.N
    if N0 < 5 or M < N0 or N < N0:
        raise PreconditionError(f"need M, N >= N0 >= 5, got M={M}, N={N}, N0={N0}")
    A = W.min_modulus_sq()
    if A <= 0:
        raise PreconditionError("field vanishes somewhere (A = 0); no jump is guaranteed")
    guaranteed = delta is None
    if guaranteed:
        delta = guaranteed_delta(A, sub.L, 1.0 / N0)
    found = _scan(W.extend, u, v, sub.sigma, sub.omega, delta)
    if found is None:
        msg = f"no jump of size {delta:.6g} on the grid anchored at ({u}, {v})"
        raise TheoremViolation(msg) if guaranteed else JumpNotFound(msg)
    s, t, direction, mag, arg = found
    point = (u + int(sub.sigma[s]), v + int(sub.omega[t]))
    gaps = sub.sigma_gaps if direction == HORIZONTAL else sub.omega_gaps
    span = int(gaps[s] if direction == HORIZONTAL else gaps[t])
    return JumpRecord((u, v), (s, t), direction, mag, arg, point, 0, span)


# --------------------------------------------------------------------------
# dyadic collections


@dataclass(frozen=True)
class JumpCollection:
    levels: tuple[tuple[JumpRecord, ...], ...]
    J: int
    deltas: tuple[float, ...]
    size: int

    @property
    def records(self) -> list[JumpRecord]:
        return [r for lev in self.levels for r in lev]

    @property
    def level_sizes(self) -> tuple[int, ...]:
        return tuple(len(lev) for lev in self.levels)

    def coordinates_disjoint(self) -> bool:
        pts = [r.point for r in self.records]
        return len({p[0] for p in pts}) == len(pts) and len({p[1] for p in pts}) == len(pts)


def _dyadic_grid(size: int, J: int, j: int) -> np.ndarray:
    return _floor_grid(2 ** (J - j), size)


def _free_offsets(grid: np.ndarray, count: int, width: int, used: set) -> list[int]:
    """Smallest ``count`` offsets u in [0, width) with {u + grid[s]} free of ``used``."""
    out = []
    for u in range(width):
        if not used.intersection((u + grid[:-1]).tolist()):
            out.append(u)
            if len(out) == count:
                return out
    raise TheoremViolation(f"only {len(out)} free offsets, {count} needed")


def _collect(evaluate: Callable, size: int, A: float, extra_loss: float = 0.0) -> JumpCollection:
    """Dyadic separated-jump construction on a size x size quasi-periodic grid.

    ``extra_loss`` is added to the grid rounding loss, for fields whose seam
    twist is itself only approximately t/L.
    """
    J = size.bit_length() - 1
    used_m: set = set()
    used_n: set = set()
    levels = []
    deltas = []
    for j in range(J):
        K = 2 ** (J - j)
        delta = guaranteed_delta(A, K, grid_loss(K, size) + extra_loss)
        deltas.append(delta)
        grid = _dyadic_grid(size, J, j)
        gaps = np.diff(grid)
        if gaps.min() < 2**j or gaps.max() > 2 ** (j + 1):
            raise TheoremViolation(f"dyadic gaps {gaps.min()}..{gaps.max()} outside [2^{j}, 2^{j + 1}]")
        count = 1 if j == 0 else 2 ** (j - 1)
        us = _free_offsets(grid, count, 2**j, used_m)
        vs = _free_offsets(grid, count, 2**j, used_n)
        level = []
        for u, v in zip(us, vs):
            found = _scan(evaluate, u, v, grid, grid, delta)
            if found is None:
                raise TheoremViolation(f"level {j}: no jump of size {delta:.6g} at anchor ({u}, {v})")
            s, t, direction, mag, arg = found
            point = (u + int(grid[s]), v + int(grid[t]))
            span = int(gaps[s] if direction == HORIZONTAL else gaps[t])
            level.append(JumpRecord((u, v), (s, t), direction, mag, arg, point, j, span))
        for rec in level:
            used_m.add(rec.point[0])
            used_n.add(rec.point[1])
        levels.append(tuple(level))
    return JumpCollection(tuple(levels), J, tuple(deltas), size)


def collect_separated_jumps(W: ZakField) -> JumpCollection:
    if W.M != W.N:
        raise PreconditionError("collect_separated_jumps needs a square lattice")
    N = W.N
    if N < 5:
        raise PreconditionError(f"need N >= 5, got {N}")
    A = W.min_modulus_sq()
    if A <= 0:
        raise PreconditionError("field vanishes somewhere (A = 0)")
    coll = _collect(W.extend, N, A)
    if not coll.coordinates_disjoint():
        raise TheoremViolation("collected jumps share a row or column")
    return coll


def _row_col_energy(W: ZakField):
    """Unweighted sum_m |Delta W(m, n)|^2 per row n and sum_n |Gamma W(m, n)|^2 per column m."""
    F = W.fundamental
    nxt = np.vstack([F[1:], W.extend(np.full(W.N, W.M), np.arange(W.N))[None, :]])
    rows = np.sum(np.abs(nxt - F) ** 2, axis=0)
    cols = np.sum(np.abs(np.roll(F, -1, axis=1) - F) ** 2, axis=1)
    return rows, cols


@dataclass(frozen=True)
class Certificate:
    """Outcome of the dyadic construction on a square lattice.

    ``certificate`` is the bound the located jumps actually prove,
    sum over levels of |S_j| delta_j^2 / 2^(j+1).  ``nominal`` is J delta^2 / 4
    with the single jump size delta = 2 sqrt(A) sin(pi (1/4 - 1/N)); it is
    compared with beta directly but is not implied by the jumps found.
    """

    N: int
    J: int
    A: float
    deltas: tuple
    certificate: float
    nominal: float
    charged: float
    beta: float
    collection: JumpCollection = field(repr=False)

    @property
    def delta(self) -> float:
        return jump_delta(self.A, self.N)

    @property
    def ratio(self) -> float:
        return self.beta / self.certificate if self.certificate > 0 else math.inf

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "J": self.J,
            "A": self.A,
            "delta": self.delta,
            "certificate": self.certificate,
            "nominal": self.nominal,
            "charged": self.charged,
            "beta": self.beta,
            "ratio": self.ratio,
        }


def certify(b: Signal | ZakField) -> Certificate:
    """Run the dyadic construction and check every link of the lower-bound chain.

    Each level-j record forces its row plus column energy above
    delta_j^2 / 2^(j+1); rows and columns are never reused, so the charged
    energies sum to at most beta.
    """
    W = b if isinstance(b, ZakField) else zak_forward(b)
    coll = collect_separated_jumps(W)
    rows, cols = _row_col_energy(W)
    charged = 0.0
    cert = 0.0
    for rec in coll.records:
        m, n = rec.point
        energy = rows[n % W.N] + cols[m % W.M]
        need = coll.deltas[rec.level] ** 2 / 2 ** (rec.level + 1)
        if energy < need * (1 - 1e-12):
            raise TheoremViolation(f"record at {rec.point} (level {rec.level}) carries {energy:.6g} < {need:.6g}")
        charged += energy
        cert += need
    beta = beta_of_field(W)
    if charged > beta * (1 + 1e-12):
        raise TheoremViolation(f"charged energy {charged:.6g} exceeds beta {beta:.6g}")
    A = W.min_modulus_sq()
    nominal = coll.J * jump_delta(A, W.N) ** 2 / 4
    return Certificate(W.N, coll.J, A, coll.deltas, cert, nominal, charged, beta, coll)


def lower_bound_certificate(b: Signal | ZakField) -> float:
    return certify(b).certificate


# --------------------------------------------------------------------------
# rectangular lattices


@dataclass(frozen=True)
class RectCertificate:
    M: int
    N: int
    tiles: int
    deltas: tuple
    certificate: float
    beta: float
    records: tuple = field(repr=False, default=())

    @property
    def ratio(self) -> float:
        return self.beta / self.certificate if self.certificate > 0 else math.inf


def certify_rect(b: Signal | ZakField) -> RectCertificate:
    """Lower bound for beta on a rectangular lattice by tiling with square sub-problems.

    With M > N, every k < floor(M/N) gives an exactly N-quasi-periodic N x N field
    (s, t) -> W(k + floor(sM/N), t); with M < N the roles swap, and the sampled
    second variable costs an extra 1/N in the guaranteed argument jump.
    A coarse edge spanning ``steps`` unit steps has squared size at most
    ``steps`` times its line energy (Cauchy-Schwarz).  Each
    jump is charged to its full row (Delta) or column (Gamma) energy; lines
    shared by the p tiles are divided by p.
    """
    W = b if isinstance(b, ZakField) else zak_forward(b)
    M, N = W.M, W.N
    if M == N:
        c = certify(W)
        return RectCertificate(M, N, 1, c.deltas, c.certificate, c.beta, tuple(c.collection.records))
    small = min(M, N)
    if small < 5:
        raise PreconditionError(f"need min(M, N) >= 5, got {small}")
    A = W.min_modulus_sq()
    if A <= 0:
        raise PreconditionError("field vanishes somewhere (A = 0)")
    p = max(M, N) // small
    big = max(M, N)
    wide = M > N
    extra = 0.0 if wide else 1.0 / N

    def coarse(t):
        return (np.asarray(t, dtype=np.int64) * big) // small

    rows, cols = _row_col_energy(W)
    w_delta, w_gamma = M / N, N / M
    total = 0.0
    records = []
    deltas = None
    for k in range(p):
        if wide:
            def evaluate(s, t, k=k):
                return W.extend(k + coarse(s), t)
        else:
            def evaluate(s, t, k=k):
                return W.extend(s, k + coarse(t))
        coll = _collect(evaluate, small, A, extra)
        deltas = coll.deltas
        for rec in coll.records:
            delta = coll.deltas[rec.level]
            s0, t0 = rec.point
            s1, t1 = (s0 + rec.span, t0) if rec.direction == HORIZONTAL else (s0, t0 + rec.span)
            if wide:
                m, n = k + int(coarse(s0)), t0
                steps = int(coarse(s1) - coarse(s0)) if rec.direction == HORIZONTAL else rec.span
            else:
                m, n = s0, k + int(coarse(t0))
                steps = rec.span if rec.direction == HORIZONTAL else int(coarse(t1) - coarse(t0))
            if rec.direction == HORIZONTAL:
                energy, share, weight = rows[n % N], (p if wide else 1), w_delta
            else:
                energy, share, weight = cols[m % M], (1 if wide else p), w_gamma
            # Cauchy-Schwarz over the unit steps inside the coarse edge
            if rec.magnitude**2 > steps * energy * (1 + 1e-12):
                raise TheoremViolation(f"coarse jump at ({m}, {n}) exceeds its line energy")
            total += weight * delta**2 / (share * steps)
            records.append((k, rec, (m, n), steps))
    beta = beta_of_field(W)
    if total > beta * (1 + 1e-12):
        raise TheoremViolation(f"rectangular certificate {total:.6g} exceeds beta {beta:.6g}")
    return RectCertificate(M, N, p, deltas, total, beta, tuple(records))


def lower_bound_certificate_rect(b: Signal | ZakField) -> float:
    return certify_rect(b).certificate


# --------------------------------------------------------------------------
# the combinatorial lemma on a bare grid of phases


def lemma_jump_scan(H: np.ndarray, threshold: float = 0.25):
    """First (i, j, direction) with |Delta H| or |Gamma H| >= threshold (mod 1).

    ``H`` has shape (K+1, L+1).  Returns None if no such edge exists.
    """
    H = np.asarray(H, dtype=float)
    base = H[:-1, :-1]
    hor = phase_distance(H[1:, :-1] - base)
    ver = phase_distance(H[:-1, 1:] - base)
    hit = (hor >= threshold) | (ver >= threshold)
    if not hit.any():
        return None
    i, j = np.unravel_index(int(np.argmax(hit)), hit.shape)
    return int(i), int(j), HORIZONTAL if hor[i, j] >= threshold else VERTICAL


def random_admissible_phase(K: int, L: int, rng: np.random.Generator, spread: float = 1.0):
    """A random H on [0,K] x [0,L] with H(i, L) = H(i, 0) and H(K, j) = H(0, j) + gamma + j/L (mod 1).

    Interior values are free; boundary values are forced up to random integers.
    ``spread`` controls the size of the free values, small spreads give
    nearly continuous phases, which are the hard cases for the lemma.
    Returns (H, gamma).
    """
    gamma = float(rng.random())
    H = np.empty((K + 1, L + 1))
    H[:K, :L] = spread * rng.random((K, L))
    H[:K, L] = H[:K, 0] + rng.integers(-3, 4, K)
    j = np.arange(L + 1)
    H[K, :] = H[0, :] + gamma + j / L + rng.integers(-3, 4, L + 1)
    return H, gamma


# An admissible phase on [0,2] x [0,2] (gamma = 1/4) whose eight edges inside
# [0,1] x [0,1] all move by less than 1/4; the largest move is 3/16 >= 1/4 - 1/8.
LEMMA_COUNTEREXAMPLE = {
    "K": 2,
    "L": 2,
    "gamma": 0.25,
    "H": np.array(
        [
            [0.5, 0.5, 0.5],
            [0.625, 0.4375, 0.625],
            [0.75, 0.25, 0.75],
        ]
    ),
}
