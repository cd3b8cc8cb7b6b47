"""Finite Gabor systems on MZ_d x NZ_d and their Riesz bounds.

Two routes are offered.  The Zak route reads the bounds off as the extreme
values of |Z(b)|^2; the Gram route diagonalizes the d x d Gram matrix and is
kept as an independent check on the first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import PreconditionError
from .lattice import LatticeParams, Signal
from .zak import zak_forward

__all__ = [
    "RieszBounds",
    "GaborSystem",
    "build_system",
    "riesz_bounds_via_zak",
    "riesz_bounds_via_gram",
    "is_orthonormal_basis",
    "GRAM_CAP",
]

GRAM_CAP = 4096


@dataclass(frozen=True)
class RieszBounds:
    A: float
    B: float

    def __post_init__(self):
        if self.A < 0 or self.B < self.A:
            raise ValueError(f"need 0 <= A <= B, got A={self.A}, B={self.B}")

    @property
    def is_basis(self) -> bool:
        return self.A > 0


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """Time-frequency shifts e^(2 pi i l j / d) b(j - k) of one generator.

    ``matrix`` has one column per vector; column ``p * M + q`` holds the
    shift k = p*M combined with the modulation l = q*N.
    """

    generator: Signal
    matrix: np.ndarray

    @property
    def lattice(self) -> LatticeParams:
        return self.generator.lattice

    def __len__(self) -> int:
        return self.matrix.shape[1]

    def index(self, k: int, l: int) -> int:
        M, N = self.lattice.M, self.lattice.N
        if k % M or l % N:
            raise ValueError(f"(k, l) = ({k}, {l}) is not on the lattice")
        return (k // M % N) * M + (l // N % M)

    def vector(self, k: int, l: int) -> Signal:
        return Signal(self.lattice, self.matrix[:, self.index(k, l)])

    def gram(self) -> np.ndarray:
        """Gram matrix in the weighted inner product (1/M) sum x conj(y)."""
        V = self.matrix
        return V.conj().T @ V / self.lattice.M


def build_system(b: Signal) -> GaborSystem:
    lat = b.lattice
    M, N, d = lat.M, lat.N, lat.d
    j = np.arange(d)
    ks = M * np.arange(N)
    ls = N * np.arange(M)
    shifted = b.values[(j[None, :] - ks[:, None]) % d]  # (N, d)
    mods = np.exp(2j * np.pi * ((ls[:, None] * j[None, :]) % d) / d)  # (M, d)
    vecs = shifted[:, None, :] * mods[None, :, :]  # (N, M, d)
    mat = vecs.reshape(d, d).T.copy()
    mat.setflags(write=False)
    return GaborSystem(b, mat)


def riesz_bounds_via_zak(b: Signal) -> RieszBounds:
    Z = zak_forward(b)
    A, B = Z.min_modulus_sq(), Z.max_modulus_sq()
    return RieszBounds(A, max(A, B))


def riesz_bounds_via_gram(b: Signal, cap: int = GRAM_CAP) -> RieszBounds:
    if b.d > cap:
        raise PreconditionError(
            f"d = {b.d} exceeds the Gram cap {cap}; use riesz_bounds_via_zak instead"
        )
    ev = linalg.eigvalsh(build_system(b).gram())
    # eigensolver noise can push a zero eigenvalue slightly negative
    A = max(float(ev[0]), 0.0)
    return RieszBounds(A, max(A, float(ev[-1])))


def is_orthonormal_basis(b: Signal, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    Z = zak_forward(b)
    return bool(np.max(np.abs(np.abs(Z.fundamental) ** 2 - 1.0)) <= tol)
