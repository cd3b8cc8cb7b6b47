"""Lattice parameters, weighted signals and the finite Fourier transform.

Signals live on the cyclic group Z_d with d = M*N and carry the weighted norm
``||a||^2 = (1/M) sum |a(j)|^2``.  The finite Fourier transform

    F a(k) = (1/M) sum_j a(j) exp(-2 pi i j k / d)

is unitary from the (M, N) lattice onto the transposed (N, M) lattice, so a
:class:`Spectrum` is simply a :class:`Signal` whose lattice has been swapped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "LatticeMismatch",
    "LatticeParams",
    "Signal",
    "Spectrum",
    "fourier_forward",
    "fourier_inverse",
    "naive_fourier",
    "circular_convolve",
    "delta",
    "box",
]


class LatticeMismatch(ValueError):
    """Two objects were combined that live on different lattices."""


@dataclass(frozen=True)
class LatticeParams:
    """The time/frequency step counts (M, N) of a lattice with d = M*N."""

    M: int
    N: int

    def __post_init__(self):
        if int(self.M) != self.M or int(self.N) != self.N:
            raise ValueError(f"lattice sizes must be integers, got ({self.M}, {self.N})")
        if self.M < 1 or self.N < 1:
            raise ValueError(f"lattice sizes must be positive, got ({self.M}, {self.N})")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def square(cls, N: int) -> "LatticeParams":
        return cls(N, N)

    @property
    def d(self) -> int:
        return self.M * self.N

    @property
    def is_square(self) -> bool:
        return self.M == self.N

    def transposed(self) -> "LatticeParams":
        return LatticeParams(self.N, self.M)


def _frozen(values, d: int) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if arr.shape[0] != d:
        raise ValueError(f"expected {d} values, got {arr.shape[0]}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """A complex sequence of length d indexed by Z_d.

    ``values`` is stored as a read-only complex128 array.
    """

    lattice: LatticeParams
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.lattice.d))

    @property
    def d(self) -> int:
        return self.lattice.d

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) / self.lattice.M)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def inner(self, other: "Signal") -> complex:
        """Weighted inner product (1/M) sum x(j) conj(y(j))."""
        _check_same(self, other)
        return complex(np.vdot(other.values, self.values) / self.lattice.M)

    def with_values(self, values) -> "Signal":
        return type(self)(self.lattice, values)

    def shift(self, u: int) -> "Signal":
        """Return j -> a(j - u)."""
        return self.with_values(np.roll(self.values, u))

    def modulate(self, v: int) -> "Signal":
        """Return j -> exp(2 pi i v j / d) a(j)."""
        j = np.arange(self.d)
        return self.with_values(np.exp(2j * np.pi * ((v * j) % self.d) / self.d) * self.values)

    # serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "M": self.lattice.M,
            "N": self.lattice.N,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Signal":
        lattice = LatticeParams(int(data["M"]), int(data["N"]))
        vals = np.asarray(data["values"], dtype=float).reshape(-1, 2)
        return cls(lattice, vals[:, 0] + 1j * vals[:, 1])

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load_json(cls, path) -> "Signal":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for j, z in enumerate(self.values):
                writer.writerow([j, repr(float(z.real)), repr(float(z.imag))])

    @classmethod
    def load_csv(cls, path, lattice: LatticeParams) -> "Signal":
        vals = np.zeros(lattice.d, dtype=np.complex128)
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                vals[int(row[0])] = float(row[1]) + 1j * float(row[2])
        return cls(lattice, vals)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(M={self.lattice.M}, N={self.lattice.N})"


class Spectrum(Signal):
    """Output of :func:`fourier_forward`; lives on the transposed lattice."""


def _check_same(a: Signal, b: Signal) -> None:
    if a.lattice != b.lattice:
        raise LatticeMismatch(f"lattice mismatch: {a.lattice} vs {b.lattice}")


def fourier_forward(a: Signal) -> Spectrum:
    """F a(k) = (1/M) sum_j a(j) exp(-2 pi i j k / d), returned on lattice (N, M).

    numpy's pocketfft backend is O(d log d) for every length, primes included.
    """
    lat = a.lattice
    return Spectrum(lat.transposed(), np.fft.fft(a.values) / lat.M)


def fourier_inverse(spec: Signal) -> Signal:
    """Inverse of :func:`fourier_forward`; accepts a Spectrum on lattice (N, M)."""
    lat = spec.lattice.transposed()
    # a(j) = (M/d) sum_k A(k) exp(2 pi i j k / d), and ifft already divides by d
    return Signal(lat, np.fft.ifft(spec.values) * lat.M)


def naive_fourier(a: Signal) -> Spectrum:
    """O(d^2) direct summation of the finite Fourier transform (test oracle)."""
    d = a.d
    j = np.arange(d)
    kernel = np.exp(-2j * np.pi * (np.outer(j, j) % d) / d)
    return Spectrum(a.lattice.transposed(), kernel @ a.values / a.lattice.M)


def circular_convolve(a: Signal, b: Signal) -> Signal:
    """(a * b)(k) = (1/M) sum_j a(k - j) b(j)."""
    _check_same(a, b)
    out = np.fft.ifft(np.fft.fft(a.values) * np.fft.fft(b.values)) / a.lattice.M
    return type(a)(a.lattice, out)


def delta(lattice: LatticeParams, k: int = 0) -> Signal:
    vals = np.zeros(lattice.d, dtype=np.complex128)
    vals[k % lattice.d] = 1.0
    return Signal(lattice, vals)


def box(lattice: LatticeParams) -> Signal:
    """Indicator of [0, M-1]; its Zak transform is identically one."""
    vals = np.zeros(lattice.d, dtype=np.complex128)
    vals[: lattice.M] = 1.0
    return Signal(lattice, vals)
