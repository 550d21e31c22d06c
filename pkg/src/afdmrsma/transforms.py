"""Unitary DFT/DAFT pairs and the chirp spreading maps between domains.

The affine (chirp) synthesis is

    s(n) = (1/sqrt N) sum_i X(i) exp(j 2 pi (c1 n^2 + c2 i^2 + n i / N)),

with c1 = c1'/(2N) and c1' a power of two dividing N.  The analysis
transform is its exact inverse, so both directions are unitary and power
bookkeeping survives every domain change.

With N = c1' M the time chirp exp(j pi n^2 / M) is M-periodic whenever M is
even, which confines the frequency image of affine index i to the
subcarriers m with i = m (mod c1').  The spreading maps below are computed
as composed fast transforms (O(N log N)); ``kernel_phi`` is the closed-form
per-entry kernel of the same map, kept as an independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Domain, Frame
from .errors import InvalidIndex, InvalidLength, ConfigError


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class AffineParams:
    """Chirp transform geometry.

    n: frame length, power of two.
    c1_prime: integer chirp slope, power of two, divides n.
    c2: frequency-direction chirp rate (adds per-index phase only).
    """

    n: int
    c1_prime: int
    c2: float = 0.0

    def __post_init__(self):
        if not _is_pow2(self.n):
            raise ConfigError(f"frame length {self.n} is not a power of 2")
        if self.c1_prime == 0:
            return  # degenerate chirp-off geometry: the pair reduces to DFT/IDFT
        if not _is_pow2(self.c1_prime):
            raise ConfigError(f"c1_prime {self.c1_prime} is not a power of 2")
        if self.n % self.c1_prime != 0:
            raise ConfigError(f"c1_prime {self.c1_prime} does not divide N={self.n}")

    @property
    def c1(self) -> float:
        return self.c1_prime / (2.0 * self.n)

    @property
    def m(self) -> int:
        """Class size M = N / c1'."""
        if self.c1_prime == 0:
            raise ConfigError("chirp-off geometry has no residue-class structure")
        return self.n // self.c1_prime


@lru_cache(maxsize=32)
def _chirps(n: int, c1_prime: int, c2: float):
    """(time chirp e^{j2pi c1 k^2}, freq chirp e^{j2pi c2 k^2}), read-only.

    The c1 phase pi*c1'*k^2/N is reduced modulo 2N in exact integer
    arithmetic so large-N frames keep full double precision.
    """
    k = np.arange(n, dtype=np.int64)
    r = (c1_prime * k * k) % (2 * n)
    time_chirp = np.exp(1j * np.pi * r / n)
    freq_chirp = np.exp(2j * np.pi * np.mod(c2 * (k.astype(float) ** 2), 1.0))
    time_chirp.flags.writeable = False
    freq_chirp.flags.writeable = False
    return time_chirp, freq_chirp


def _check(x: Frame, domain: Domain, n: int | None = None) -> np.ndarray:
    if x.domain is not domain:
        raise ConfigError(f"expected a {domain.value}-domain frame, got {x.domain.value}")
    if n is not None and x.n != n:
        raise InvalidLength(f"frame length {x.n} != configured N={n}")
    return x.data


def dft(x: Frame, n: int | None = None) -> Frame:
    """Unitary DFT, time -> frequency."""
    data = _check(x, Domain.TIME, n)
    return Frame(np.fft.fft(data) / np.sqrt(data.size), Domain.FREQUENCY)


def idft(x: Frame, n: int | None = None) -> Frame:
    """Unitary inverse DFT, frequency -> time."""
    data = _check(x, Domain.FREQUENCY, n)
    return Frame(np.fft.ifft(data) * np.sqrt(data.size), Domain.TIME)


def idaft(x: Frame, p: AffineParams) -> Frame:
    """Chirp synthesis, affine -> time (degenerates to idft at c1=c2=0)."""
    data = _check(x, Domain.AFFINE, p.n)
    tc, fc = _chirps(p.n, p.c1_prime, p.c2)
    s = np.fft.ifft(data * fc) * np.sqrt(p.n)
    return Frame(s * tc, Domain.TIME)


def daft(x: Frame, p: AffineParams) -> Frame:
    """Chirp analysis, time -> affine; exact inverse of :func:`idaft`."""
    data = _check(x, Domain.TIME, p.n)
    tc, fc = _chirps(p.n, p.c1_prime, p.c2)
    s = np.fft.fft(data * tc.conj()) / np.sqrt(p.n)
    return Frame(s * fc.conj(), Domain.AFFINE)


def affine_to_freq(x: Frame, p: AffineParams) -> Frame:
    """Spread an affine frame into the frequency domain (= dft o idaft).

    For even M the image of affine index i occupies only the subcarriers m
    with m = i (mod c1').
    """
    data = _check(x, Domain.AFFINE, p.n)
    tc, fc = _chirps(p.n, p.c1_prime, p.c2)
    s = np.fft.ifft(data * fc) * tc
    return Frame(np.fft.fft(s), Domain.FREQUENCY)


def freq_to_affine(x: Frame, p: AffineParams) -> Frame:
    """Spread a frequency frame into the affine domain; inverse of
    :func:`affine_to_freq`."""
    data = _check(x, Domain.FREQUENCY, p.n)
    tc, fc = _chirps(p.n, p.c1_prime, p.c2)
    s = np.fft.ifft(data) * tc.conj()
    return Frame(np.fft.fft(s) * fc.conj(), Domain.AFFINE)


def kernel_phi(i: int, m: int, p: AffineParams) -> complex:
    """Closed-form spreading kernel phi^i(m).

    phi^i(m) = sum_{q=0}^{M-1} exp(j pi q^2 / M) exp(j 2 pi q (i-m) / N)
             = S_M exp(-j pi d^2 / M),   d = (i - m)/c1',
    where S_M = sum_q exp(j pi q^2 / M) is a quadratic Gauss sum, and the
    kernel vanishes unless i = m (mod c1').  Assembling

        Y(m) = (c1'/N) sum_{[i]=[m]} X(i) exp(j 2 pi c2 i^2) phi^i(m)

    reproduces :func:`affine_to_freq` exactly (even M).
    """
    if not (0 <= i < p.n and 0 <= m < p.n):
        raise InvalidIndex(f"indices ({i}, {m}) outside [0, {p.n})")
    if (i - m) % p.c1_prime != 0:
        return 0.0 + 0.0j
    mm = p.m
    d = (i - m) // p.c1_prime
    s_m = _gauss_sum(mm)
    return complex(s_m * np.exp(-1j * np.pi * ((d * d) % (2 * mm)) / mm))


@lru_cache(maxsize=32)
def _gauss_sum(m: int) -> complex:
    q = np.arange(m, dtype=np.int64)
    return complex(np.sum(np.exp(1j * np.pi * ((q * q) % (2 * m)) / m)))


def idaft_matrix(p: AffineParams) -> np.ndarray:
    """Dense unitary synthesis matrix (factorized product, production path)."""
    tc, fc = _chirps(p.n, p.c1_prime, p.c2)
    f_inv = np.fft.ifft(np.eye(p.n), axis=0) * np.sqrt(p.n)
    return (tc[:, None] * f_inv) * fc[None, :]


def daft_matrix(p: AffineParams) -> np.ndarray:
    """Dense unitary analysis matrix, the conjugate transpose of
    :func:`idaft_matrix`."""
    return idaft_matrix(p).conj().T
