"""Tap channels with integer delays and Dopplers, plus AWGN.

A tap (h, l, k) acts cyclically on a length-L frame as

    y(n) = h * exp(j 2 pi k ([n-l] mod L) / L) * x([n-l] mod L),

i.e. delay by l samples then a k-cycles-per-frame Doppler ramp, both
wrapping modulo the frame it is applied to.  Applied to a CP-protected
frame this reduces to the classic circular model on the N-sample window for
delay-only taps; with cp_len = 0 it is exactly the cyclic delay-Doppler
matrix channel at length N.

In the affine plane a tap shifts the pilot from index 0 to
(k - c1' l) mod N: delays move the peak to the wrap side of the two-sided
guard, Dopplers to the near side.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Frame
from .errors import DopplerPresent, InvalidChannel

_rt = np.sqrt


@dataclass(frozen=True)
class ChannelTap:
    h: complex
    l: int
    k: int

    def __post_init__(self):
        if self.l < 0:
            raise InvalidChannel(f"negative delay {self.l}")


@dataclass(frozen=True)
class ChannelSpec:
    taps: tuple[ChannelTap, ...]
    noise_var: float = 0.0
    normalize: bool = False

    def __post_init__(self):
        taps = tuple(self.taps)
        if not taps:
            raise InvalidChannel("need at least one tap")
        if self.noise_var < 0:
            raise InvalidChannel("noise variance must be >= 0")
        if self.normalize:
            p = _rt(sum(abs(t.h) ** 2 for t in taps))
            taps = tuple(ChannelTap(t.h / p, t.l, t.k) for t in taps)
        object.__setattr__(self, "taps", taps)

    @property
    def max_delay(self) -> int:
        return max(t.l for t in self.taps)

    @property
    def max_doppler(self) -> int:
        return max(t.k for t in self.taps)

    @property
    def has_doppler(self) -> bool:
        return any(t.k != 0 for t in self.taps)

    def with_noise(self, noise_var: float) -> "ChannelSpec":
        return ChannelSpec(self.taps, noise_var, normalize=False)


def two_tap(p2: float, l2: int = 0, k2: int = 0, noise_var: float = 0.0) -> ChannelSpec:
    """Unit-power two-tap channel: a main tap at (0, 0) plus a second tap
    with power fraction p2 at (l2, k2)."""
    return ChannelSpec((ChannelTap(_rt(1.0 - p2), 0, 0), ChannelTap(_rt(p2), l2, k2)),
                       noise_var)


def apply_channel(x: Frame, spec: ChannelSpec, rng: np.random.Generator | None = None) -> Frame:
    """Pass a time frame (CP included) through the tap channel and add
    circular complex AWGN of variance ``noise_var`` per sample."""
    data = x.data
    ell = data.size
    n = np.arange(ell)
    y = np.zeros(ell, dtype=np.complex128)
    for tap in spec.taps:
        if tap.l >= ell:
            raise InvalidChannel(f"delay {tap.l} >= frame length {ell}")
        idx = (n - tap.l) % ell
        y += tap.h * np.exp(2j * np.pi * tap.k * idx / ell) * data[idx]
    if spec.noise_var > 0:
        if rng is None:
            rng = np.random.default_rng()
        scale = _rt(spec.noise_var / 2.0)
        y += scale * (rng.standard_normal(ell) + 1j * rng.standard_normal(ell))
    return Frame(y, x.domain)


def channel_matrix(spec: ChannelSpec, ell: int) -> np.ndarray:
    """Dense length-ell matrix of the same cyclic tap action (noise-free)."""
    n = np.arange(ell)
    mat = np.zeros((ell, ell), dtype=np.complex128)
    for tap in spec.taps:
        if tap.l >= ell:
            raise InvalidChannel(f"delay {tap.l} >= frame length {ell}")
        idx = (n - tap.l) % ell
        mat[n, idx] += tap.h * np.exp(2j * np.pi * tap.k * idx / ell)
    return mat


def freq_response(spec: ChannelSpec, n: int) -> np.ndarray:
    """H(m) = sum_r h_r exp(-j 2 pi m l_r / n) for delay-only channels.

    CP-protected frames then satisfy Y(m) = S(m) H(m) subcarrier-wise.
    """
    if spec.has_doppler:
        raise DopplerPresent("frequency response is defined for delay-only channels")
    m = np.arange(n)
    h = np.zeros(n, dtype=np.complex128)
    for tap in spec.taps:
        h += tap.h * np.exp(-2j * np.pi * m * tap.l / n)
    return h


def frequency_diagonal(spec: ChannelSpec, n: int) -> np.ndarray:
    """Diagonal of the frequency-domain channel matrix.

    Integer-Doppler taps average to zero along the diagonal, so only the
    delay-only taps contribute; this is the best one-tap reference a
    conventional per-subcarrier receiver can use under Doppler.
    """
    static = tuple(t for t in spec.taps if t.k == 0)
    if not static:
        return np.zeros(n, dtype=np.complex128)
    return freq_response(ChannelSpec(static), n)


def snr_to_noise_var(snr_db: float, avg_sample_energy: float) -> float:
    """Noise variance giving the requested SNR against the average
    transmitted sample energy (data frame, CP excluded)."""
    return avg_sample_energy / (10.0 ** (snr_db / 10.0))
