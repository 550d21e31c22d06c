"""Message splitting, resource mapping and frame assembly.

A frame superposes three components:

* a pilot at affine index 0 with power ``phi_pilot``,
* the shared (common) stream on affine indices outside residue class 0 and
  outside a two-sided guard around the pilot, scaled by sqrt(phi1),
* the per-user (private) stream on the frequency subcarriers outside
  residue class 0, scaled by sqrt(phi2).

The embedded-pilot variant additionally places unit-power common symbols on
the class-0 affine indices inside the data region; they overlap the pilot
in frequency but never in the affine domain, and never touch the private
subcarriers in either domain.

The guard is two-sided (indices <= G and >= N - G are kept empty) because
channel-induced pilot shifts are cyclic and can land on either side of
index 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import Constellation, Domain, Frame, modulate_bits, qpsk
from .errors import ConfigError, InvalidLength
from .transforms import AffineParams, affine_to_freq, daft, dft, idft


class Approach(Enum):
    CLEAN_PILOT = 1
    PILOT_AND_DATA = 2


@dataclass(frozen=True)
class FrameConfig:
    affine: AffineParams
    guard: int
    phi_pilot: float
    phi1: float
    phi2: float
    approach: Approach = Approach.CLEAN_PILOT
    cp_len: int = 0
    constellation: Constellation = field(default_factory=qpsk)
    # Common symbols placed per nonzero residue class; None fills every
    # eligible index.  The scheme needs sparse common loads to keep the
    # spread common image below the private stream (see README).
    common_per_class: int | None = None

    def __post_init__(self):
        if self.affine.c1_prime < 1:
            raise ConfigError("framing needs a real chirp slope (c1_prime >= 1)")
        if not (self.phi1 > self.phi2 > 0):
            raise ConfigError(f"need phi1 > phi2 > 0, got {self.phi1}, {self.phi2}")
        if self.phi_pilot <= 0:
            raise ConfigError("pilot power must be positive")
        if not (0 <= self.guard and 2 * self.guard + 1 < self.affine.n):
            raise ConfigError(f"guard {self.guard} incompatible with N={self.affine.n}")
        if self.cp_len < 0:
            raise ConfigError("cp_len must be >= 0")
        if self.common_per_class is not None and self.common_per_class < 0:
            raise ConfigError("common_per_class must be >= 0")

    @property
    def n(self) -> int:
        return self.affine.n


def default_guard(c1_prime: int, l_max: int, k_max: int = 0) -> int:
    """One pilot-shift span: the largest |shift| a tap can produce."""
    return c1_prime * l_max + k_max


@dataclass(frozen=True)
class ResourceMap:
    pilot_index: int
    common_indices: np.ndarray
    extra_indices: np.ndarray
    private_subcarriers: np.ndarray

    def __post_init__(self):
        for name in ("common_indices", "extra_indices", "private_subcarriers"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def resource_map(cfg: FrameConfig) -> ResourceMap:
    n, c1p, g = cfg.n, cfg.affine.c1_prime, cfg.guard
    idx = np.arange(n)
    in_data_region = (idx > g) & (idx < n - g)
    cls = idx % c1p

    common = idx[in_data_region & (cls != 0)]
    if cfg.common_per_class is not None:
        kept = []
        for alpha in range(1, c1p):
            members = common[common % c1p == alpha]
            kept.append(members[: cfg.common_per_class])
        common = np.sort(np.concatenate(kept)) if kept else common[:0]

    if cfg.approach is Approach.PILOT_AND_DATA:
        extra = idx[in_data_region & (cls == 0)]
    else:
        extra = idx[:0]

    private = idx[cls != 0]
    return ResourceMap(0, common, extra, private)


@dataclass(frozen=True)
class CapacityCounts:
    n_common: int
    n_extra: int
    n_private: int


def capacity_counts(cfg: FrameConfig) -> CapacityCounts:
    rm = resource_map(cfg)
    return CapacityCounts(rm.common_indices.size, rm.extra_indices.size,
                          rm.private_subcarriers.size)


@dataclass(frozen=True)
class RsmaMessages:
    """Split user messages: one merged common stream, one private stream
    per user."""

    common_bits: np.ndarray
    private_bits_user1: np.ndarray
    private_bits_user2: np.ndarray


def required_bits_per_user(cfg: FrameConfig) -> tuple[int, int]:
    """Exact bit budget each user must supply to fill one frame per user."""
    c = capacity_counts(cfg)
    b = cfg.constellation.bits_per_symbol
    common_bits = (c.n_common + c.n_extra) * b
    u1_common = (common_bits + 1) // 2
    u2_common = common_bits - u1_common
    return u1_common + c.n_private * b, u2_common + c.n_private * b


def split_messages(user1_bits: np.ndarray, user2_bits: np.ndarray,
                   cfg: FrameConfig) -> RsmaMessages:
    """Split each user's bits into a common part and a private part and
    merge the common parts into one stream (user 1's first)."""
    user1_bits = np.asarray(user1_bits, dtype=np.int64).reshape(-1)
    user2_bits = np.asarray(user2_bits, dtype=np.int64).reshape(-1)
    r1, r2 = required_bits_per_user(cfg)
    if user1_bits.size != r1 or user2_bits.size != r2:
        raise InvalidLength(
            f"need ({r1}, {r2}) bits per user, got "
            f"({user1_bits.size}, {user2_bits.size})")
    c = capacity_counts(cfg)
    b = cfg.constellation.bits_per_symbol
    common_bits = (c.n_common + c.n_extra) * b
    u1c = (common_bits + 1) // 2
    u2c = common_bits - u1c
    common = np.concatenate([user1_bits[:u1c], user2_bits[:u2c]])
    return RsmaMessages(common, user1_bits[u1c:], user2_bits[u2c:])


def merge_messages(msgs: RsmaMessages, cfg: FrameConfig) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`split_messages`."""
    total = msgs.common_bits.size
    u1c = (total + 1) // 2
    user1 = np.concatenate([msgs.common_bits[:u1c], msgs.private_bits_user1])
    user2 = np.concatenate([msgs.common_bits[u1c:], msgs.private_bits_user2])
    return user1, user2


def _scatter(n: int, indices: np.ndarray, values: np.ndarray, domain: Domain,
             scale: float) -> Frame:
    if values.size != indices.size:
        raise InvalidLength(f"expected {indices.size} symbols, got {values.size}")
    data = np.zeros(n, dtype=np.complex128)
    data[indices] = scale * values
    return Frame(data, domain)


def build_affine_common(symbols: np.ndarray, cfg: FrameConfig) -> Frame:
    """sqrt(phi1)-scaled common symbols on the common affine indices."""
    rm = resource_map(cfg)
    return _scatter(cfg.n, rm.common_indices, np.asarray(symbols, complex),
                    Domain.AFFINE, np.sqrt(cfg.phi1))


def build_affine_extra(symbols: np.ndarray, cfg: FrameConfig) -> Frame:
    """Unit-power extra common symbols on the class-0 affine indices
    (embedded-pilot variant only; empty otherwise)."""
    rm = resource_map(cfg)
    return _scatter(cfg.n, rm.extra_indices, np.asarray(symbols, complex),
                    Domain.AFFINE, 1.0)


def build_affine_pilot(cfg: FrameConfig) -> Frame:
    """Single pilot symbol 1+0j at affine index 0, scaled by sqrt(phi_pilot)."""
    data = np.zeros(cfg.n, dtype=np.complex128)
    data[0] = np.sqrt(cfg.phi_pilot)
    return Frame(data, Domain.AFFINE)


def build_freq_private(symbols: np.ndarray, cfg: FrameConfig) -> Frame:
    """sqrt(phi2)-scaled private symbols on the nonzero-class subcarriers."""
    rm = resource_map(cfg)
    return _scatter(cfg.n, rm.private_subcarriers, np.asarray(symbols, complex),
                    Domain.FREQUENCY, np.sqrt(cfg.phi2))


def add_cp(time_frame: Frame, cp_len: int) -> Frame:
    data = time_frame.data
    return Frame(np.concatenate([data[data.size - cp_len:], data]), Domain.TIME)


def remove_cp(y: np.ndarray, n: int, cp_len: int) -> np.ndarray:
    y = np.asarray(y).reshape(-1)
    if y.size != n + cp_len:
        raise InvalidLength(f"expected {n + cp_len} samples, got {y.size}")
    return y[cp_len:]


def combine_frame(common: Frame, pilot: Frame, private: Frame,
                  cfg: FrameConfig, extra: Frame | None = None) -> Frame:
    """Superpose the affine components, spread them into frequency and add
    the private subcarriers."""
    affine = common.data + pilot.data
    if extra is not None:
        affine = affine + extra.data
    spread = affine_to_freq(Frame(affine, Domain.AFFINE), cfg.affine)
    return Frame(spread.data + private.data, Domain.FREQUENCY)


def build_frame(msgs: RsmaMessages, cfg: FrameConfig, user: int = 1) -> Frame:
    """Modulate one user's frame: combined frequency plane -> time + CP."""
    c = capacity_counts(cfg)
    syms = modulate_bits(msgs.common_bits, cfg.constellation)
    if syms.size != c.n_common + c.n_extra:
        raise InvalidLength(
            f"common stream carries {syms.size} symbols, frame needs "
            f"{c.n_common + c.n_extra}")
    common = build_affine_common(syms[:c.n_common], cfg)
    extra = None
    if cfg.approach is Approach.PILOT_AND_DATA:
        extra = build_affine_extra(syms[c.n_common:], cfg)
    pbits = msgs.private_bits_user1 if user == 1 else msgs.private_bits_user2
    private = build_freq_private(modulate_bits(pbits, cfg.constellation), cfg)
    comb = combine_frame(common, build_affine_pilot(cfg), private, cfg, extra)
    return add_cp(idft(comb), cfg.cp_len)


def extract_received_planes(y_time: Frame | np.ndarray, cfg: FrameConfig) -> tuple[Frame, Frame]:
    """CP removal followed by the two receiver branches: (frequency plane,
    affine plane) of the same N samples."""
    data = y_time.data if isinstance(y_time, Frame) else np.asarray(y_time)
    y = Frame(remove_cp(data, cfg.n, cfg.cp_len), Domain.TIME)
    return dft(y), daft(y, cfg.affine)


def frame_energy_budget(cfg: FrameConfig) -> float:
    """Expected frame energy (CP excluded) for unit-energy constellations."""
    c = capacity_counts(cfg)
    return (cfg.phi_pilot + cfg.phi1 * c.n_common + 1.0 * c.n_extra
            + cfg.phi2 * c.n_private)

