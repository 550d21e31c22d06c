"""Channel estimation, equalization and dual-domain stream detection.

Estimation runs in one of two places:

* frequency domain (clean-pilot frames over delay-only channels): the
  pilot's spread image occupies every c1'-th subcarrier with constant
  magnitude sqrt(phi/M), so a per-subcarrier LS division followed by an
  M-tap time-domain expansion yields H(m) on all N subcarriers (valid while
  the delay spread stays below M);
* affine domain: a tap (h, l, k) moves the pilot from index 0 to the bin
  with signed offset sigma = k - c1' l, so a thresholded peak search over
  the guard zone recovers (l, k) from the quotient/remainder of sigma by
  c1' (unique while k < c1'), and h from the peak value after removing the
  deterministic chirp phase.

Detection reads the common stream straight off the equalized affine plane
and the private stream straight off the equalized frequency plane; the SIC
variants additionally rebuild and subtract the opposite stream's spread
image between reads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import (ChannelSpec, ChannelTap, channel_matrix, freq_response,
                      frequency_diagonal)
from .core import Domain, Frame, demodulate_symbols, modulate_bits
from .errors import (ConfigError, DegeneratePilot, GuardViolation,
                     PilotContaminated, SingularChannel, UnresolvableDoppler)
from .framing import (Approach, FrameConfig, build_affine_common, build_affine_extra,
                      build_affine_pilot, build_freq_private, extract_received_planes,
                      frame_energy_budget, resource_map)
from .transforms import affine_to_freq, daft, freq_to_affine, idaft


class ReceiverMode(Enum):
    SIC_FREE = "sicfree"
    SIC_CLEAN_PILOT = "sic-clean"
    SIC_FULL = "sic-full"


@dataclass(frozen=True)
class ChannelEstimate:
    domain: Domain
    taps: tuple[ChannelTap, ...] | None = None
    h_freq: np.ndarray | None = None
    nmse: float | None = None

    def __post_init__(self):
        if self.h_freq is not None:
            arr = np.asarray(self.h_freq, dtype=np.complex128)
            arr.flags.writeable = False
            object.__setattr__(self, "h_freq", arr)


def pilot_freq_image(cfg: FrameConfig) -> np.ndarray:
    return affine_to_freq(build_affine_pilot(cfg), cfg.affine).data


def estimate_channel_freq(y_freq: Frame, cfg: FrameConfig,
                          max_delay: int | None = None) -> ChannelEstimate:
    """Clean-pilot LS estimate on the class-0 subcarriers, expanded to all N.

    Assumes a delay-only channel; Doppler leaks neighbouring data into the
    pilot subcarriers and degrades the estimate accordingly.
    """
    if cfg.approach is not Approach.CLEAN_PILOT:
        raise PilotContaminated("embedded-pilot frames carry data on the pilot subcarriers")
    c1p, m = cfg.affine.c1_prime, cfg.affine.m
    if max_delay is not None and max_delay >= m:
        raise ConfigError(f"delay spread {max_delay} aliases: needs max delay < M={m}")
    p0 = pilot_freq_image(cfg)[::c1p]
    if np.min(np.abs(p0)) < 1e-12:
        raise DegeneratePilot("pilot subcarrier magnitude too small for LS division")
    h0 = y_freq.data[::c1p] / p0
    h_time = np.fft.ifft(h0)                    # <= M time taps
    if max_delay is not None:
        # receiver prior: taps beyond the design delay spread are noise
        h_time = h_time.copy()
        h_time[max_delay + 1:] = 0.0
    h_full = np.fft.fft(h_time, n=cfg.n)        # re-expanded to N subcarriers
    return ChannelEstimate(Domain.FREQUENCY, h_freq=h_full)


def _decompose_shift(sigma: int, c1p: int) -> tuple[int, int]:
    """Signed pilot shift -> (delay, Doppler): sigma = k - c1' * l."""
    k = sigma % c1p
    l = -((sigma - k) // c1p)
    return l, k


def estimate_channel_affine(y_affine: Frame, cfg: FrameConfig,
                            doppler_enabled: bool = True,
                            max_delay: int | None = None,
                            max_doppler: int | None = None,
                            threshold_scale: float = 3.0,
                            noise_var: float = 0.0,
                            strict: bool = True) -> ChannelEstimate:
    """Peak-search tap estimate in the guard zone around affine index 0.

    ``max_delay``/``max_doppler`` restrict the candidate search to the
    receiver's design assumptions; an above-threshold shift that cannot
    come from any (l >= 0, 0 <= k < c1') either raises (strict) or is
    skipped.  The detection floor is the lower quartile of the candidate
    bins (the guard keeps shifted data off those, while the rest of the
    zone may hold data images), with zone-bin and known-noise fallbacks
    when the candidate set is small.
    """
    n, c1p, g = cfg.n, cfg.affine.c1_prime, cfg.guard
    if max_doppler is not None and max_doppler >= c1p:
        raise UnresolvableDoppler(f"Doppler range {max_doppler} >= c1'={c1p} is ambiguous")
    if max_delay is not None:
        span = c1p * max_delay + (max_doppler or 0)
        if span > g:
            raise GuardViolation(f"pilot shift span {span} exceeds guard {g}")

    def _valid(sigma: int) -> bool:
        l, k = _decompose_shift(sigma, c1p)
        if l < 0 or (not doppler_enabled and k != 0):
            return False
        if max_delay is not None and l > max_delay:
            return False
        if max_doppler is not None and k > max_doppler:
            return False
        return True

    offsets = np.arange(-g, g + 1)
    y = y_affine.data
    mags = np.abs(y[offsets % n])
    is_candidate = np.array([_valid(int(s)) for s in offsets])
    floor_mags = mags[~is_candidate]
    # The guard keeps channel-shifted data off the candidate bins but not
    # off the rest of the zone, so the candidate bins themselves (mostly
    # empty) give the cleanest floor; fall back to the remaining zone bins
    # or the known noise level when the candidate set is too small.
    if int(np.sum(is_candidate)) >= 6:
        threshold = threshold_scale * float(np.quantile(mags[is_candidate], 0.25))
    elif floor_mags.size >= 4:
        threshold = threshold_scale * float(np.quantile(floor_mags, 0.25))
    elif noise_var > 0:
        threshold = threshold_scale * float(np.sqrt(noise_var))
    else:
        threshold = 0.0
    if mags.size:
        # keep numerical leakage out of the peak list even at zero noise
        threshold = max(threshold, 1e-9 * float(np.max(mags)))

    c1 = cfg.affine.c1

    def _tap_at(sigma: int) -> ChannelTap:
        l, k = _decompose_shift(sigma, c1p)
        bin_idx = sigma % n
        phase = np.exp(-2j * np.pi * cfg.affine.c2 * bin_idx * bin_idx) \
            * np.exp(2j * np.pi * (c1 * l * l - k * l / n))
        h = y[bin_idx] / (np.sqrt(cfg.phi_pilot) * phase)
        return ChannelTap(complex(h), l, k)

    taps: list[ChannelTap] = []
    order = np.argsort(mags)[::-1]
    for j in order:
        if mags[j] <= threshold:
            break
        sigma = int(offsets[j])
        if not _valid(sigma):
            if strict:
                raise UnresolvableDoppler(
                    f"peak at shift {sigma} has no (delay >= 0, Doppler < c1') "
                    f"decomposition within the search bounds")
            continue
        taps.append(_tap_at(sigma))
    if not taps:
        # keep the strongest resolvable peak so the receiver always has a
        # channel to work with, however deep the noise
        for j in order:
            sigma = int(offsets[j])
            if _valid(sigma):
                taps.append(_tap_at(sigma))
                break
    if taps:
        top = max(abs(t.h) for t in taps)
        taps = [t for t in taps if abs(t.h) > 1e-9 * top]

    taps_t = tuple(taps)
    h_freq = None
    if taps_t and all(t.k == 0 for t in taps_t):
        h_freq = freq_response(ChannelSpec(taps_t), n)
    return ChannelEstimate(Domain.AFFINE, taps=taps_t, h_freq=h_freq)


def perfect_estimate(spec: ChannelSpec, cfg: FrameConfig, domain: Domain) -> ChannelEstimate:
    """Genie estimate from the true taps."""
    if domain is Domain.FREQUENCY:
        return ChannelEstimate(Domain.FREQUENCY, taps=spec.taps,
                               h_freq=freq_response(spec, cfg.n))
    return ChannelEstimate(Domain.AFFINE, taps=spec.taps)


def equalize(y: Frame, est: ChannelEstimate, cfg: FrameConfig,
             method: str = "mmse", noise_var: float = 0.0) -> Frame:
    """Equalize a received plane against a channel estimate.

    Frequency-domain estimates (delay-only) use the one-tap per-subcarrier
    ZF/MMSE rule.  Affine-domain (tap) estimates rebuild the cyclic channel
    matrix and solve the MMSE system in the time domain, which by unitarity
    equals the full-matrix affine-domain solve; the output is returned in
    the plane that came in.
    """
    method = method.lower()
    if method not in ("zf", "mmse"):
        raise ConfigError(f"unknown equalizer {method!r}")
    p_avg = frame_energy_budget(cfg) / cfg.n

    if est.domain is Domain.FREQUENCY:
        if y.domain is not Domain.FREQUENCY:
            raise ConfigError("frequency-domain estimate needs a frequency plane")
        h = est.h_freq
        if method == "zf":
            if np.min(np.abs(h)) < 1e-12:
                raise SingularChannel("zero-forcing through a null subcarrier")
            return Frame(y.data / h, Domain.FREQUENCY)
        w = np.conj(h) / (np.abs(h) ** 2 + noise_var / p_avg)
        return Frame(y.data * w, Domain.FREQUENCY)

    if y.domain is not Domain.AFFINE:
        raise ConfigError("affine-domain estimate needs an affine plane")
    if not est.taps:
        raise SingularChannel("empty tap estimate")
    y_time = idaft(y, cfg.affine).data
    g = 0.0 if method == "zf" else noise_var / p_avg
    x_time = _tap_mmse_time(y_time, est.taps, cfg.n, g, method)
    return daft(Frame(x_time, Domain.TIME), cfg.affine)


def _tap_mmse_time(y_time: np.ndarray, taps, n: int, g: float, method: str) -> np.ndarray:
    """Time-domain MMSE/ZF solve for a cyclic tap channel.

    Delay-free channels are diagonal in time (pure time selectivity), so the
    solve is per-sample.  Otherwise the Gram matrix H H^H is assembled from
    its R^2 cyclic diagonals and H^H is applied tap-wise, leaving a single
    dense factorization as the only O(N^3) step.
    """
    idx = np.arange(n)
    if all(t.l == 0 for t in taps):
        hdiag = np.zeros(n, dtype=np.complex128)
        for t in taps:
            hdiag += t.h * np.exp(2j * np.pi * t.k * idx / n)
        if method == "zf":
            if np.min(np.abs(hdiag)) < 1e-12:
                raise SingularChannel("zero-forcing through a channel null")
            return y_time / hdiag
        return y_time * np.conj(hdiag) / (np.abs(hdiag) ** 2 + g)

    if method == "zf":
        h_mat = channel_matrix(ChannelSpec(tuple(taps)), n)
        return np.linalg.solve(h_mat, y_time)
    gram = np.zeros((n, n), dtype=np.complex128)
    for r in taps:
        pr = r.h * np.exp(2j * np.pi * r.k * ((idx - r.l) % n) / n)
        for s in taps:
            ps = np.conj(s.h * np.exp(2j * np.pi * s.k * ((idx - r.l) % n) / n))
            # column where row n of H (at j = n - l_r) meets row m of H:
            # m = n - l_r + l_s (mod N)
            gram[idx, (idx - r.l + s.l) % n] += pr * ps
    gram[idx, idx] += g
    z = np.linalg.solve(gram, y_time)
    x = np.zeros(n, dtype=np.complex128)
    for t in taps:
        x += np.conj(t.h) * np.exp(-2j * np.pi * t.k * idx / n) * z[(idx + t.l) % n]
    return x


@dataclass(frozen=True)
class DetectionResult:
    common_bits: np.ndarray
    private_bits: np.ndarray
    common_syms: np.ndarray   # final equalized symbols, power removed
    extra_syms: np.ndarray
    private_syms: np.ndarray
    mode: ReceiverMode
    diagnostics: dict = field(default_factory=dict)


def _read_streams(eq_a: Frame, eq_f: Frame, cfg: FrameConfig, rm) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    com = eq_a.data[rm.common_indices] / np.sqrt(cfg.phi1)
    ext = eq_a.data[rm.extra_indices]
    priv = eq_f.data[rm.private_subcarriers] / np.sqrt(cfg.phi2)
    return com, ext, priv


def _rebuild_common_freq(com_bits: np.ndarray, ext_bits: np.ndarray,
                         cfg: FrameConfig) -> np.ndarray:
    com_hat = build_affine_common(modulate_bits(com_bits, cfg.constellation), cfg).data
    if ext_bits.size:
        com_hat = com_hat + build_affine_extra(
            modulate_bits(ext_bits, cfg.constellation), cfg).data
    return affine_to_freq(Frame(com_hat, Domain.AFFINE), cfg.affine).data


def detect_streams(y_time: Frame, cfg: FrameConfig, est: ChannelEstimate,
                   mode: ReceiverMode = ReceiverMode.SIC_FREE,
                   noise_var: float = 0.0,
                   method: str = "mmse") -> DetectionResult:
    """Equalize once, then read (and for SIC modes, iteratively clean) the
    common stream from the affine plane and the private stream from the
    frequency plane."""
    y_freq, y_aff = extract_received_planes(y_time, cfg)
    if est.domain is Domain.FREQUENCY:
        eq_f = equalize(y_freq, est, cfg, method, noise_var)
        eq_a = freq_to_affine(eq_f, cfg.affine)
    else:
        eq_a = equalize(y_aff, est, cfg, method, noise_var)
        eq_f = affine_to_freq(eq_a, cfg.affine)

    rm = resource_map(cfg)
    con = cfg.constellation
    com, ext, priv = _read_streams(eq_a, eq_f, cfg, rm)
    com_bits, ext_bits = demodulate_symbols(com, con), demodulate_symbols(ext, con)

    if mode is ReceiverMode.SIC_FREE:
        priv_bits = demodulate_symbols(priv, con)
        return DetectionResult(np.concatenate([com_bits, ext_bits]), priv_bits,
                               com, ext, priv, mode)

    # subtract the detected common image, then read private off the clean plane
    clean_f = Frame(eq_f.data - _rebuild_common_freq(com_bits, ext_bits, cfg),
                    Domain.FREQUENCY)
    priv = clean_f.data[rm.private_subcarriers] / np.sqrt(cfg.phi2)
    priv_bits = demodulate_symbols(priv, con)
    if mode is ReceiverMode.SIC_CLEAN_PILOT:
        return DetectionResult(np.concatenate([com_bits, ext_bits]), priv_bits,
                               com, ext, priv, mode)

    # full SIC: also remove the private image from the affine plane and
    # re-detect both streams once
    priv_hat = build_freq_private(modulate_bits(priv_bits, con), cfg)
    clean_a = Frame(eq_a.data - freq_to_affine(priv_hat, cfg.affine).data,
                    Domain.AFFINE)
    com = clean_a.data[rm.common_indices] / np.sqrt(cfg.phi1)
    ext = clean_a.data[rm.extra_indices]
    com_bits, ext_bits = demodulate_symbols(com, con), demodulate_symbols(ext, con)
    clean_f = Frame(eq_f.data - _rebuild_common_freq(com_bits, ext_bits, cfg),
                    Domain.FREQUENCY)
    priv = clean_f.data[rm.private_subcarriers] / np.sqrt(cfg.phi2)
    priv_bits = demodulate_symbols(priv, con)
    return DetectionResult(np.concatenate([com_bits, ext_bits]), priv_bits,
                           com, ext, priv, mode)


def estimate_nmse(est: ChannelEstimate, true_spec: ChannelSpec, n: int) -> float:
    """Diagnostic estimate error.

    Frequency-domain estimates compare against H(m) (delay-only) or the
    diagonal of the true frequency-domain channel (Doppler; the off-diagonal
    ICI is invisible to a one-tap model).  Tap estimates compare tap-wise:
    matched taps contribute |h_hat - h|^2, missed and spurious taps their
    full power.
    """
    if est.h_freq is not None and not true_spec.has_doppler:
        h = freq_response(true_spec, n)
        return float(np.sum(np.abs(est.h_freq - h) ** 2) / np.sum(np.abs(h) ** 2))
    if est.h_freq is not None and est.taps is None:
        # integer-Doppler taps have zero frequency-domain diagonal, so the
        # one-tap reference is the response of the delay-only taps
        h = frequency_diagonal(true_spec, n)
        return float(np.sum(np.abs(est.h_freq - h) ** 2) / np.sum(np.abs(h) ** 2))
    true = {(t.l, t.k): t.h for t in true_spec.taps}
    got = {(t.l, t.k): t.h for t in (est.taps or ())}
    err = 0.0
    for key, h in true.items():
        err += abs(got.pop(key, 0.0) - h) ** 2
    err += sum(abs(h) ** 2 for h in got.values())
    ref = sum(abs(t.h) ** 2 for t in true_spec.taps)
    return float(err / ref)
