"""Conventional power-domain RSMA reference link.

A single OFDM waveform carries both streams superposed on every subcarrier
(common at sqrt(phi1), private at sqrt(phi2)) and the receiver performs
textbook SIC: decode the common stream treating the private one as noise,
remodulate, subtract, then decode the private stream.  The receiver is
given genie channel knowledge, which makes comparisons against it
conservative.  This is a labelled stand-in for the conventional-RSMA curves,
not a reimplementation of any specific published baseline.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, apply_channel, frequency_diagonal
from .core import (Constellation, Domain, Frame, demodulate_symbols, modulate_bits,
                   qpsk)
from .framing import add_cp, remove_cp
from .transforms import dft, idft


@dataclass(frozen=True)
class BaselineConfig:
    n: int
    phi1: float
    phi2: float
    cp_len: int = 0
    constellation: Constellation = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.constellation is None:
            object.__setattr__(self, "constellation", qpsk())


@dataclass(frozen=True)
class BaselineFrameResult:
    common_bit_errors: int
    private_bit_errors: int
    n_bits_common: int
    n_bits_private: int
    common_err_energy: float
    private_err_energy: float


def baseline_budget(cfg: BaselineConfig) -> float:
    return (cfg.phi1 + cfg.phi2) * cfg.n


def run_baseline_frame(cfg: BaselineConfig, spec: ChannelSpec,
                       rng: np.random.Generator) -> BaselineFrameResult:
    con = cfg.constellation
    b = con.bits_per_symbol
    bits_c = rng.integers(0, 2, size=cfg.n * b, dtype=np.int64)
    bits_p = rng.integers(0, 2, size=cfg.n * b, dtype=np.int64)
    sym_c = modulate_bits(bits_c, con)
    sym_p = modulate_bits(bits_p, con)
    s = np.sqrt(cfg.phi1) * sym_c + np.sqrt(cfg.phi2) * sym_p

    tx = add_cp(idft(Frame(s, Domain.FREQUENCY)), cfg.cp_len)
    rx = apply_channel(tx, spec, rng)
    y = Frame(remove_cp(rx.data, cfg.n, cfg.cp_len), Domain.TIME)
    y_f = dft(y).data

    # Conventional OFDM processing: one tap per subcarrier with genie
    # knowledge.  Under Doppler the one-tap reference is the diagonal of
    # the true frequency-domain channel; the off-diagonal ICI is noise to
    # this receiver.
    p_avg = baseline_budget(cfg) / cfg.n
    h = frequency_diagonal(spec, cfg.n)
    eq = y_f * np.conj(h) / (np.abs(h) ** 2 + spec.noise_var / p_avg)

    # SIC: common first, subtract, then private
    com_est = eq / np.sqrt(cfg.phi1)
    bits_c_hat = demodulate_symbols(com_est, con)
    com_remod = modulate_bits(bits_c_hat, con)
    residual = eq - np.sqrt(cfg.phi1) * com_remod
    priv_est = residual / np.sqrt(cfg.phi2)
    bits_p_hat = demodulate_symbols(priv_est, con)

    return BaselineFrameResult(
        common_bit_errors=int(np.sum(bits_c != bits_c_hat)),
        private_bit_errors=int(np.sum(bits_p != bits_p_hat)),
        n_bits_common=bits_c.size,
        n_bits_private=bits_p.size,
        common_err_energy=float(np.sum(np.abs(com_est - sym_c) ** 2)),
        private_err_energy=float(np.sum(np.abs(priv_est - sym_p) ** 2)),
    )
