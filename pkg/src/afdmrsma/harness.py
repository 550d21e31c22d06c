"""Monte Carlo link sweeps, metrics and result emission.

Determinism contract: every frame draws its randomness from a Philox
generator keyed on the run seed and counted by (SNR point, frame index), and
per-point aggregation sums fixed-order per-frame records.  Results are
therefore byte-identical across runs and across worker counts.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baseline import BaselineConfig, baseline_budget, run_baseline_frame
from .channel import ChannelSpec, ChannelTap, apply_channel, snr_to_noise_var
from .core import Domain, Frame, frame_rng, modulate_bits, random_bits
from .errors import ConfigError, InvalidLength, SimulationError
from .framing import (Approach, FrameConfig, build_frame, capacity_counts,
                      extract_received_planes, frame_energy_budget,
                      required_bits_per_user, split_messages)
from .receiver import (ChannelEstimate, ReceiverMode, detect_streams,
                       estimate_channel_affine, estimate_channel_freq,
                       estimate_nmse, perfect_estimate)
from .transforms import AffineParams

CSV_COLUMNS = ("snr_db", "ber_common", "ber_private", "ber_total", "se",
               "channel_nmse", "frames")


@dataclass(frozen=True)
class SimConfig:
    frame: FrameConfig
    taps: tuple[ChannelTap, ...]
    snr_grid_db: tuple[float, ...]
    frames_per_point: int = 100
    mode: ReceiverMode = ReceiverMode.SIC_FREE
    estimator: str = "auto"   # auto | freq | affine | perfect-freq | perfect-affine
    seed: int = 1
    workers: int = 1
    se_cap_db: float = 30.0
    baseline: bool = False
    zero_noise: bool = False   # force sigma^2 = 0 regardless of the SNR grid
    noise_override: float | None = None  # fixed sigma^2 instead of SNR-derived

    def __post_init__(self):
        if self.frames_per_point < 1:
            raise ConfigError("frames_per_point must be >= 1")
        if not self.snr_grid_db:
            raise ConfigError("SNR grid must be nonempty")
        object.__setattr__(self, "taps", tuple(self.taps))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))


@dataclass(frozen=True)
class LinkResult:
    snr_db: float
    ber_common: float
    ber_private: float
    ber_total: float
    se: float
    channel_nmse: float
    frames: int
    wall_time: float = 0.0
    se_stderr: float = 0.0
    ber_total_stderr: float = 0.0
    diagnostics: str = ""

    def row(self) -> dict:
        return {
            "snr_db": self.snr_db, "ber_common": self.ber_common,
            "ber_private": self.ber_private, "ber_total": self.ber_total,
            "se": self.se, "channel_nmse": self.channel_nmse,
            "frames": self.frames,
        }


def measure_ber(tx_bits: np.ndarray, rx_bits: np.ndarray) -> float:
    tx = np.asarray(tx_bits).reshape(-1)
    rx = np.asarray(rx_bits).reshape(-1)
    if tx.size != rx.size:
        raise InvalidLength(f"bit streams differ in length: {tx.size} vs {rx.size}")
    if tx.size == 0:
        return 0.0
    return float(np.mean(tx != rx))


def measure_se(stream_stats, frames: int, n: int, cap_db: float = 30.0) -> float:
    """EVM-based spectral efficiency.

    ``stream_stats`` holds (error energy, resource-element count) per
    stream, accumulated over ``frames`` frames of unit-energy symbols.
    Each stream contributes count/frames REs at log2(1 + SINR) with its
    measured SINR capped at ``cap_db``; pilot and guard carry nothing.
    """
    cap = 10.0 ** (cap_db / 10.0)
    se = 0.0
    for err_energy, count in stream_stats:
        if count == 0:
            continue
        sinr = cap if err_energy <= count / cap else count / err_energy
        se += (count / frames) * np.log2(1.0 + min(sinr, cap))
    return se / n


def resolve_estimator(sim: SimConfig) -> str:
    if sim.estimator != "auto":
        return sim.estimator
    spec = ChannelSpec(sim.taps)
    if spec.has_doppler:
        return "affine"
    return "freq" if sim.frame.approach is Approach.CLEAN_PILOT else "affine"


def _estimate(sim: SimConfig, rx: Frame, spec: ChannelSpec,
              kind: str) -> ChannelEstimate:
    cfg = sim.frame
    if kind == "perfect-freq":
        return perfect_estimate(spec, cfg, Domain.FREQUENCY)
    if kind == "perfect-affine":
        return perfect_estimate(spec, cfg, Domain.AFFINE)
    y_freq, y_aff = extract_received_planes(rx, cfg)
    if kind == "freq":
        l_bound = min(spec.max_delay, cfg.affine.m - 1)
        return estimate_channel_freq(y_freq, cfg, max_delay=l_bound)
    if kind == "affine":
        c1p, g = cfg.affine.c1_prime, cfg.guard
        # receiver prior: search only the design span it can resolve
        l_bound = min(spec.max_delay, g // c1p) if c1p <= g else 0
        k_bound = min(spec.max_doppler, c1p - 1)
        return estimate_channel_affine(
            y_aff, cfg, doppler_enabled=True, max_delay=l_bound,
            max_doppler=k_bound, noise_var=spec.noise_var, strict=False)
    raise ConfigError(f"unknown estimator {kind!r}")


_N_FIELDS = 13


def _run_frame(sim: SimConfig, point: int, frame_idx: int, noise_var: float,
               estimator: str) -> np.ndarray:
    rng = frame_rng(sim.seed, point, frame_idx)
    out = np.zeros(_N_FIELDS)
    spec = ChannelSpec(sim.taps, noise_var)
    cfg = sim.frame

    if sim.baseline:
        bcfg = BaselineConfig(cfg.n, cfg.phi1, cfg.phi2, cfg.cp_len, cfg.constellation)
        r = run_baseline_frame(bcfg, spec, rng)
        se_frame = measure_se([(r.common_err_energy, cfg.n),
                               (r.private_err_energy, cfg.n)], 1, cfg.n, sim.se_cap_db)
        total_bits = r.n_bits_common + r.n_bits_private
        out[:] = (r.common_bit_errors, r.n_bits_common, r.private_bit_errors,
                  r.n_bits_private, r.common_err_energy, 0.0, r.private_err_energy,
                  cfg.n, 0, cfg.n, 0.0, se_frame,
                  (r.common_bit_errors + r.private_bit_errors) / total_bits)
        return out

    r1, r2 = required_bits_per_user(cfg)
    msgs = split_messages(random_bits(rng, r1), random_bits(rng, r2), cfg)
    user = 1 + (frame_idx % 2)
    tx = build_frame(msgs, cfg, user=user)
    rx = apply_channel(tx, spec, rng)
    est = _estimate(sim, rx, spec, estimator)
    det = detect_streams(rx, cfg, est, sim.mode, noise_var)

    c = capacity_counts(cfg)
    tx_common = modulate_bits(msgs.common_bits, cfg.constellation)
    pbits = msgs.private_bits_user1 if user == 1 else msgs.private_bits_user2
    tx_private = modulate_bits(pbits, cfg.constellation)

    err_com = float(np.sum(np.abs(det.common_syms - tx_common[:c.n_common]) ** 2))
    err_ext = float(np.sum(np.abs(det.extra_syms - tx_common[c.n_common:]) ** 2))
    err_priv = float(np.sum(np.abs(det.private_syms - tx_private) ** 2))

    ec = int(np.sum(det.common_bits != msgs.common_bits))
    ep = int(np.sum(det.private_bits != pbits))
    bc, bp = msgs.common_bits.size, pbits.size
    nmse = estimate_nmse(est, ChannelSpec(sim.taps), cfg.n)
    se_frame = measure_se([(err_com, c.n_common), (err_ext, c.n_extra),
                           (err_priv, c.n_private)], 1, cfg.n, sim.se_cap_db)
    out[:] = (ec, bc, ep, bp, err_com, err_ext, err_priv,
              c.n_common, c.n_extra, c.n_private, nmse, se_frame,
              (ec + ep) / max(bc + bp, 1))
    return out


def _run_chunk(args) -> np.ndarray:
    sim, point, start, stop, noise_var, estimator = args
    rows = np.empty((stop - start, _N_FIELDS))
    for i, f in enumerate(range(start, stop)):
        rows[i] = _run_frame(sim, point, f, noise_var, estimator)
    return rows


def run_point(sim: SimConfig, point: int, snr_db: float,
              pool: ProcessPoolExecutor | None = None) -> LinkResult:
    cfg = sim.frame
    budget = baseline_budget(BaselineConfig(cfg.n, cfg.phi1, cfg.phi2)) \
        if sim.baseline else frame_energy_budget(cfg)
    if sim.zero_noise:
        noise_var = 0.0
    elif sim.noise_override is not None:
        noise_var = sim.noise_override
    else:
        noise_var = snr_to_noise_var(snr_db, budget / cfg.n)
    estimator = resolve_estimator(sim)

    t0 = time.perf_counter()
    frames = sim.frames_per_point
    if pool is None or sim.workers <= 1:
        rows = _run_chunk((sim, point, 0, frames, noise_var, estimator))
    else:
        bounds = np.linspace(0, frames, sim.workers + 1).astype(int)
        tasks = [(sim, point, int(a), int(b), noise_var, estimator)
                 for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        rows = np.concatenate(list(pool.map(_run_chunk, tasks)), axis=0)
    wall = time.perf_counter() - t0

    s = rows.sum(axis=0)
    ec, bc, ep, bp = s[0], s[1], s[2], s[3]
    stream_stats = [(s[4], int(s[7])), (s[5], int(s[8])), (s[6], int(s[9]))]
    se = measure_se(stream_stats, frames, cfg.n, sim.se_cap_db)
    se_frames = rows[:, 11]
    ber_frames = rows[:, 12]
    return LinkResult(
        snr_db=float(snr_db),
        ber_common=float(ec / bc) if bc else 0.0,
        ber_private=float(ep / bp) if bp else 0.0,
        ber_total=float((ec + ep) / (bc + bp)) if (bc + bp) else 0.0,
        se=float(se),
        channel_nmse=float(s[10] / frames),
        frames=frames,
        wall_time=wall,
        se_stderr=float(np.std(se_frames) / np.sqrt(frames)),
        ber_total_stderr=float(np.std(ber_frames) / np.sqrt(frames)),
    )


def run_sweep(sim: SimConfig) -> list[LinkResult]:
    """One LinkResult per SNR point; a point that raises is recorded as a
    diagnostic row instead of aborting the sweep."""
    results = []
    pool = None
    try:
        if sim.workers > 1:
            pool = ProcessPoolExecutor(max_workers=sim.workers)
        for point, snr in enumerate(sim.snr_grid_db):
            try:
                results.append(run_point(sim, point, snr, pool))
            except (SimulationError, np.linalg.LinAlgError) as exc:
                results.append(LinkResult(float(snr), float("nan"), float("nan"),
                                          float("nan"), float("nan"), float("nan"),
                                          0, diagnostics=f"{type(exc).__name__}: {exc}"))
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.10g}"


def render_csv(results, extra_key: str | None = None) -> str:
    cols = ((extra_key,) if extra_key else ()) + CSV_COLUMNS
    lines = [",".join(cols)]
    for item in results:
        if extra_key:
            label, res = item
            lines.append(",".join([str(label)] + [_fmt(res.row()[c]) for c in CSV_COLUMNS]))
        else:
            lines.append(",".join(_fmt(item.row()[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def emit_results(results, fmt: str, path) -> None:
    """Write per-point results; CSV columns are fixed and floats carry 10
    significant digits."""
    fmt = fmt.lower()
    if fmt == "csv":
        text = render_csv(results)
    elif fmt == "json":
        text = json.dumps([r.row() for r in results], indent=2) + "\n"
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as exc:
        raise IOError(f"cannot write results to {path}: {exc}") from exc


def frame_config_from_dict(d: dict) -> FrameConfig:
    try:
        affine = AffineParams(int(d["n"]), int(d["c1_prime"]), float(d.get("c2", 0.0)))
        if "phi_pilot" in d:
            pilot = float(d["phi_pilot"])
        else:
            pilot = 10.0 ** (float(d.get("pilot_power_db", 10.0)) / 10.0)
        cpc = d.get("common_per_class")
        return FrameConfig(
            affine=affine, guard=int(d["guard"]), phi_pilot=pilot,
            phi1=float(d["phi1"]), phi2=float(d["phi2"]),
            approach=Approach(int(d.get("approach", 1))),
            cp_len=int(d.get("cp_len", 0)),
            common_per_class=None if cpc is None else int(cpc),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad frame config: {exc}") from exc


def sim_config_from_dict(d: dict) -> SimConfig:
    try:
        frame = frame_config_from_dict(d["frame"])
        ch = d.get("channel", {})
        taps = tuple(ChannelTap(complex(re, im), int(l), int(k))
                     for re, im, l, k in ch.get("taps", [[1.0, 0.0, 0, 0]]))
        if ch.get("normalize", False):
            taps = ChannelSpec(taps, normalize=True).taps
        sw = d.get("sweep", {})
        mode = ReceiverMode(sw.get("mode", "sicfree"))
        nv = ch.get("noise_var")
        return SimConfig(
            frame=frame, taps=taps,
            snr_grid_db=tuple(sw.get("snr_db", [0, 5, 10, 15, 20, 25])),
            frames_per_point=int(sw.get("frames_per_point", 100)),
            mode=mode, estimator=sw.get("estimator", "auto"),
            seed=int(sw.get("seed", 1)), workers=int(sw.get("workers", 1)),
            se_cap_db=float(sw.get("se_cap_db", 30.0)),
            baseline=bool(sw.get("baseline", False)),
            zero_noise=bool(sw.get("zero_noise", False)),
            noise_override=None if nv is None else float(nv),
        )
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad simulation config: {exc}") from exc


def load_config(path) -> tuple[SimConfig, dict]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    return sim_config_from_dict(raw), raw.get("output", {})
