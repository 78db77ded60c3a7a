"""Monte-Carlo oracles for the closed-form link metrics.

Two independent simulators, deliberately built from nothing but the system
description so they can referee the analytics:

* simulate_packet_process: slot-level renewal simulation.  Each slot is an
  independent Bernoulli(1-p) attempt; a packet is abandoned after max_tx
  failures and replaced by a fresh one while the age keeps growing.  Per
  delivery cycle the exact area under cost(age) is accumulated from the
  closed antiderivative, along with the cycle peak, so the only estimation
  error is statistical.

* simulate_fading_process: sum-of-sinusoids Rician fading time series per
  branch (isotropic arrival angles for the diffuse part, a fixed-phase
  specular component that contributes no envelope dynamics), MRC-combined
  into gamma(t) = avg_snr * sum |h_i|^2.  Estimates the outage CDF as the
  fraction of time below the threshold, the level-crossing rate from
  down-crossing counts, and the packet error probability as the fraction of
  consecutive T_p windows containing a dip.  With doppler_hz = 0 the channel
  is block fading: every window draws an independent channel and the PEP
  estimate collapses onto the empirical CDF.

Replications run on independent child streams spawned from the master seed
(numpy SeedSequence), are merged in replication order, and report the
replication-level standard error, so results are byte-identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .aoi import AoiParams, uses_linear_branch
from .channel import FadingParams
from .pep import PacketParams

__all__ = [
    "SimConfig",
    "SimResult",
    "PacketSimOutput",
    "FadingSimOutput",
    "simulate_packet_process",
    "simulate_fading_process",
]

# warm-up discarded from the fading series, in units of 1/f_D
_WARMUP_COHERENCE_SPANS = 100.0
# default sampling floor for the static (f_D = 0) channel
_STATIC_TIME_STEP_S = 1e-3


@dataclass(frozen=True)
class SimConfig:
    """Run sizing shared by both simulators.

    n_packets sizes the packet oracle (successful deliveries per
    replication); sim_duration_s sizes the fading oracle (seconds of series
    per replication).  time_step_s must satisfy time_step_s <= 1/(64 f_D);
    leave it None to get exactly that, or the static floor when f_D = 0.
    """

    seed: int
    n_packets: int | None = None
    sim_duration_s: float | None = None
    replication_count: int = 10
    time_step_s: float | None = None
    n_sinusoids: int = 64

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.n_packets is not None and self.n_packets < 1:
            raise ValueError(f"n_packets must be >= 1, got {self.n_packets}")
        if self.sim_duration_s is not None and self.sim_duration_s <= 0:
            raise ValueError(f"sim_duration_s must be > 0, got {self.sim_duration_s}")
        if self.replication_count < 2:
            raise ValueError(
                f"replication_count must be >= 2 for a standard error, got {self.replication_count}"
            )
        if self.time_step_s is not None and self.time_step_s <= 0:
            raise ValueError(f"time_step_s must be > 0, got {self.time_step_s}")
        if self.n_sinusoids < 32:
            raise ValueError(f"n_sinusoids must be >= 32, got {self.n_sinusoids}")


@dataclass(frozen=True)
class SimResult:
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    divergence_detected: bool = False


class PacketSimOutput(NamedTuple):
    avg_aoi: SimResult
    avg_paoi: SimResult
    exp_y: SimResult
    exp_z: SimResult


class FadingSimOutput(NamedTuple):
    snr_cdf: SimResult
    lcr: SimResult
    pep: SimResult


def _spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _map_replications(fn, rngs, workers: int):
    if workers <= 1:
        return [fn(rng) for rng in rngs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, rngs))


def _merge(per_rep: np.ndarray, n_samples: int, seed: int, divergent: bool) -> SimResult:
    est = float(np.mean(per_rep))
    se = float(np.std(per_rep, ddof=1) / math.sqrt(per_rep.size))
    return SimResult(est, se, n_samples, seed, divergent)


# ----------------------------------------------------------------------
# packet-level renewal oracle
# ----------------------------------------------------------------------

def _draw_success_gaps(rng: np.random.Generator, p: float, n_success: int) -> np.ndarray:
    """Per-slot Bernoulli(1-p) draws until n_success successes; returns gaps Y."""
    positions: list[np.ndarray] = []
    collected = 0
    offset = 0
    block = max(4096, int(n_success / max(1.0 - p, 1e-12) * 1.1))
    while collected < n_success:
        hits = np.flatnonzero(rng.random(block) < (1.0 - p)) + offset
        positions.append(hits)
        collected += hits.size
        offset += block
    idx = np.concatenate(positions)[:n_success]
    y = np.empty(n_success, dtype=np.int64)
    y[0] = idx[0] + 1
    np.subtract(idx[1:], idx[:-1], out=y[1:])
    return y


def simulate_packet_process(
    p: float,
    params: AoiParams,
    cfg: SimConfig,
    workers: int = 1,
) -> PacketSimOutput:
    """Renewal estimates of (avg_aoi, avg_paoi, exp_y, exp_z).

    Draws cfg.n_packets delivery cycles per replication.  The per-cycle area
    uses the antiderivative of cost() on each sawtooth segment, with the same
    small-|a| linear routing as the closed forms so neither route drowns in
    cancellation noise.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must be in [0, 1) to simulate deliveries, got {p}")
    if cfg.n_packets is None:
        raise ValueError("SimConfig.n_packets is required for the packet oracle")
    a, tp, m = params.a, params.t_packet_s, params.max_tx
    linear = uses_linear_branch(p, params)
    analytic_divergence = (
        not linear and a > 0.0 and p * math.exp(a * tp) >= 1.0
    )

    def one_rep(rng: np.random.Generator) -> tuple[float, float, float, float, bool]:
        y = _draw_success_gaps(rng, p, cfg.n_packets)
        z = y if m is None else ((y - 1) % m) + 1
        z_prev = z[:-1]
        y_cur = y[1:]
        z_cur = z[1:]
        age_peak = z_prev + y_cur
        if linear:
            areas = tp * tp * (age_peak.astype(float) ** 2 - z_cur.astype(float) ** 2) / 2.0
            peaks = tp * age_peak
        else:
            with np.errstate(over="ignore"):
                e_peak = np.exp(a * tp * age_peak)
                areas = (e_peak - np.exp(a * tp * z_cur)) / (a * a) - tp * (
                    age_peak - z_cur
                ) / a
                peaks = np.expm1(a * tp * age_peak) / a
        c_bar = float(areas.sum() / (tp * y_cur.sum()))
        c_peak = float(peaks.mean())
        bad = not (math.isfinite(c_bar) and math.isfinite(c_peak))
        return c_bar, c_peak, float(y.mean()), float(z.mean()), bad

    rngs = _spawn_rngs(cfg.seed, cfg.replication_count)
    rows = _map_replications(one_rep, rngs, workers)
    table = np.array([r[:4] for r in rows])
    divergent = analytic_divergence or any(r[4] for r in rows)
    n_total = cfg.n_packets * cfg.replication_count
    return PacketSimOutput(
        avg_aoi=_merge(table[:, 0], n_total, cfg.seed, divergent),
        avg_paoi=_merge(table[:, 1], n_total, cfg.seed, divergent),
        exp_y=_merge(table[:, 2], n_total, cfg.seed, False),
        exp_z=_merge(table[:, 3], n_total, cfg.seed, False),
    )


# ----------------------------------------------------------------------
# channel-level fading oracle
# ----------------------------------------------------------------------

class _BranchState(NamedTuple):
    omega: np.ndarray      # per-sinusoid angular Doppler, rad/s
    phase: np.ndarray      # per-sinusoid phase offset
    los_re: float
    los_im: float
    diffuse_scale: float


def _draw_branch(rng: np.random.Generator, k: float, fd: float, n_sin: int) -> _BranchState:
    aoa = rng.uniform(0.0, 2.0 * math.pi, size=n_sin)
    phase = rng.uniform(0.0, 2.0 * math.pi, size=n_sin)
    los_phase = rng.uniform(0.0, 2.0 * math.pi)
    amp = math.sqrt(k / (k + 1.0))
    return _BranchState(
        omega=2.0 * math.pi * fd * np.cos(aoa),
        phase=phase,
        los_re=amp * math.cos(los_phase),
        los_im=amp * math.sin(los_phase),
        diffuse_scale=math.sqrt(1.0 / ((k + 1.0) * n_sin)),
    )


def _branch_power(state: _BranchState, t: np.ndarray) -> np.ndarray:
    re = np.full(t.size, state.los_re)
    im = np.full(t.size, state.los_im)
    for omega, phase in zip(state.omega, state.phase):
        arg = omega * t + phase
        re += state.diffuse_scale * np.cos(arg)
        im += state.diffuse_scale * np.sin(arg)
    return re * re + im * im


def _resolve_time_step(cfg: SimConfig, fd: float) -> float:
    if fd == 0.0:
        return cfg.time_step_s if cfg.time_step_s is not None else _STATIC_TIME_STEP_S
    limit = 1.0 / (64.0 * fd)
    dt = cfg.time_step_s if cfg.time_step_s is not None else limit
    if dt > limit * (1.0 + 1e-12):
        raise ValueError(
            f"time_step_s={dt} too coarse for doppler_hz={fd}; need <= {limit}"
        )
    return dt


def simulate_fading_process(
    fp: FadingParams,
    pp: PacketParams,
    gamma_th: float,
    cfg: SimConfig,
    workers: int = 1,
) -> FadingSimOutput:
    """Time-series estimates of (snr_cdf, lcr, pep) at gamma_th.

    Each replication generates cfg.sim_duration_s seconds of MRC SNR (after a
    discarded warm-up of 100/f_D), trimmed to whole T_p windows.  Fresh
    sinusoid angles per replication keep the ensemble spectrum on the
    isotropic-scattering model rather than any single discretization.
    """
    if gamma_th <= 0:
        raise ValueError(f"gamma_th must be > 0, got {gamma_th}")
    if cfg.sim_duration_s is None:
        raise ValueError("SimConfig.sim_duration_s is required for the fading oracle")
    fd = fp.doppler_hz
    dt = _resolve_time_step(cfg, fd)
    if fd == 0.0:
        return _simulate_static(fp, pp, gamma_th, cfg, workers)

    window = max(1, int(round(pp.t_packet_s / dt)))
    n_windows = int(cfg.sim_duration_s / (window * dt))
    if n_windows < 1:
        raise ValueError(
            f"sim_duration_s={cfg.sim_duration_s} shorter than one packet window"
        )
    n_samples = n_windows * window
    t_start = _WARMUP_COHERENCE_SPANS / fd
    chunk_windows = max(1, 262_144 // window)

    def one_rep(rng: np.random.Generator) -> tuple[float, float, float]:
        branches = [
            _draw_branch(rng, fp.rician_k, fd, cfg.n_sinusoids)
            for _ in range(fp.n_antennas)
        ]
        below = 0
        crossings = 0
        dipped = 0
        prev_above = None
        done = 0
        while done < n_windows:
            take = min(chunk_windows, n_windows - done)
            t = t_start + (done * window + np.arange(take * window)) * dt
            gamma = np.zeros(t.size)
            for st in branches:
                gamma += _branch_power(st, t)
            gamma *= fp.avg_snr
            above = gamma >= gamma_th
            below += int(t.size - np.count_nonzero(above))
            crossings += int(np.count_nonzero(above[:-1] & ~above[1:]))
            if prev_above is not None and prev_above and not above[0]:
                crossings += 1
            prev_above = bool(above[-1])
            dipped += int(np.count_nonzero((~above).reshape(take, window).any(axis=1)))
            done += take
        duration = n_samples * dt
        return below / n_samples, crossings / duration, dipped / n_windows

    rngs = _spawn_rngs(cfg.seed, cfg.replication_count)
    rows = np.array(_map_replications(one_rep, rngs, workers))
    total = n_samples * cfg.replication_count
    return FadingSimOutput(
        snr_cdf=_merge(rows[:, 0], total, cfg.seed, False),
        lcr=_merge(rows[:, 1], total, cfg.seed, False),
        pep=_merge(rows[:, 2], total, cfg.seed, False),
    )


def _simulate_static(
    fp: FadingParams,
    pp: PacketParams,
    gamma_th: float,
    cfg: SimConfig,
    workers: int,
) -> FadingSimOutput:
    """Block-fading limit: independent channel per packet window, no crossings."""
    n_draws = max(1, int(cfg.sim_duration_s / pp.t_packet_s))
    n_sin = cfg.n_sinusoids
    amp = math.sqrt(fp.rician_k / (fp.rician_k + 1.0))
    scale = math.sqrt(1.0 / ((fp.rician_k + 1.0) * n_sin))

    def one_rep(rng: np.random.Generator) -> tuple[float, float, float]:
        below = 0
        done = 0
        while done < n_draws:
            take = min(65_536, n_draws - done)
            gamma = np.zeros(take)
            for _ in range(fp.n_antennas):
                phases = rng.uniform(0.0, 2.0 * math.pi, size=(take, n_sin))
                los = rng.uniform(0.0, 2.0 * math.pi, size=take)
                re = scale * np.cos(phases).sum(axis=1) + amp * np.cos(los)
                im = scale * np.sin(phases).sum(axis=1) + amp * np.sin(los)
                gamma += re * re + im * im
            gamma *= fp.avg_snr
            below += int(np.count_nonzero(gamma < gamma_th))
            done += take
        frac = below / n_draws
        return frac, 0.0, frac

    rngs = _spawn_rngs(cfg.seed, cfg.replication_count)
    rows = np.array(_map_replications(one_rep, rngs, workers))
    total = n_draws * cfg.replication_count
    return FadingSimOutput(
        snr_cdf=_merge(rows[:, 0], total, cfg.seed, False),
        lcr=_merge(rows[:, 1], total, cfg.seed, False),
        pep=_merge(rows[:, 2], total, cfg.seed, False),
    )
