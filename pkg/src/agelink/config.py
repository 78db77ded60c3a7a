"""Configuration objects and JSON parsing for the CLI.

All unit conversions happen here, once: ``avg_snr_db`` becomes a linear
power ratio, and a ``speed_mps``/``carrier_hz`` pair becomes a Doppler
frequency.  Everything downstream works in linear units.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .aoi import AoiParams
from .channel import FadingParams, RateThreshold
from .energy import PowerProfile
from .pep import PacketParams
from .simkit import SimConfig

SPEED_OF_LIGHT_MPS = 299_792_458.0


class ConfigError(ValueError):
    """Invalid configuration; `field` names the offending JSON path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class LinkConfig:
    """Physical-layer description of one status-update link."""

    n_antennas: int
    rician_k: float
    avg_snr: float          # linear per-branch average SNR
    doppler_hz: float
    t_packet_s: float
    rate_bps_hz: float

    @property
    def gamma_th(self) -> float:
        return RateThreshold.from_rate(self.rate_bps_hz).gamma_th

    def fading_params(self) -> FadingParams:
        return FadingParams(
            n_antennas=self.n_antennas,
            rician_k=self.rician_k,
            avg_snr=self.avg_snr,
            doppler_hz=self.doppler_hz,
        )

    def packet_params(self) -> PacketParams:
        return PacketParams(t_packet_s=self.t_packet_s)


@dataclass(frozen=True)
class ProtocolConfig:
    """Stop-and-wait retransmission policy and cost curvature."""

    max_tx: int | None      # None = retransmit until delivered
    a: float

    def aoi_params(self, t_packet_s: float) -> AoiParams:
        return AoiParams(a=self.a, t_packet_s=t_packet_s, max_tx=self.max_tx)


def _section(doc: dict, key: str) -> dict:
    if key not in doc:
        raise ConfigError(key, "missing section")
    sec = doc[key]
    if not isinstance(sec, dict):
        raise ConfigError(key, "must be an object")
    return sec


def _num(sec: dict, path: str, key: str, *, minimum: float | None = None,
         exclusive: bool = False, default: float | None = None) -> float:
    field = f"{path}.{key}"
    if key not in sec:
        if default is not None:
            return default
        raise ConfigError(field, "missing required field")
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(field, f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(field, "must be finite")
    if minimum is not None:
        if exclusive and v <= minimum:
            raise ConfigError(field, f"must be > {minimum}")
        if not exclusive and v < minimum:
            raise ConfigError(field, f"must be >= {minimum}")
    return v


def _int(sec: dict, path: str, key: str, *, minimum: int,
         default: int | None = None) -> int:
    field = f"{path}.{key}"
    if key not in sec:
        if default is not None:
            return default
        raise ConfigError(field, "missing required field")
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(field, f"expected an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(field, f"must be >= {minimum}")
    return v


def _doppler(sec: dict, path: str) -> float:
    has_direct = "doppler_hz" in sec
    has_mobile = "speed_mps" in sec or "carrier_hz" in sec
    if has_direct and has_mobile:
        raise ConfigError(f"{path}.doppler_hz",
                          "give either doppler_hz or speed_mps+carrier_hz, not both")
    if has_direct:
        return _num(sec, path, "doppler_hz", minimum=0.0)
    if has_mobile:
        speed = _num(sec, path, "speed_mps", minimum=0.0)
        carrier = _num(sec, path, "carrier_hz", minimum=0.0, exclusive=True)
        return speed * carrier / SPEED_OF_LIGHT_MPS
    return 0.0


def parse_link(doc: dict) -> LinkConfig:
    sec = _section(doc, "link")
    n = _int(sec, "link", "n_antennas", minimum=1)
    k = _num(sec, "link", "rician_k", minimum=0.0, default=0.0)
    snr_db = _num(sec, "link", "avg_snr_db")
    tp = _num(sec, "link", "t_packet_s", minimum=0.0, exclusive=True)
    rate = _num(sec, "link", "rate_bps_hz", minimum=0.0, exclusive=True)
    return LinkConfig(
        n_antennas=n,
        rician_k=k,
        avg_snr=10.0 ** (snr_db / 10.0),
        doppler_hz=_doppler(sec, "link"),
        t_packet_s=tp,
        rate_bps_hz=rate,
    )


def parse_protocol(doc: dict) -> ProtocolConfig:
    sec = _section(doc, "protocol")
    field = "protocol.max_tx"
    if "max_tx" not in sec:
        raise ConfigError(field, "missing required field")
    raw = sec["max_tx"]
    max_tx: int | None
    if raw is None or raw == "unbounded":
        max_tx = None
    elif isinstance(raw, int) and not isinstance(raw, bool):
        if raw < 1:
            raise ConfigError(field, "must be >= 1")
        max_tx = raw
    else:
        raise ConfigError(field, f'expected positive integer, "unbounded" or null, got {raw!r}')
    a = _num(sec, "protocol", "a")
    return ProtocolConfig(max_tx=max_tx, a=a)


def parse_power(doc: dict) -> PowerProfile:
    sec = _section(doc, "power")
    return PowerProfile(
        p_sense_w=_num(sec, "power", "p_sense_w", minimum=0.0, exclusive=True),
        p_tx_w=_num(sec, "power", "p_tx_w", minimum=0.0, exclusive=True),
        p_rx_w=_num(sec, "power", "p_rx_w", minimum=0.0, exclusive=True),
    )


def parse_sim(doc: dict, seed: int) -> SimConfig:
    """Build a SimConfig from the optional "sim" section; `seed` wins over
    any seed recorded in the file so the CLI flag stays authoritative."""
    sec = doc.get("sim", {})
    if not isinstance(sec, dict):
        raise ConfigError("sim", "must be an object")
    n_packets = None
    if "n_packets" in sec:
        n_packets = _int(sec, "sim", "n_packets", minimum=1)
    duration = None
    if "sim_duration_s" in sec:
        duration = _num(sec, "sim", "sim_duration_s", minimum=0.0, exclusive=True)
    step = None
    if "time_step_s" in sec:
        step = _num(sec, "sim", "time_step_s", minimum=0.0, exclusive=True)
    try:
        return SimConfig(
            seed=seed,
            n_packets=n_packets,
            sim_duration_s=duration,
            replication_count=_int(sec, "sim", "replication_count", minimum=2, default=10),
            time_step_s=step,
            n_sinusoids=_int(sec, "sim", "n_sinusoids", minimum=32, default=64),
        )
    except ValueError as exc:
        raise ConfigError("sim", str(exc)) from exc


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("<file>", "top level must be an object")
    return doc
