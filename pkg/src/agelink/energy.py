"""Energy efficiency of the update link and the age-per-efficiency ratios.

Every delivered update costs the sensing power once plus, for each of the
E[Z] attempts actually spent on it, the transmit power and N receiver chains:

    ee = rate / (p_sense + E[Z] * (p_tx + N * p_rx))      [bits/Hz per J/s]

eta = avg_aoi / ee and eta_p = avg_paoi / ee are the quantities the link
designer actually minimizes: cost-of-age bought per unit of efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aoi import exp_z

__all__ = ["PowerProfile", "energy_efficiency", "eta", "eta_p"]


@dataclass(frozen=True)
class PowerProfile:
    """Sensing, transmit and per-chain receive powers, watts."""

    p_sense_w: float
    p_tx_w: float
    p_rx_w: float

    def __post_init__(self):
        for name in ("p_sense_w", "p_tx_w", "p_rx_w"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


def energy_efficiency(
    rate_bps_hz: float,
    p: float,
    max_tx: int | None,
    n_antennas: int,
    powers: PowerProfile,
) -> float:
    """Delivered rate per watt-slot spent, rate / (p_sx + E[Z](p_tx + N p_rx)).

    Raises DivergenceError at p >= 1 (E[Z] has no meaning once nothing is
    ever delivered).
    """
    if rate_bps_hz <= 0:
        raise ValueError(f"rate_bps_hz must be > 0, got {rate_bps_hz}")
    if n_antennas < 1:
        raise ValueError(f"n_antennas must be >= 1, got {n_antennas}")
    ez = exp_z(p, max_tx)
    return rate_bps_hz / (
        powers.p_sense_w + ez * (powers.p_tx_w + n_antennas * powers.p_rx_w)
    )


def eta(avg_aoi_value: float, ee: float) -> float:
    """Age cost per unit energy efficiency; inf passes through divergent AoI."""
    if not ee > 0 or not math.isfinite(ee):
        raise ValueError(f"energy efficiency must be finite and > 0, got {ee}")
    return avg_aoi_value / ee


def eta_p(avg_paoi_value: float, ee: float) -> float:
    """Peak-age cost per unit energy efficiency."""
    return eta(avg_paoi_value, ee)
