"""Closed-form SNR statistics of an N-branch MRC receiver in Rician fading.

The combined SNR is gamma = avg_snr * sum_i |h_i|^2 over independent
unit-mean-power Rician branches with factor K, so avg_snr is the per-branch
average SNR and E[gamma] = N * avg_snr.  Exposed here:

* snr_cdf / snr_sf     outage CDF and its complement (Marcum-Q form),
* lcr                  level-crossing rate of gamma(t) at maximum Doppler f_D,
* snr_cdf_massive_n    large-N Rayleigh lower-tail approximation.

A branch count of 1 with K = 0 collapses everything to the classical
single-antenna Rayleigh expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .specfun import (
    DEFAULT_TOLERANCE,
    Tolerance,
    bessel_i_log,
    marcum_q,
    reg_gamma_p,
    _reg_gamma_q,
)

__all__ = [
    "RAYLEIGH_K_CUTOFF",
    "FadingParams",
    "RateThreshold",
    "snr_cdf",
    "snr_sf",
    "lcr",
    "snr_cdf_massive_n",
]

# below this the Rician K is treated as exactly zero (Rayleigh branch)
RAYLEIGH_K_CUTOFF = 1e-12

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FadingParams:
    """Physical layer state: antennas, Rician K, per-branch SNR, mobility."""

    n_antennas: int
    rician_k: float
    avg_snr: float          # linear scale, per branch
    doppler_hz: float = 0.0

    def __post_init__(self):
        if self.n_antennas < 1 or self.n_antennas != int(self.n_antennas):
            raise ValueError(f"n_antennas must be a positive integer, got {self.n_antennas}")
        if self.rician_k < 0:
            raise ValueError(f"rician_k must be >= 0, got {self.rician_k}")
        if self.avg_snr <= 0:
            raise ValueError(f"avg_snr must be > 0, got {self.avg_snr}")
        if self.doppler_hz < 0:
            raise ValueError(f"doppler_hz must be >= 0, got {self.doppler_hz}")


@dataclass(frozen=True)
class RateThreshold:
    """Attempted rate and the SNR threshold it implies, gamma_th = 2^R - 1."""

    rate_bps_hz: float
    gamma_th: float

    def __post_init__(self):
        if self.rate_bps_hz <= 0:
            raise ValueError(f"rate_bps_hz must be > 0, got {self.rate_bps_hz}")
        expected = 2.0 ** self.rate_bps_hz - 1.0
        if self.gamma_th != expected:
            raise ValueError(
                f"gamma_th {self.gamma_th} does not match 2^rate - 1 = {expected}"
            )

    @classmethod
    def from_rate(cls, rate_bps_hz: float) -> "RateThreshold":
        return cls(rate_bps_hz=rate_bps_hz, gamma_th=2.0 ** rate_bps_hz - 1.0)


def snr_sf(fp: FadingParams, gamma_th: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Survival P[gamma > gamma_th]; the Marcum-Q side of the outage CDF.

    Computed directly (never as 1 - CDF) so the deep upper tail keeps
    relative accuracy; the packet-error model divides by this.
    """
    if gamma_th < 0:
        raise ValueError(f"gamma_th must be >= 0, got {gamma_th}")
    if gamma_th == 0.0:
        return 1.0
    n = fp.n_antennas
    if fp.rician_k < RAYLEIGH_K_CUTOFF:
        return _reg_gamma_q(n, gamma_th / fp.avg_snr, tol)
    a = math.sqrt(2.0 * n * fp.rician_k)
    b = math.sqrt(2.0 * gamma_th * (fp.rician_k + 1.0) / fp.avg_snr)
    return marcum_q(n, a, b, tol)


def snr_cdf(fp: FadingParams, gamma_th: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Outage CDF F[gamma <= gamma_th] = 1 - Q_N(sqrt(2NK), sqrt(2 gamma_th (K+1)/avg_snr)).

    The Rayleigh branch (K below RAYLEIGH_K_CUTOFF) goes through the Erlang
    CDF P(N, gamma_th/avg_snr), which stays relatively accurate deep in the
    lower tail where 1 - Q would cancel to zero.
    """
    if gamma_th < 0:
        raise ValueError(f"gamma_th must be >= 0, got {gamma_th}")
    if gamma_th == 0.0:
        return 0.0
    if fp.rician_k < RAYLEIGH_K_CUTOFF:
        return reg_gamma_p(fp.n_antennas, gamma_th / fp.avg_snr, tol)
    return min(1.0, max(0.0, 1.0 - snr_sf(fp, gamma_th, tol)))


def lcr(fp: FadingParams, gamma_th: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Downward level-crossing rate of gamma(t) through gamma_th, per second.

    With rho = gamma_th (K+1) / avg_snr:

        lcr = sqrt(2 pi) f_D rho^(N/2) I_{N-1}(2 sqrt(rho N K))
              / (exp(rho + N K) (N K)^((N-1)/2))

    and the K -> 0 limit sqrt(2 pi) f_D rho^(N-1/2) exp(-rho) / (N-1)!.
    Assembled in log space: the Bessel factor grows like exp(2 sqrt(rho N K)),
    which always loses to exp(-rho - N K), so pairing the logs before a single
    final exp avoids both overflow and 0 * inf.
    """
    if gamma_th < 0:
        raise ValueError(f"gamma_th must be >= 0, got {gamma_th}")
    if fp.doppler_hz == 0.0 or gamma_th == 0.0:
        return 0.0
    n = fp.n_antennas
    k = fp.rician_k
    if k < RAYLEIGH_K_CUTOFF:
        rho = gamma_th / fp.avg_snr
        log_val = (n - 0.5) * math.log(rho) - rho - math.lgamma(n)
        return _SQRT_2PI * fp.doppler_hz * math.exp(log_val)
    rho = gamma_th * (k + 1.0) / fp.avg_snr
    nk = n * k
    z = 2.0 * math.sqrt(rho * nk)
    log_val = (
        0.5 * n * math.log(rho)
        + bessel_i_log(n - 1, z, tol)
        - rho
        - nk
        - 0.5 * (n - 1) * math.log(nk)
    )
    return _SQRT_2PI * fp.doppler_hz * math.exp(log_val)


def snr_cdf_massive_n(fp: FadingParams, gamma_th: float) -> float:
    """Large-antenna Rayleigh outage approximation (gamma_th/avg_snr)^N e^(-x) / N!.

    Only defined for K = 0; the lower tail shrinks factorially with N, which
    is the analytical handle on the massive-antenna regime.
    """
    if fp.rician_k >= RAYLEIGH_K_CUTOFF:
        raise ValueError("massive-antenna approximation requires rician_k = 0")
    if gamma_th < 0:
        raise ValueError(f"gamma_th must be >= 0, got {gamma_th}")
    if gamma_th == 0.0:
        return 0.0
    n = fp.n_antennas
    x = gamma_th / fp.avg_snr
    return min(1.0, math.exp(n * math.log(x) - math.lgamma(n + 1.0) - x))
