"""Non-linear age-of-information and energy metrics of a stop-and-wait
wireless status-update link over multi-antenna Rician fading.

Closed forms live in `aoi`, `channel`, `pep` and `energy`; `simkit` holds the
two independent Monte-Carlo oracles that validate them; `sweep` produces grid
tables and minimizes the age/energy ratios; `cli` binds everything to JSON
configuration files.
"""

from .aoi import (
    AoiParams,
    DivergenceError,
    avg_aoi,
    avg_paoi,
    cost,
    exp_y,
    exp_z,
    uses_linear_branch,
    z_pmf,
)
from .channel import (
    FadingParams,
    RateThreshold,
    lcr,
    snr_cdf,
    snr_cdf_massive_n,
    snr_sf,
)
from .config import ConfigError, LinkConfig, ProtocolConfig, load_config
from .energy import PowerProfile, energy_efficiency, eta, eta_p
from .pep import (
    PacketParams,
    PepResult,
    pep,
    pep_result,
    pep_short_packet_approx,
    pep_worst_case,
)
from .report import MetricsReport, compute_report
from .simkit import (
    FadingSimOutput,
    PacketSimOutput,
    SimConfig,
    SimResult,
    simulate_fading_process,
    simulate_packet_process,
)
from .specfun import (
    ConvergenceError,
    Tolerance,
    bessel_i,
    marcum_q,
    reg_gamma_p,
)
from .sweep import (
    NoMinimumError,
    OptimResult,
    SweepRow,
    SweepSpec,
    minimize_eta,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AoiParams",
    "ConfigError",
    "ConvergenceError",
    "DivergenceError",
    "FadingParams",
    "FadingSimOutput",
    "LinkConfig",
    "MetricsReport",
    "NoMinimumError",
    "OptimResult",
    "PacketParams",
    "PacketSimOutput",
    "PepResult",
    "PowerProfile",
    "ProtocolConfig",
    "RateThreshold",
    "SimConfig",
    "SimResult",
    "SweepRow",
    "SweepSpec",
    "Tolerance",
    "avg_aoi",
    "avg_paoi",
    "bessel_i",
    "compute_report",
    "cost",
    "energy_efficiency",
    "eta",
    "eta_p",
    "exp_y",
    "exp_z",
    "lcr",
    "load_config",
    "marcum_q",
    "minimize_eta",
    "pep",
    "pep_result",
    "pep_short_packet_approx",
    "pep_worst_case",
    "reg_gamma_p",
    "run_sweep",
    "simulate_fading_process",
    "simulate_packet_process",
    "snr_cdf",
    "snr_cdf_massive_n",
    "snr_sf",
    "uses_linear_branch",
    "z_pmf",
]
