"""Single-operating-point metric evaluation.

Chains threshold -> packet error probability -> age and energy metrics and
collects regime notes (clamping, linear-cost branch, divergence) so the CLI
can surface why a number looks the way it does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .aoi import DivergenceError, avg_aoi, avg_paoi, uses_linear_branch
from .channel import RateThreshold
from .config import LinkConfig, ProtocolConfig
from .energy import PowerProfile, energy_efficiency
from .pep import pep_result

METRIC_FIELDS = ("p", "avg_aoi", "avg_paoi", "ee", "eta", "eta_p")


@dataclass(frozen=True)
class MetricsReport:
    p: float
    avg_aoi: float
    avg_paoi: float
    ee: float
    eta: float
    eta_p: float
    regime_notes: tuple[str, ...] = field(default=())

    @property
    def divergent(self) -> bool:
        return not all(
            math.isfinite(getattr(self, name)) for name in METRIC_FIELDS
        )

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in METRIC_FIELDS}
        out["divergent"] = self.divergent
        out["regime_notes"] = list(self.regime_notes)
        return out


def compute_report(link: LinkConfig, protocol: ProtocolConfig,
                   power: PowerProfile) -> MetricsReport:
    threshold = RateThreshold.from_rate(link.rate_bps_hz)
    pr = pep_result(link.fading_params(), link.packet_params(), threshold.gamma_th)
    p = pr.value
    params = protocol.aoi_params(link.t_packet_s)

    notes: list[str] = []
    if pr.saturated:
        notes.append("packet error probability saturated at 1: the channel "
                     "cannot stay above threshold for a whole packet")
    elif pr.clamped:
        notes.append("packet error probability clamped into [0, 1]")

    aoi_value = avg_aoi(p, params)
    paoi_value = avg_paoi(p, params)

    if p < 1.0 and uses_linear_branch(p, params):
        notes.append("cost evaluated on the linear branch (|a| negligible "
                     "at this operating point)")
    if not math.isfinite(aoi_value):
        if p >= 1.0:
            notes.append("age diverges: no packet is ever delivered (p = 1)")
        else:
            q = p * math.exp(protocol.a * link.t_packet_s)
            notes.append(f"average cost diverges: p*exp(a*T_p) = {q:.6g} >= 1")

    try:
        ee = energy_efficiency(link.rate_bps_hz, p, protocol.max_tx,
                               link.n_antennas, power)
    except DivergenceError:
        ee = math.nan
        notes.append("energy per update diverges (p = 1)")

    if math.isfinite(ee) and math.isfinite(aoi_value):
        eta_value = aoi_value / ee
    else:
        eta_value = math.inf
    if math.isfinite(ee) and math.isfinite(paoi_value):
        eta_p_value = paoi_value / ee
    else:
        eta_p_value = math.inf

    return MetricsReport(
        p=p,
        avg_aoi=aoi_value,
        avg_paoi=paoi_value,
        ee=ee,
        eta=eta_value,
        eta_p=eta_p_value,
        regime_notes=tuple(notes),
    )
