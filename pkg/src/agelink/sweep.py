"""Parameter sweeps and 1-D minimization of the age/energy ratios.

The objective has divergence regions (p*e^{a*T_p} >= 1 makes the average
cost infinite) and is non-convex in general, so minimization is a coarse
grid scan followed by golden-section refinement inside the best cell.
Divergent points take the value +inf and participate normally.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .config import ConfigError, LinkConfig, ProtocolConfig, _int, _num, _section
from .energy import PowerProfile
from .report import MetricsReport, compute_report

SWEEP_VARIABLES = ("rate", "snr_db", "max_tx", "n_antennas")
CONTINUOUS_VARIABLES = ("rate", "snr_db")
OUTPUT_FIELDS = ("p", "avg_aoi", "avg_paoi", "ee", "eta", "eta_p")

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class NoMinimumError(ValueError):
    """The objective is divergent on the entire bracket."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple[float, ...]
    link: LinkConfig
    protocol: ProtocolConfig
    power: PowerProfile
    outputs: tuple[str, ...] = OUTPUT_FIELDS
    couple_a_to_p: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"variable must be one of {SWEEP_VARIABLES}")
        grid = tuple(float(v) for v in self.grid)
        if len(grid) < 2:
            raise ValueError("grid needs at least 2 points")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if self.variable in ("max_tx", "n_antennas"):
            if any(v != int(v) or v < 1 for v in grid):
                raise ValueError(f"{self.variable} grid must be positive integers")
        if self.variable == "rate" and grid[0] <= 0.0:
            raise ValueError("rate grid must be positive")
        object.__setattr__(self, "grid", grid)
        unknown = set(self.outputs) - set(OUTPUT_FIELDS)
        if unknown:
            raise ValueError(f"unknown outputs: {sorted(unknown)}")
        if not self.outputs:
            raise ValueError("outputs must not be empty")


@dataclass(frozen=True)
class SweepRow:
    value: float
    p: float
    avg_aoi: float
    avg_paoi: float
    ee: float
    eta: float
    eta_p: float
    divergent: bool


@dataclass(frozen=True)
class OptimResult:
    argmin: float
    min_value: float
    bracket: tuple[float, float]
    evaluations: int


def _apply_variable(variable: str, value: float, link: LinkConfig,
                    protocol: ProtocolConfig) -> tuple[LinkConfig, ProtocolConfig]:
    if variable == "rate":
        return replace(link, rate_bps_hz=value), protocol
    if variable == "snr_db":
        return replace(link, avg_snr=10.0 ** (value / 10.0)), protocol
    if variable == "max_tx":
        return link, replace(protocol, max_tx=int(value))
    return replace(link, n_antennas=int(value)), protocol


def evaluate_point(variable: str, value: float, link: LinkConfig,
                   protocol: ProtocolConfig, power: PowerProfile,
                   couple_a_to_p: bool = False) -> MetricsReport:
    """Evaluate all metrics with `variable` set to `value`; when coupling is
    on, a is tied to the operating point as a = 1 - p before the age math."""
    link, protocol = _apply_variable(variable, value, link, protocol)
    if couple_a_to_p:
        probe = compute_report(link, protocol, power)
        protocol = replace(protocol, a=1.0 - probe.p)
    return compute_report(link, protocol, power)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """One row per grid point, in grid order; divergent points are flagged,
    never dropped.  Output is a pure function of the spec."""

    def one(value: float) -> SweepRow:
        rep = evaluate_point(spec.variable, value, spec.link, spec.protocol,
                             spec.power, spec.couple_a_to_p)
        return SweepRow(
            value=value, p=rep.p, avg_aoi=rep.avg_aoi, avg_paoi=rep.avg_paoi,
            ee=rep.ee, eta=rep.eta, eta_p=rep.eta_p, divergent=rep.divergent,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, spec.grid))
    return [one(v) for v in spec.grid]


def minimize_eta(objective: str, variable: str, bracket: tuple[float, float],
                 link: LinkConfig, protocol: ProtocolConfig, power: PowerProfile,
                 coarse_points: int = 64, couple_a_to_p: bool = False,
                 xatol: float = 1e-4) -> OptimResult:
    """Best-found minimizer of eta or eta_p over a continuous variable.

    Coarse scan locates the best cell, golden-section refines inside it to
    `xatol` on the variable.  Heuristic by design: the objective is
    non-convex, so this returns the best point found, which for the grids
    used here is the global minimum whenever the landscape is unimodal.
    """
    if objective not in ("eta", "eta_p"):
        raise ValueError('objective must be "eta" or "eta_p"')
    if variable not in CONTINUOUS_VARIABLES:
        raise ValueError(f"variable must be one of {CONTINUOUS_VARIABLES}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError("bracket must be finite with lo < hi")
    if variable == "rate" and lo <= 0.0:
        raise ValueError("rate bracket must be positive")
    if coarse_points < 3:
        raise ValueError("coarse_points must be >= 3")

    evaluations = 0
    best_x = math.nan
    best_v = math.inf

    def f(x: float) -> float:
        nonlocal evaluations, best_x, best_v
        rep = evaluate_point(variable, x, link, protocol, power, couple_a_to_p)
        v = getattr(rep, objective)
        if not math.isfinite(v):
            v = math.inf
        evaluations += 1
        if v < best_v:
            best_x, best_v = x, v
        return v

    step = (hi - lo) / (coarse_points - 1)
    xs = [lo + i * step for i in range(coarse_points - 1)] + [hi]
    vs = [f(x) for x in xs]
    if not any(math.isfinite(v) for v in vs):
        raise NoMinimumError("objective is divergent on the entire bracket")
    i = min(range(len(xs)), key=lambda j: vs[j])

    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xatol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)

    assert best_v <= min(vs)
    return OptimResult(argmin=best_x, min_value=best_v,
                       bracket=(lo, hi), evaluations=evaluations)


def sweep_spec_from_doc(doc: dict, link: LinkConfig, protocol: ProtocolConfig,
                        power: PowerProfile) -> SweepSpec:
    sec = _section(doc, "sweep")
    variable = sec.get("variable")
    if variable not in SWEEP_VARIABLES:
        raise ConfigError("sweep.variable", f"must be one of {SWEEP_VARIABLES}")
    grid = sec.get("grid")
    if not isinstance(grid, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in grid):
        raise ConfigError("sweep.grid", "must be a list of numbers")
    outputs = sec.get("outputs", list(OUTPUT_FIELDS))
    if not isinstance(outputs, list) or not all(isinstance(s, str) for s in outputs):
        raise ConfigError("sweep.outputs", "must be a list of field names")
    couple = sec.get("couple_a_to_p", False)
    if not isinstance(couple, bool):
        raise ConfigError("sweep.couple_a_to_p", "must be a boolean")
    try:
        return SweepSpec(variable=variable, grid=tuple(grid), link=link,
                         protocol=protocol, power=power,
                         outputs=tuple(outputs), couple_a_to_p=couple)
    except ValueError as exc:
        raise ConfigError("sweep", str(exc)) from exc


def minimize_spec_from_doc(doc: dict) -> dict:
    """Validated keyword arguments for minimize_eta from the "minimize"
    section (sans the fixed configs, which the caller supplies)."""
    sec = _section(doc, "minimize")
    objective = sec.get("objective", "eta")
    if objective not in ("eta", "eta_p"):
        raise ConfigError("minimize.objective", 'must be "eta" or "eta_p"')
    variable = sec.get("variable")
    if variable not in CONTINUOUS_VARIABLES:
        raise ConfigError("minimize.variable", f"must be one of {CONTINUOUS_VARIABLES}")
    lo = _num(sec, "minimize", "lo")
    hi = _num(sec, "minimize", "hi")
    if hi <= lo:
        raise ConfigError("minimize.hi", "must be > minimize.lo")
    couple = sec.get("couple_a_to_p", False)
    if not isinstance(couple, bool):
        raise ConfigError("minimize.couple_a_to_p", "must be a boolean")
    return {
        "objective": objective,
        "variable": variable,
        "bracket": (lo, hi),
        "coarse_points": _int(sec, "minimize", "coarse_points", minimum=3, default=64),
        "couple_a_to_p": couple,
    }
