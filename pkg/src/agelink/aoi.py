"""Non-linear age-of-information metrics of a stop-and-wait update link.

The destination's dissatisfaction with an update of age t is

    cost(t) = (exp(a t) - 1) / a,

exponential-like for a > 0, logarithmic-like for a < 0, and exactly t in the
a -> 0 limit.  Updates take one slot of t_packet_s each; a slot fails with
probability p, a packet is dropped after max_tx failed attempts and replaced
with a fresh one.  Between consecutive successful receptions the attempt
count Y is geometric, and the age floor after a reception is T_p * Z with Z
the truncated-geometric attempt count of the received packet (Y = v*max_tx + Z
folds the dropped packets away).

avg_aoi is the long-run time average of cost(age(t)); avg_paoi the average of
the per-cycle peaks.  Both have closed forms in (p, a, T_p, M) that require
p * exp(a * T_p) < 1; past that the geometric series behind the conditional
expectation diverges and the functions return math.inf rather than raising,
so parameter sweeps can chart the divergence region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "LINEAR_BRANCH_EPS",
    "AoiParams",
    "DivergenceError",
    "cost",
    "exp_y",
    "z_pmf",
    "exp_z",
    "avg_aoi",
    "avg_paoi",
    "uses_linear_branch",
]

# |a| * T_p * horizon below this routes to the a -> 0 closed forms: the exact
# expressions subtract two O(1/a) terms and lose everything to cancellation
LINEAR_BRANCH_EPS = 1e-6

# exp(M * ln p) below this underflows to an exact zero
_LOG_UNDERFLOW = math.log(1e-300)

_LOG_MAX = 709.0  # exp overflows just past this


class DivergenceError(ValueError):
    """A mean that only exists for p < 1 was asked for at p >= 1."""


@dataclass(frozen=True)
class AoiParams:
    """Cost shape a, slot duration, and retransmission cap (None = unbounded)."""

    a: float
    t_packet_s: float
    max_tx: int | None = None

    def __post_init__(self):
        if self.t_packet_s <= 0:
            raise ValueError(f"t_packet_s must be > 0, got {self.t_packet_s}")
        if self.max_tx is not None and (self.max_tx < 1 or self.max_tx != int(self.max_tx)):
            raise ValueError(f"max_tx must be a positive integer or None, got {self.max_tx}")


def cost(t: float, a: float) -> float:
    """Age dissatisfaction (exp(a t) - 1)/a; t at a = 0; t + a t^2/2 near it."""
    if t < 0:
        raise ValueError(f"age must be >= 0, got {t}")
    if a == 0.0:
        return t
    at = a * t
    if abs(at) < LINEAR_BRANCH_EPS:
        return t + 0.5 * a * t * t
    if at > _LOG_MAX:
        raise OverflowError(f"cost overflow: a*t = {at} exceeds the exp range")
    return math.expm1(at) / a


def exp_y(p: float) -> float:
    """Mean attempt count between consecutive successes, 1/(1-p)."""
    _check_p(p)
    return 1.0 / (1.0 - p)


def z_pmf(p: float, max_tx: int, l: int) -> float:
    """Pr[Z = l] = (1-p) p^(l-1) / (1 - p^max_tx) for 1 <= l <= max_tx.

    Z is the attempt count of a successfully received packet; folding the
    dropped packets out of the geometric Y leaves this truncated geometric.
    """
    if max_tx < 1 or max_tx != int(max_tx):
        raise ValueError(f"max_tx must be a positive integer, got {max_tx}")
    if l < 1 or l > max_tx or l != int(l):
        raise ValueError(f"l must be an integer in [1, {max_tx}], got {l}")
    _check_p(p)
    if p == 0.0:
        return 1.0 if l == 1 else 0.0
    return (1.0 - p) * p ** (l - 1) / (1.0 - _pow(p, max_tx))


def exp_z(p: float, max_tx: int | None = None) -> float:
    """Mean attempt count of the received packet.

    1/(1-p) - max_tx p^max_tx / (1 - p^max_tx), or 1/(1-p) unbounded.
    """
    _check_p(p)
    if max_tx is not None and (max_tx < 1 or max_tx != int(max_tx)):
        raise ValueError(f"max_tx must be a positive integer or None, got {max_tx}")
    if max_tx is None or p == 0.0:
        return 1.0 / (1.0 - p)
    pm = _pow(p, max_tx)
    return 1.0 / (1.0 - p) - max_tx * pm / (1.0 - pm)


def uses_linear_branch(p: float, params: AoiParams) -> bool:
    """True when the metrics route to the a -> 0 closed forms."""
    if params.a == 0.0:
        return True
    if p >= 1.0:
        return False
    horizon = 1.0 / (1.0 - p)
    if params.max_tx is not None:
        horizon = max(horizon, float(params.max_tx))
    return abs(params.a) * params.t_packet_s * horizon < LINEAR_BRANCH_EPS


def avg_aoi(p: float, params: AoiParams) -> float:
    """Long-run time average of cost(age), closed form.

    For a != 0 with q = p exp(a T_p) < 1, M = max_tx:

        e^(aT_p)(e^(aT_p) - 1)(1 - q^M)(1-p)^2 / (T_p a^2 (1-q)^2 (1-p^M)) - 1/a

    (unbounded M drops the q^M and p^M factors).  Returns math.inf when the
    series diverges (q >= 1, or p >= 1 so no update ever gets through).  The
    a -> 0 branch is T_p (M - M/(1-p^M) + (3+p)/(2(1-p))).
    """
    _check_p01(p)
    tp = params.t_packet_s
    m = params.max_tx
    if p >= 1.0:
        return math.inf
    if uses_linear_branch(p, params):
        if m is None or p == 0.0:
            return tp * (3.0 + p) / (2.0 * (1.0 - p))
        pm = _pow(p, m)
        return tp * (-m * pm / (1.0 - pm) + (3.0 + p) / (2.0 * (1.0 - p)))
    a = params.a
    atp = a * tp
    if atp > _LOG_MAX:
        raise OverflowError(f"avg_aoi overflow: a*t_packet_s = {atp} exceeds the exp range")
    factors = _growth_factors(p, atp, m)
    if factors is None:
        return math.inf
    g, e3p, e4 = factors
    # G - 1 for G = (g/s)(1+g)((1-p)/(1-q))^2 (1-q^M)/(1-p^M) with s = a T_p,
    # composed as a running product-minus-one: equal to the quotient form
    # above in exact arithmetic, but nothing cancels as a -> 0 or p -> 1
    r = _expm1_minus_s_over_s(atp)
    r += g + r * g
    e3 = e3p * (2.0 + e3p)
    r += e3 + r * e3
    r += e4 + r * e4
    return r / a


def avg_paoi(p: float, params: AoiParams) -> float:
    """Average per-cycle peak of cost(age), closed form.

    For a != 0 with q = p exp(a T_p) < 1 this is (E_z E_y - 1)/a where E_y and
    E_z are the transforms E[e^(a T_p Y)] and E[e^(a T_p Z)]:

        E_y = (1-p) e^(aT_p) / (1-q)
        E_z = (1-p) e^(aT_p) (1-q^M) / ((1-p^M)(1-q)).

    Diverges (math.inf) when q >= 1 or p >= 1.  The a -> 0 branch is
    T_p (2/(1-p) - M p^M/(1-p^M)).
    """
    _check_p01(p)
    tp = params.t_packet_s
    m = params.max_tx
    if p >= 1.0:
        return math.inf
    if uses_linear_branch(p, params):
        if m is None or p == 0.0:
            return 2.0 * tp / (1.0 - p)
        pm = _pow(p, m)
        return tp * (2.0 / (1.0 - p) - m * pm / (1.0 - pm))
    a = params.a
    atp = a * tp
    if 2.0 * atp > _LOG_MAX:
        raise OverflowError(f"avg_paoi overflow: a*t_packet_s = {atp} exceeds the exp range")
    factors = _growth_factors(p, atp, m)
    if factors is None:
        return math.inf
    g, e3p, e4 = factors
    # E_z E_y - 1 = (1+g)^2 ((1-p)/(1-q))^2 (1-q^M)/(1-p^M) - 1, composed as
    # a running product-minus-one so the 1 never cancels a near-1 product
    r = g * (2.0 + g)
    e3 = e3p * (2.0 + e3p)
    r += e3 + r * e3
    r += e4 + r * e4
    return r / a


# ----------------------------------------------------------------------

def _growth_factors(p: float, s: float, m: int | None) -> tuple[float, float, float] | None:
    """Stable ingredients of the exponential-branch closed forms.

    For s = a*T_p returns (g, e3p, e4) with

        1 + g   = e^s
        1 + e3p = (1-p)/(1-q)          q = p e^s
        1 + e4  = (1-q^M)/(1-p^M)

    or None when q >= 1 (the geometric series diverges).  Every factor is
    built from expm1/log so values survive p -> 1 with a -> 0.
    """
    g = math.expm1(s)
    if p == 0.0:
        return g, 0.0, 0.0
    lp = math.log(p)
    if lp + s >= 0.0:
        return None
    e3p = p * g / -math.expm1(lp + s)
    if m is None:
        return g, e3p, 0.0
    one_pm = -math.expm1(m * lp)
    ms = m * s
    if ms > 300.0:
        # expm1(ms) would overflow; p^M is then negligible next to q^M
        e4 = (_pow(p, m) - math.exp(m * (lp + s))) / one_pm
    else:
        e4 = -_pow(p, m) * math.expm1(ms) / one_pm
    return g, e3p, e4


def _expm1_minus_s_over_s(s: float) -> float:
    """(expm1(s) - s)/s with full relative accuracy near 0."""
    if abs(s) < 1e-3:
        s2 = s * s
        return 0.5 * s * (1.0 + s / 3.0 + s2 / 12.0 + s2 * s / 60.0 + s2 * s2 / 360.0)
    return (math.expm1(s) - s) / s


def _check_p(p: float) -> None:
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    if p >= 1.0:
        raise DivergenceError(f"mean does not exist at p = {p} (needs p < 1)")


def _check_p01(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")


def _pow(base: float, m: int) -> float:
    """base^m via exp(m log base), underflowing to an exact 0 below 1e-300."""
    if base == 0.0:
        return 0.0
    log_val = m * math.log(base)
    if log_val < _LOG_UNDERFLOW:
        return 0.0
    return math.exp(log_val)
