"""Special functions for the fading-channel statistics.

Scalar implementations of:

* modified Bessel function of the first kind, integer order (plain, scaled
  and log flavours),
* the generalized Marcum Q-function Q_nu(a, b),
* the regularized lower incomplete gamma function P(n, x) for integer shape.

Everything is a truncated series with an explicit truncation-error bound, a
relative stopping tolerance and a hard term cap.  Hitting the cap raises
ConvergenceError carrying the partial value and the residual bound; it never
silently returns a bad number.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "ConvergenceError",
    "bessel_i",
    "bessel_i_log",
    "marcum_q",
    "reg_gamma_p",
]

_LOG_MAX = math.log(sys.float_info.max)  # ~709.78, exp() overflows past this


@dataclass(frozen=True)
class Tolerance:
    """Series truncation control.

    rel_eps is the relative truncation target, max_terms the hard cap on
    series terms.  The defaults are tight enough for every consumer in this
    package; loosen rel_eps only for throwaway scans.
    """

    rel_eps: float = 1e-14
    max_terms: int = 20_000

    def __post_init__(self):
        if not (0.0 < self.rel_eps < 1e-6):
            raise ValueError(f"rel_eps must be in (0, 1e-6), got {self.rel_eps}")
        if self.max_terms < 100:
            raise ValueError(f"max_terms must be >= 100, got {self.max_terms}")


DEFAULT_TOLERANCE = Tolerance()


class ConvergenceError(ArithmeticError):
    """A series hit its term cap before meeting the tolerance."""

    def __init__(self, message: str, partial: float, bound: float):
        super().__init__(f"{message} (partial value {partial!r}, residual bound {bound!r})")
        self.partial = partial
        self.bound = bound


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


# ----------------------------------------------------------------------
# modified Bessel I
# ----------------------------------------------------------------------

def bessel_i_log(order: int, x: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """log I_order(x) for integer order >= 0 and x >= 0.

    Power series I_v(x) = sum_k (x/2)^(v+2k) / (k! (v+k)!), accumulated with
    a streaming log-sum-exp so the result is finite even where I_v itself
    overflows.  Returns -inf for I_v(0) with v > 0.
    """
    if order < 0 or order != int(order):
        raise ValueError(f"order must be a non-negative integer, got {order}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0 if order == 0 else -math.inf

    lx = math.log(x / 2.0)
    log_term = order * lx - math.lgamma(order + 1)  # k = 0
    log_sum = log_term
    for k in range(1, tol.max_terms + 1):
        log_term += 2.0 * lx - math.log(k) - math.log(k + order)
        log_sum = _logaddexp(log_sum, log_term)
        ratio = (x * x / 4.0) / ((k + 1.0) * (k + 1.0 + order))
        if ratio < 1.0:
            # remaining tail is dominated by a geometric series
            log_tail = log_term + math.log(ratio / (1.0 - ratio))
            if log_tail <= log_sum + math.log(tol.rel_eps):
                return log_sum
    raise ConvergenceError(
        f"bessel_i_log({order}, {x}) did not converge in {tol.max_terms} terms",
        partial=log_sum,
        bound=math.exp(min(log_term, _LOG_MAX)),
    )


def bessel_i(
    order: int,
    x: float,
    scaled: bool = False,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """I_order(x), or exp(-x) * I_order(x) when scaled=True.

    The unscaled value overflows near x ~ 713; that case raises OverflowError
    instead of returning inf.  Use scaled=True or bessel_i_log there.
    """
    log_val = bessel_i_log(order, x, tol)
    if scaled:
        return math.exp(log_val - x)
    if log_val > _LOG_MAX:
        raise OverflowError(
            f"I_{order}({x}) exceeds the float range; use scaled=True or bessel_i_log"
        )
    return math.exp(log_val)


# ----------------------------------------------------------------------
# regularized incomplete gamma, integer shape
# ----------------------------------------------------------------------

def _gamma_q_sum(shape: int, x: float) -> float:
    """Q(shape, x) = exp(-x) * sum_{j<shape} x^j / j! as a direct float sum.

    Every term is a Poisson pmf value in [0, 1]; computed from logs so a huge
    x underflows term-by-term instead of poisoning the recurrence.
    """
    log_term = -x  # j = 0
    lx = math.log(x)
    total = 0.0
    for j in range(shape):
        if j > 0:
            log_term += lx - math.log(j)
        total += math.exp(log_term)
    return min(total, 1.0)


def reg_gamma_p(shape: int, x: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Regularized lower incomplete gamma P(shape, x), integer shape >= 1.

    P(shape, x) = 1 - exp(-x) * sum_{k=0}^{shape-1} x^k / k!, clamped to
    [0, 1].  Below the mode (x < shape) the complementary Poisson-tail series
    P = sum_{k>=shape} exp(-x) x^k / k! is summed directly so deep lower-tail
    values keep relative accuracy instead of cancelling against 1.
    """
    if shape < 1 or shape != int(shape):
        raise ValueError(f"shape must be a positive integer, got {shape}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x >= shape:
        return max(0.0, 1.0 - _gamma_q_sum(shape, x))

    lx = math.log(x)
    log_term = -x + shape * lx - math.lgamma(shape + 1)  # k = shape
    log_sum = log_term
    for k in range(shape, shape + tol.max_terms):
        ratio = x / (k + 1.0)  # < 1 because x < shape <= k
        log_tail = log_term + math.log(ratio / (1.0 - ratio))
        if log_tail <= log_sum + math.log(tol.rel_eps):
            return min(1.0, math.exp(log_sum))
        log_term += lx - math.log(k + 1.0)
        log_sum = _logaddexp(log_sum, log_term)
    raise ConvergenceError(
        f"reg_gamma_p({shape}, {x}) did not converge in {tol.max_terms} terms",
        partial=math.exp(log_sum),
        bound=math.exp(log_term),
    )


def _reg_gamma_q(shape: int, x: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Complement 1 - P(shape, x), accurate in both tails (internal)."""
    if x == 0.0:
        return 1.0
    if x >= shape:
        return _gamma_q_sum(shape, x)
    return max(0.0, 1.0 - reg_gamma_p(shape, x, tol))


# ----------------------------------------------------------------------
# Marcum Q
# ----------------------------------------------------------------------

def marcum_q(
    order: int,
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """Generalized Marcum Q-function Q_order(a, b), integer order >= 1.

    Evaluated as the Poisson-weighted ladder of regularized gamma tails

        Q_nu(a, b) = sum_{k>=0} pois(k; a^2/2) * Q(nu + k, b^2/2),

    where pois(k; m) = exp(-m) m^k / k! and Q(n, y) is the upper regularized
    gamma.  The gamma tails increase toward 1 in k, so the truncation residual
    after term K is bounded by the remaining Poisson mass; once past the
    Poisson mode that mass is itself bounded by a geometric tail, which is
    the stopping test.  Result is clamped to [0, 1].
    """
    if order < 1 or order != int(order):
        raise ValueError(f"order must be a positive integer, got {order}")
    if a < 0 or b < 0:
        raise ValueError(f"a and b must be >= 0, got a={a}, b={b}")
    if b == 0.0:
        return 1.0
    y = 0.5 * b * b
    if a == 0.0:
        return _gamma_q_sum(order, y)

    x = 0.5 * a * a
    lx = math.log(x)
    ly = math.log(y)

    gamma_tail = _gamma_q_sum(order, y)       # Q(order + k, y) at k = 0
    log_pmf_y = -y + order * ly - math.lgamma(order + 1)  # pois(order; y), advances the ladder
    log_pois = -x                              # pois(0; x)
    total = 0.0
    for k in range(tol.max_terms):
        pois_k = math.exp(log_pois)
        total += pois_k * gamma_tail
        ratio = x / (k + 1.0)
        if ratio < 1.0:
            # remaining Poisson mass <= pois_k * ratio / (1 - ratio)
            tail_mass = pois_k * ratio / (1.0 - ratio)
            if tail_mass <= tol.rel_eps * total:
                return min(total, 1.0)
        gamma_tail = min(1.0, gamma_tail + math.exp(log_pmf_y))
        log_pmf_y += ly - math.log(order + k + 1.0)
        log_pois += lx - math.log(k + 1.0)
    raise ConvergenceError(
        f"marcum_q({order}, {a}, {b}) did not converge in {tol.max_terms} terms",
        partial=min(total, 1.0),
        bound=math.exp(log_pois),
    )
