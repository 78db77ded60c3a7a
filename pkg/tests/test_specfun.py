"""Series implementations vs independent oracles (quadrature, power series,
extended precision) and the identities that tie them together."""

import math

import numpy as np
import pytest
from scipy import integrate, special

from agelink.specfun import (
    DEFAULT_TOLERANCE,
    ConvergenceError,
    Tolerance,
    bessel_i,
    bessel_i_log,
    marcum_q,
    reg_gamma_p,
)

# ----------------------------------------------------------------------
# oracles
# ----------------------------------------------------------------------

def bessel_series_oracle(order, x):
    # plain power series, summed to 1e-14 relative convergence
    total = 0.0
    k = 0
    while True:
        term = (x / 2.0) ** (order + 2 * k) / (math.factorial(k) * math.factorial(order + k))
        total += term
        if term < total * 1e-14:
            return total
        k += 1


def marcum_quadrature_oracle(order, a, b):
    # brute-force quadrature of the defining integral
    if b == 0.0:
        return 1.0
    if a == 0.0:
        f = lambda t: t ** (2 * order - 1) * math.exp(-t * t / 2) / (
            2.0 ** (order - 1) * math.factorial(order - 1)
        )
    else:
        f = lambda t: t * (t / a) ** (order - 1) * math.exp(-(t * t + a * a) / 2) * special.iv(
            order - 1, a * t
        )
    upper = max(a, b) + 40.0
    val, _ = integrate.quad(f, b, upper, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val


# ----------------------------------------------------------------------
# bessel_i
# ----------------------------------------------------------------------

def test_bessel_at_zero():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(3, 0.0) == 0.0
    assert bessel_i_log(2, 0.0) == -math.inf


def test_bessel_against_series_oracle():
    # frozen from the oracle above (also re-derived live)
    assert bessel_i(1, 2.5) == pytest.approx(2.5167162452886984, rel=1e-13)
    assert bessel_i(0, 0.7) == pytest.approx(1.1263030183068092, rel=1e-13)
    assert bessel_i(3, 9.0) == pytest.approx(646.6941918716004, rel=1e-13)
    for order, x in [(0, 0.3), (1, 2.5), (2, 7.0), (5, 1.2), (7, 24.0)]:
        assert bessel_i(order, x) == pytest.approx(bessel_series_oracle(order, x), rel=1e-12)


def test_bessel_three_term_recurrence():
    # I_{v-1}(x) - I_{v+1}(x) = (2v/x) I_v(x)
    rng = np.random.default_rng(42)
    for _ in range(200):
        order = int(rng.integers(1, 12))
        x = float(rng.uniform(0.05, 60.0))
        lhs = bessel_i(order - 1, x, scaled=True) - bessel_i(order + 1, x, scaled=True)
        rhs = 2.0 * order / x * bessel_i(order, x, scaled=True)
        assert abs(lhs - rhs) <= 1e-9 * max(abs(rhs), 1e-300)


def test_bessel_scaled_consistency():
    for order, x in [(0, 1.0), (2, 10.0), (4, 55.0)]:
        assert bessel_i(order, x, scaled=True) == pytest.approx(
            bessel_i(order, x) * math.exp(-x), rel=1e-12
        )


def test_bessel_overflow_is_explicit():
    with pytest.raises(OverflowError):
        bessel_i(0, 800.0)
    # scaled and log values stay finite
    assert 0.0 < bessel_i(0, 800.0, scaled=True) < 1.0
    assert bessel_i_log(0, 800.0) > 700.0
    # scaled value matches the asymptotic e^x/sqrt(2 pi x) form to leading order
    assert bessel_i(0, 800.0, scaled=True) == pytest.approx(
        1.0 / math.sqrt(2 * math.pi * 800.0), rel=1e-3
    )


def test_bessel_rejects_bad_arguments():
    with pytest.raises(ValueError):
        bessel_i(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_i(2, -0.5)


# ----------------------------------------------------------------------
# marcum_q
# ----------------------------------------------------------------------

def test_marcum_trivial_values():
    assert marcum_q(1, 0.7, 0.0) == 1.0
    assert marcum_q(4, 3.0, 0.0) == 1.0
    # Q_1(0, b) = exp(-b^2/2)
    for b in (0.3, 1.0, 2.7):
        assert marcum_q(1, 0.0, b) == pytest.approx(math.exp(-b * b / 2), rel=1e-14)


def test_marcum_against_quadrature_oracle():
    # frozen from the quadrature oracle (scipy.integrate.quad, abs err < 1e-13)
    assert marcum_q(2, 1.0, 1.5) == pytest.approx(0.777992370549792, abs=1e-12)
    assert marcum_q(1, 2.0, 1.0) == pytest.approx(0.9181076963694056, abs=1e-12)


def test_marcum_random_grid_vs_quadrature():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        order = int(rng.integers(1, 9))
        a = float(rng.uniform(0.0, 4.0))
        b = float(rng.uniform(0.0, 5.0))
        assert marcum_q(order, a, b) == pytest.approx(
            marcum_quadrature_oracle(order, a, b), abs=1e-10
        )


def test_marcum_monotonicity():
    rng = np.random.default_rng(5)
    for _ in range(50):
        order = int(rng.integers(1, 7))
        a = float(rng.uniform(0.0, 3.0))
        b = float(rng.uniform(0.1, 4.0))
        q = marcum_q(order, a, b)
        assert 0.0 <= q <= 1.0
        assert marcum_q(order, a, b + 0.3) <= q + 1e-14          # decreasing in b
        assert marcum_q(order, a + 0.3, b) >= q - 1e-14          # increasing in a
        assert marcum_q(order + 1, a, b) >= q - 1e-14            # increasing in order


def test_marcum_central_identity():
    # 1 - Q_N(0, sqrt(2x)) must equal P(N, x)
    for n, x in [(1, 0.5), (2, 1.7), (4, 3.0), (8, 10.0), (3, 0.02)]:
        lhs = 1.0 - marcum_q(n, 0.0, math.sqrt(2 * x))
        assert abs(lhs - reg_gamma_p(n, x)) <= 1e-12


def test_marcum_convergence_error_carries_partial():
    with pytest.raises(ConvergenceError) as exc:
        marcum_q(1, 40.0, 1.0, tol=Tolerance(rel_eps=1e-14, max_terms=100))
    assert 0.0 <= exc.value.partial <= 1.0
    assert exc.value.bound >= 0.0


# ----------------------------------------------------------------------
# reg_gamma_p
# ----------------------------------------------------------------------

def test_reg_gamma_exponential_case():
    # P(1, x) = 1 - exp(-x)
    for x in (0.1, 1.0, 5.0, 30.0):
        assert reg_gamma_p(1, x) == pytest.approx(-math.expm1(-x), rel=1e-13)


def test_reg_gamma_at_zero():
    assert reg_gamma_p(3, 0.0) == 0.0


def test_reg_gamma_against_extended_precision():
    # frozen: mpmath at 40 digits, 1 - e^-3.2 * sum_{k<4} 3.2^k/k!
    assert reg_gamma_p(4, 3.2) == pytest.approx(0.39748027559444285156, rel=1e-13)


def test_reg_gamma_matches_scipy_grid():
    rng = np.random.default_rng(77)
    for _ in range(200):
        shape = int(rng.integers(1, 40))
        x = float(rng.uniform(0.0, 80.0))
        assert reg_gamma_p(shape, x) == pytest.approx(
            float(special.gammainc(shape, x)), rel=1e-11, abs=1e-300
        )


def test_reg_gamma_deep_lower_tail_keeps_relative_accuracy():
    # far below the mode 1 - Q cancels catastrophically; the tail series must not
    for shape, x in [(16, 0.5), (32, 0.5), (64, 0.5), (20, 2.0)]:
        got = reg_gamma_p(shape, x)
        want = float(special.gammainc(shape, x))
        assert got > 0.0
        assert got == pytest.approx(want, rel=1e-10)


def test_reg_gamma_monotone_in_x():
    xs = np.linspace(0.0, 30.0, 200)
    vals = [reg_gamma_p(6, float(x)) for x in xs]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


# ----------------------------------------------------------------------
# Tolerance
# ----------------------------------------------------------------------

def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel_eps=0.0)
    with pytest.raises(ValueError):
        Tolerance(rel_eps=1e-3)
    with pytest.raises(ValueError):
        Tolerance(max_terms=10)
    assert DEFAULT_TOLERANCE.rel_eps < 1e-6
    assert DEFAULT_TOLERANCE.max_terms >= 100
