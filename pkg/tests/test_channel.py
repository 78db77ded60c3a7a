"""Outage CDF, survival and level-crossing rate against Monte-Carlo draws,
scipy cross-checks and the documented limit behaviours."""

import math

import numpy as np
import pytest
from scipy import special, stats

from agelink.channel import (
    FadingParams,
    RateThreshold,
    lcr,
    snr_cdf,
    snr_cdf_massive_n,
    snr_sf,
)


def mrc_snr_draws(rng, n, k, avg_snr, size):
    """Independent draws of gamma = avg_snr * sum_i |h_i|^2, unit-power branches."""
    nu = math.sqrt(k / (k + 1.0))
    sigma = math.sqrt(1.0 / (2.0 * (k + 1.0)))
    h = nu + sigma * rng.standard_normal((size, n)) + 1j * sigma * rng.standard_normal((size, n))
    return avg_snr * np.abs(h) ** 2 @ np.ones(n)


# ----------------------------------------------------------------------
# CDF / survival
# ----------------------------------------------------------------------

def test_cdf_vanishes_at_zero_threshold():
    fp = FadingParams(n_antennas=2, rician_k=1.0, avg_snr=10.0)
    assert snr_cdf(fp, 0.0) == 0.0
    assert snr_sf(fp, 0.0) == 1.0
    assert snr_cdf(fp, 1e-9) < 1e-6


def test_cdf_single_antenna_rayleigh_is_exponential():
    fp = FadingParams(n_antennas=1, rician_k=0.0, avg_snr=2.0)
    for gth in (0.1, 1.0, 4.0):
        assert snr_cdf(fp, gth) == pytest.approx(-math.expm1(-gth / 2.0), rel=1e-13)


def test_cdf_rayleigh_matches_erlang():
    # K = 0 must agree with the Erlang(N) CDF to 1e-10
    for n in (1, 2, 4, 8):
        fp = FadingParams(n_antennas=n, rician_k=0.0, avg_snr=3.0)
        for gth in (0.5, 3.0, 12.0):
            want = float(special.gammainc(n, gth / 3.0))
            assert snr_cdf(fp, gth) == pytest.approx(want, rel=1e-10, abs=1e-300)


def test_cdf_against_monte_carlo():
    # frozen setup from the spec'd operating point, 1e7 draws
    rng = np.random.default_rng(314159)
    n_draws = 10_000_000
    fp = FadingParams(n_antennas=3, rician_k=2.0, avg_snr=10.0)
    draws = mrc_snr_draws(rng, 3, 2.0, 10.0, n_draws)
    emp = float((draws < 5.0).mean())
    se = math.sqrt(emp * (1.0 - emp) / n_draws)
    assert abs(snr_cdf(fp, 5.0) - emp) <= 3.0 * se


def test_cdf_non_increasing_in_antennas_and_k():
    gth, snr = 2.0, 4.0
    for k in (0.0, 1.0, 3.0):
        vals = [snr_cdf(FadingParams(n, k, snr), gth) for n in (1, 2, 4, 8)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    for n in (1, 2, 4):
        vals = [snr_cdf(FadingParams(n, k, snr), gth) for k in (0.0, 0.5, 2.0, 5.0)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_sf_complements_cdf():
    rng = np.random.default_rng(8)
    for _ in range(50):
        fp = FadingParams(
            n_antennas=int(rng.integers(1, 6)),
            rician_k=float(rng.uniform(0.0, 4.0)),
            avg_snr=float(rng.uniform(0.5, 20.0)),
        )
        gth = float(rng.uniform(0.05, 30.0))
        assert snr_sf(fp, gth) + snr_cdf(fp, gth) == pytest.approx(1.0, abs=1e-12)


# ----------------------------------------------------------------------
# level-crossing rate
# ----------------------------------------------------------------------

def test_lcr_zero_doppler_and_zero_threshold():
    fp = FadingParams(n_antennas=2, rician_k=1.0, avg_snr=10.0, doppler_hz=0.0)
    assert lcr(fp, 3.0) == 0.0
    fp = FadingParams(n_antennas=2, rician_k=1.0, avg_snr=10.0, doppler_hz=80.0)
    assert lcr(fp, 0.0) == 0.0


def test_lcr_scales_linearly_with_doppler():
    base = FadingParams(n_antennas=3, rician_k=1.5, avg_snr=8.0, doppler_hz=20.0)
    double = FadingParams(n_antennas=3, rician_k=1.5, avg_snr=8.0, doppler_hz=40.0)
    assert lcr(double, 4.0) == pytest.approx(2.0 * lcr(base, 4.0), rel=1e-13)


def test_lcr_rayleigh_closed_form():
    fp = FadingParams(n_antennas=2, rician_k=0.0, avg_snr=5.0, doppler_hz=30.0)
    rho = 1.7 / 5.0
    want = math.sqrt(2 * math.pi) * 30.0 * rho ** (2 - 0.5) * math.exp(-rho) / math.factorial(1)
    assert lcr(fp, 1.7) == pytest.approx(want, rel=1e-12)


def test_lcr_continuous_at_rayleigh_cutoff():
    # K = 1e-8 through the Rician path must sit on top of the K = 0 branch
    near = FadingParams(n_antennas=3, rician_k=1e-8, avg_snr=6.0, doppler_hz=25.0)
    at = FadingParams(n_antennas=3, rician_k=0.0, avg_snr=6.0, doppler_hz=25.0)
    for gth in (0.5, 3.0, 9.0):
        assert lcr(near, gth) == pytest.approx(lcr(at, gth), rel=1e-5)


def test_lcr_unimodal_and_vanishing_in_both_tails():
    fp = FadingParams(n_antennas=2, rician_k=2.0, avg_snr=10.0, doppler_hz=50.0)
    grid = np.geomspace(0.01, 400.0, 250)
    vals = np.array([lcr(fp, float(g)) for g in grid])
    assert np.all(vals >= 0.0)
    peak = int(np.argmax(vals))
    assert 0 < peak < len(grid) - 1
    assert np.all(np.diff(vals[: peak + 1]) >= -1e-12 * vals.max())
    assert np.all(np.diff(vals[peak:]) <= 1e-12 * vals.max())
    assert vals[-1] < 1e-12 * vals.max()


def test_lcr_matches_scipy_assembled_formula():
    # same formula assembled with scipy.special.ive as an independent pairing
    rng = np.random.default_rng(99)
    for _ in range(60):
        n = int(rng.integers(1, 9))
        k = float(rng.uniform(0.1, 6.0))
        snr = float(rng.uniform(0.5, 30.0))
        fd = float(rng.uniform(1.0, 200.0))
        gth = float(rng.uniform(0.05, 60.0))
        fp = FadingParams(n, k, snr, fd)
        rho = gth * (k + 1.0) / snr
        z = 2.0 * math.sqrt(rho * n * k)
        want = (
            math.sqrt(2 * math.pi)
            * fd
            * math.exp(
                0.5 * n * math.log(rho)
                + math.log(special.ive(n - 1, z))
                + z
                - rho
                - n * k
                - 0.5 * (n - 1) * math.log(n * k)
            )
        )
        assert lcr(fp, gth) == pytest.approx(want, rel=1e-9, abs=1e-280)


def test_lcr_no_overflow_for_large_parameters():
    fp = FadingParams(n_antennas=64, rician_k=10.0, avg_snr=1.0, doppler_hz=100.0)
    val = lcr(fp, 50.0)
    assert math.isfinite(val) and val >= 0.0


# ----------------------------------------------------------------------
# massive-antenna approximation
# ----------------------------------------------------------------------

def test_massive_n_requires_rayleigh():
    fp = FadingParams(n_antennas=16, rician_k=1.0, avg_snr=2.0)
    with pytest.raises(ValueError):
        snr_cdf_massive_n(fp, 1.0)


def test_massive_n_zero_threshold():
    fp = FadingParams(n_antennas=16, rician_k=0.0, avg_snr=2.0)
    assert snr_cdf_massive_n(fp, 0.0) == 0.0


def test_massive_n_ratio_approaches_one():
    # exact-CDF oracle at N in {16, 32, 64}; ratio error shrinks like x/(N+1)
    snr = 2.0
    gth = 1.0  # x = gamma_th / avg_snr = 0.5
    errs = []
    for n in (16, 32, 64):
        fp = FadingParams(n_antennas=n, rician_k=0.0, avg_snr=snr)
        exact = snr_cdf(fp, gth)
        approx = snr_cdf_massive_n(fp, gth)
        assert exact > 0.0
        errs.append(abs(approx / exact - 1.0))
    assert errs[0] < 0.05
    assert errs[0] > errs[1] > errs[2]


# ----------------------------------------------------------------------
# parameter containers
# ----------------------------------------------------------------------

def test_fading_params_validation():
    with pytest.raises(ValueError):
        FadingParams(n_antennas=0, rician_k=0.0, avg_snr=1.0)
    with pytest.raises(ValueError):
        FadingParams(n_antennas=1, rician_k=-0.1, avg_snr=1.0)
    with pytest.raises(ValueError):
        FadingParams(n_antennas=1, rician_k=0.0, avg_snr=0.0)
    with pytest.raises(ValueError):
        FadingParams(n_antennas=1, rician_k=0.0, avg_snr=1.0, doppler_hz=-5.0)


def test_rate_threshold_construction():
    rt = RateThreshold.from_rate(1.0)
    assert rt.gamma_th == 1.0
    rt = RateThreshold.from_rate(2.0)
    assert rt.gamma_th == 3.0
    with pytest.raises(ValueError):
        RateThreshold(rate_bps_hz=1.0, gamma_th=0.9)
    with pytest.raises(ValueError):
        RateThreshold.from_rate(0.0)
