"""Markov packet-error model: limits, bounds, the single-antenna identity."""

import math

import numpy as np
import pytest

from agelink.channel import FadingParams, snr_cdf
from agelink.pep import (
    PacketParams,
    pep,
    pep_result,
    pep_short_packet_approx,
    pep_worst_case,
)


def random_setup(rng):
    fp = FadingParams(
        n_antennas=int(rng.integers(1, 6)),
        rician_k=float(rng.uniform(0.0, 4.0)),
        avg_snr=float(rng.uniform(0.5, 25.0)),
        doppler_hz=float(rng.uniform(0.0, 120.0)),
    )
    pp = PacketParams(t_packet_s=float(rng.uniform(1e-4, 5e-3)))
    gth = float(rng.uniform(0.05, 20.0))
    return fp, pp, gth


def test_static_channel_reduces_to_outage():
    fp = FadingParams(n_antennas=2, rician_k=1.0, avg_snr=10.0, doppler_hz=0.0)
    pp = PacketParams(t_packet_s=1e-3)
    for gth in (0.5, 2.0, 8.0):
        assert pep(fp, pp, gth) == pytest.approx(snr_cdf(fp, gth), abs=1e-14)


def test_pep_bounded_and_dominates_outage():
    rng = np.random.default_rng(21)
    for _ in range(200):
        fp, pp, gth = random_setup(rng)
        p = pep(fp, pp, gth)
        assert 0.0 <= p <= 1.0
        assert p >= snr_cdf(fp, gth) - 1e-14


def test_single_antenna_rayleigh_identity():
    # pep(N=1, K=0) and the closed worst-case form are the same expression
    rng = np.random.default_rng(33)
    for _ in range(200):
        snr = float(rng.uniform(0.5, 30.0))
        fd = float(rng.uniform(0.0, 150.0))
        tp = float(rng.uniform(1e-4, 1e-2))
        gth = float(rng.uniform(0.05, 15.0))
        fp = FadingParams(n_antennas=1, rician_k=0.0, avg_snr=snr, doppler_hz=fd)
        a = pep(fp, PacketParams(tp), gth)
        b = pep_worst_case(snr, fd, tp, gth)
        assert abs(a - b) <= 1e-12


def test_short_packet_approx_upper_bounds_and_converges():
    fp = FadingParams(n_antennas=2, rician_k=1.0, avg_snr=8.0, doppler_hz=40.0)
    gth = 1.5
    gaps = []
    for tp in (1e-2, 1e-3, 1e-4):
        pp = PacketParams(tp)
        exact = pep(fp, pp, gth)
        approx = pep_short_packet_approx(fp, pp, gth)
        assert approx >= exact - 1e-14
        gaps.append(approx - exact)
    assert gaps[0] > gaps[1] > gaps[2]
    # tight at T_p = 1 ms: within 1 percent
    pp = PacketParams(1e-3)
    assert pep_short_packet_approx(fp, pp, gth) == pytest.approx(
        pep(fp, pp, gth), rel=1e-2
    )


def test_pep_monotone_in_threshold_and_doppler():
    pp = PacketParams(1e-3)
    fp = FadingParams(n_antennas=2, rician_k=2.0, avg_snr=10.0, doppler_hz=50.0)
    vals = [pep(fp, pp, g) for g in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
    vals = [
        pep(FadingParams(2, 2.0, 10.0, fd), pp, 2.0) for fd in (0.0, 10.0, 50.0, 200.0)
    ]
    assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))


def test_saturation_when_outage_is_certain():
    # threshold absurdly above the SNR range: survival underflows, p = 1
    fp = FadingParams(n_antennas=1, rician_k=0.0, avg_snr=0.01, doppler_hz=10.0)
    res = pep_result(fp, PacketParams(1e-3), 50.0)
    assert res.value == 1.0
    assert res.saturated


def test_memoized_path_matches_direct():
    fp = FadingParams(n_antennas=3, rician_k=1.0, avg_snr=5.0, doppler_hz=30.0)
    pp = PacketParams(2e-3)
    assert pep(fp, pp, 1.3) == pep_result(fp, pp, 1.3).value
    assert pep(fp, pp, 1.3) is pep(fp, pp, 1.3) or pep(fp, pp, 1.3) == pep(fp, pp, 1.3)


def test_packet_params_validation():
    with pytest.raises(ValueError):
        PacketParams(t_packet_s=0.0)
    with pytest.raises(ValueError):
        pep_worst_case(avg_snr=-1.0, doppler_hz=10.0, t_packet_s=1e-3, gamma_th=1.0)
