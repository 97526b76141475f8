import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from timrbs.errors import ConfigurationError
from timrbs.receiver import (
    APDParams, PVParams, pv_operating_point, pv_residual, receive, signal_noise,
    spectral_efficiency, split_power,
)


def scan_root(P, pv, points=1_000_001):
    """Dense-scan oracle: first grid point where the residual turns nonpositive."""
    I_ph = pv.eta_pv * P
    i = np.linspace(0, I_ph, points)
    g = pv_residual(i, I_ph, pv)
    k = int(np.flatnonzero(g <= 0)[0])
    return i[k - 1], i[k]


@pytest.mark.parametrize("theta, P_e, C", [
    (0.3, 0.40796548597847054, 11.474513776168386),
    (0.7, 2.1130437405930276, 11.050254198310999),
])
def test_reference_receiver_points(theta, P_e, C):
    # received power 13.25 W with the default receiver, within 1% of the
    # quoted 0.41 W / 11.47 and 2.10 W / 11.05
    out = receive(13.25, theta)
    assert out.P_e == pytest.approx(P_e, rel=1e-12)
    assert out.C == pytest.approx(C, rel=1e-12)
    assert out.P_e == pytest.approx({0.3: 0.41, 0.7: 2.10}[theta], rel=0.01)
    assert out.C == pytest.approx({0.3: 11.47, 0.7: 11.05}[theta], rel=0.01)


def test_operating_point_matches_scan():
    pv = PVParams()
    for P in (0.5, 4.0, 9.275, 30.0):
        lo, hi = scan_root(P, pv)
        op = pv_operating_point(P, pv)
        assert lo <= op.i_pv <= hi
        assert op.v_pv == pytest.approx(op.i_pv * pv.R_pv)
        assert op.P_e == pytest.approx(op.i_pv ** 2 * pv.R_pv)


def test_small_signal_limit():
    # diode far from conduction: exp(x) - 1 ~ x, so the load line is linear
    pv = PVParams()
    P = 1e-6
    I_ph = pv.eta_pv * P
    r = pv.R_pv + pv.R_s
    i = I_ph / (1 + r / pv.R_sh + pv.I_o * r / pv.thermal_voltage)
    assert pv_operating_point(P, pv).i_pv == pytest.approx(i, rel=1e-9)


def test_spectral_efficiency_closed_form():
    apd = APDParams()
    P = 4.0
    ip = 0.6 * P
    S = ip ** 2
    N = 2 * 1.6e-19 * (ip + 5100e-6) * 811.7e6 + 4 * 1.38e-23 * 300 * 811.7e6 / 10e3
    assert signal_noise(P, apd) == pytest.approx((S, N), rel=1e-14)
    C, _, _ = spectral_efficiency(P, apd)
    assert C == pytest.approx(0.5 * math.log(1 + S / N * math.e / (2 * math.pi)), rel=1e-14)


def test_zero_power():
    out = receive(0.0, 0.5)
    assert out.P_e == 0.0 and out.C == 0.0
    assert pv_operating_point(0.0).iterations == 0


def test_validation():
    with pytest.raises(ConfigurationError):
        split_power(1.0, 1.5)
    with pytest.raises(ConfigurationError):
        PVParams(D=0.5)
    with pytest.raises(ConfigurationError):
        PVParams(R_pv=-1)
    with pytest.raises(ConfigurationError):
        APDParams(B_n=0)
    with pytest.raises(ConfigurationError):
        pv_operating_point(-1.0)
    with pytest.raises(ConfigurationError):
        signal_noise(-1.0)


def test_thermal_voltage():
    assert PVParams().thermal_voltage == pytest.approx(40 * 1.105 * 1.38e-23 * 300 / 1.6e-19)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 200), st.floats(0, 1))
def test_residual_vanishes(P, theta):
    pv = PVParams()
    op = pv_operating_point(theta * P, pv)
    assert abs(pv_residual(op.i_pv, pv.eta_pv * theta * P, pv)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e3), st.floats(0, 1))
def test_split_is_exact(P, theta):
    a, b = split_power(P, theta)
    assert abs(a + b - P) <= np.finfo(float).eps * P
    assert a == theta * P


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.01, 0.99))
def test_monotone_in_theta(P, theta):
    a, b = receive(P, theta), receive(P, min(1.0, theta + 0.01))
    assert b.P_e > a.P_e
    assert b.C < a.C


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 100))
def test_c_increases_with_power(P):
    h = 1e-3 * P
    assert spectral_efficiency(P + h)[0] > spectral_efficiency(P)[0] > spectral_efficiency(P - h)[0]
