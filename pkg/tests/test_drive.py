import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from zigzag_ctap import (
    CDT_INDEX,
    ChainSpec,
    ConfigurationError,
    DomainError,
    DriveProtocol,
    bessel_j0,
    effective_couplings,
    envelopes,
    force_components,
    force_integrals,
    gamma_triple,
    pulse_profile,
)
from zigzag_ctap.drive import check_drive_regime

mpmath.mp.dps = 50


def series_j0(x):
    """Power series sum_k (-1)^k (x/2)^{2k} / (k!)^2 in 50-digit arithmetic."""
    x = mpmath.mpf(x)
    total, term, k = mpmath.mpf(0), mpmath.mpf(1), 0
    while abs(term) > mpmath.mpf(10) ** -40 or k < 5:
        total += term
        k += 1
        term = -term * (x / 2) ** 2 / (k * k)
    return float(total)


def test_j0_at_zero():
    assert bessel_j0(0.0) == 1.0


def test_j0_near_first_root():
    assert abs(bessel_j0(2.405)) < 2e-4


def test_j0_at_one():
    assert series_j0(1.0) == pytest.approx(0.765197687, abs=5e-10)
    assert bessel_j0(1.0) == pytest.approx(series_j0(1.0), abs=1e-12)


def test_j0_matches_series_oracle_on_series_range():
    xs = np.linspace(0.0, 8.0, 801)
    ref = np.array([series_j0(x) for x in xs])
    assert np.max(np.abs(bessel_j0(xs) - ref)) <= 1e-9


def test_j0_matches_reference_on_full_domain():
    xs = np.linspace(-50.0, 50.0, 2001)
    ref = np.array([float(mpmath.besselj(0, x)) for x in xs])
    assert np.max(np.abs(bessel_j0(xs) - ref)) <= 1e-9
    scalar = np.array([bessel_j0(float(x)) for x in xs])
    assert np.max(np.abs(scalar - ref)) <= 1e-9


@pytest.mark.parametrize("x", [50.5, -51.0, float("inf"), float("nan")])
def test_j0_domain(x):
    with pytest.raises(DomainError):
        bessel_j0(x)
    with pytest.raises(DomainError):
        bessel_j0(np.array([0.0, x]))


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50))
def test_j0_bounded(x):
    assert abs(bessel_j0(x)) <= 1.0


def test_protocol_validation():
    with pytest.raises(ConfigurationError):
        DriveProtocol(omega=10, tau=30, delay=25.5, t_half=40)  # exp(-T^2/tau^2) = 0.17
    with pytest.raises(ConfigurationError):
        DriveProtocol(omega=-1, tau=30, delay=25.5, t_half=60)
    with pytest.raises(ConfigurationError):
        check_drive_regime(DriveProtocol(omega=4.0, tau=30, delay=25.5, t_half=60), ChainSpec(3))
    p = DriveProtocol.from_ratios()
    assert (p.omega, p.tau, p.delay, p.t_half, p.transit_time) == (10.0, 30.0, 25.5, 60.0, 120.0)


def test_envelope_at_centre(ref_chain, ref_protocol):
    ax, ay = envelopes(0.0, ref_protocol, ref_chain)
    expected = 2.405 * (1.0 - math.exp(-(0.425**2)))
    assert ref_chain.a * ax / ref_protocol.omega == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.39743, abs=1e-5)
    assert ay == 0.0


def test_envelope_asymptotes(ref_protocol):
    chain = ChainSpec(19, a=0.7, b=0.3)
    for t in (-1e4, 1e4):
        ax, ay = envelopes(t, ref_protocol, chain)
        assert chain.a * ax / ref_protocol.omega == pytest.approx(2.405, abs=1e-15)
        assert abs(chain.b * ay / ref_protocol.omega) < 1e-15


def test_forces(ref_chain, ref_protocol):
    w = ref_protocol.omega
    fx, fy = force_components(math.pi / (2 * w), ref_protocol, ref_chain)
    assert abs(fx) < 1e-13 and abs(fy) < 1e-13
    fx, fy = force_components(0.0, ref_protocol, ref_chain)
    assert fx == envelopes(0.0, ref_protocol, ref_chain)[0] and fy == 0.0
    t = np.linspace(-60, 60, 997)
    fx, fy = force_components(t, ref_protocol, ref_chain)
    ax, ay = envelopes(t, ref_protocol, ref_chain)
    ok = (np.abs(ax) > 1e-9) & (np.abs(ay) > 1e-9) & (np.abs(fx) > 1e-9)
    assert np.allclose(fx[ok] / ax[ok], fy[ok] / ay[ok], rtol=1e-12, atol=0)


@pytest.mark.parametrize("t0,t1", [(-60.0, -55.3), (-3.0, 4.1), (10.0, 60.0)])
def test_force_integrals_are_antiderivatives(ref_chain, ref_protocol, t0, t1):
    x0, y0 = force_integrals(t0, ref_protocol, ref_chain)
    x1, y1 = force_integrals(t1, ref_protocol, ref_chain)
    fx = lambda s: force_components(s, ref_protocol, ref_chain)[0]
    fy = lambda s: force_components(s, ref_protocol, ref_chain)[1]
    ix = quad(fx, t0, t1, limit=2000, epsabs=1e-11, epsrel=1e-11)[0]
    iy = quad(fy, t0, t1, limit=2000, epsabs=1e-11, epsrel=1e-11)[0]
    assert x1 - x0 == pytest.approx(ix, abs=1e-10)
    assert y1 - y0 == pytest.approx(iy, abs=1e-10)


def test_force_integrals_constant_drive(ref_chain):
    p = DriveProtocol(omega=10.0, tau=1.0, delay=0.0, t_half=20.0, envelope="constant")
    t = np.linspace(0, 3, 50)
    x, y = force_integrals(t, p, ref_chain)
    assert np.allclose(x, 2.405 * np.sin(10 * t), atol=1e-14)
    assert np.all(y == 0)


def test_gamma_triple_arithmetic(ref_chain):
    p = DriveProtocol(omega=10.0, tau=30, delay=25.5, t_half=60)
    g = gamma_triple(10.0, 5.0, ChainSpec(3, a=1.0, b=1.0), p)
    assert g == pytest.approx((1.5, 0.5, 2.0), abs=1e-15)
    g = gamma_triple(7.0, 0.0, ref_chain, p)
    assert g.gamma1 == g.gamma2 == g.gamma3 / 2


def test_gamma_triple_frozen_asymptote(ref_chain, ref_protocol):
    ax, ay = envelopes(1e4, ref_protocol, ref_chain)
    g = gamma_triple(ax, ay, ref_chain, ref_protocol)
    assert g.gamma1 == pytest.approx(CDT_INDEX, abs=1e-14)
    assert g.gamma2 == pytest.approx(CDT_INDEX, abs=1e-14)


def test_effective_couplings_examples(ref_chain, ref_protocol):
    c = effective_couplings(ref_protocol.delay / 2, ref_chain, ref_protocol)
    assert c.theta_odd == pytest.approx(1.0, abs=1e-15)
    for t in (-1e4, 1e4):
        c = effective_couplings(t, ref_chain, ref_protocol)
        assert abs(c.theta_odd) <= 2e-4 and abs(c.theta_even) <= 2e-4
    c = effective_couplings(-ref_protocol.t_half, ref_chain, ref_protocol)
    assert c.theta_odd / c.theta_even < 0.05


def test_sigma_with_vanishing_drive():
    chain = ChainSpec(5, j_nnn=0.1)
    p = DriveProtocol(omega=10.0, tau=30, delay=0.0, t_half=60)
    c = effective_couplings(0.0, chain, p)
    assert c.sigma == 0.1 and c.theta_odd == 1.0 and c.theta_even == 1.0


@pytest.mark.parametrize("ratios", [(60, 0.5, 0.85), (40, 0.4, 1.0), (80, 0.3, 0.6)])
def test_envelope_identity(ratios):
    jt, tau_t, d_tau = ratios
    j = 1.3
    chain = ChainSpec(19, j_nn=j, j_nnn=0.05, a=0.8, b=2.5)
    p = DriveProtocol.from_ratios(j=j, jt=jt, tau_over_t=tau_t, delay_over_tau=d_tau)
    t = np.linspace(-p.t_half, p.t_half, 1000)
    c = effective_couplings(t, chain, p)
    assert np.max(np.abs(c.theta_odd - pulse_profile(t - p.delay / 2, p, j))) < 1e-12 * j
    assert np.max(np.abs(c.theta_even - pulse_profile(t + p.delay / 2, p, j))) < 1e-12 * j
    ax, ay = envelopes(t, p, chain)
    g = gamma_triple(ax, ay, chain, p)
    assert np.allclose(g.gamma3, g.gamma1 + g.gamma2, rtol=0, atol=1e-14)
    mirrored = effective_couplings(-t, chain, p)
    assert np.allclose(c.theta_odd, mirrored.theta_even, rtol=0, atol=1e-15)
    assert np.all(np.abs(c.sigma) <= abs(chain.j_nnn))
    assert np.all(np.abs(c.theta_odd) <= j) and np.all(np.abs(c.theta_even) <= j)


@settings(max_examples=60, deadline=None)
@given(t=st.floats(-200, 200), d_tau=st.floats(-1.5, 1.5))
def test_time_mirror_property(t, d_tau):
    p = DriveProtocol.from_ratios(delay_over_tau=d_tau)
    chain = ChainSpec(5)
    a = effective_couplings(t, chain, p)
    b = effective_couplings(-t, chain, p)
    assert a.theta_odd == pytest.approx(b.theta_even, abs=1e-14)
