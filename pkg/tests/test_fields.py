"""Unit tests for field profiles, gauge consistency and the beta reparametrization."""

from __future__ import annotations

import math

import numpy as np
import pytest

from chargedamp import (
    BetaDomainError,
    ConstantMass,
    ConstantProfile,
    ExponentialMass,
    ExponentialProfile,
    Fields,
    RampProfile,
    SinusoidalProfile,
    rotated_field,
    sample_fields,
)
from chargedamp.fields import profile_from_dict

Q = -1.602176634e-19
M0 = 6.1e-32


def _all_profiles():
    return [
        ConstantProfile(),
        ExponentialProfile(rate_constant=-2.5e9),
        SinusoidalProfile(amplitude=0.2, angular_frequency=5e10, phase=0.3),
        RampProfile(slope=3e9),
    ]


def test_profile_rates_match_finite_difference():
    rng = np.random.default_rng(12)
    for profile in _all_profiles():
        for _ in range(10):
            t = float(rng.uniform(-1e-10, 3e-10))
            h = 1e-16
            fd = (profile.value(t + h) - profile.value(t - h)) / (2.0 * h)
            assert abs(profile.rate(t) - fd) < 1e-6 * max(abs(fd), 1e-3)


def test_sinusoidal_profile_frozen_value():
    # 1 + 0.2*sin(5e10*1e-11 + 0.3) = 1 + 0.2*sin(0.8)
    profile = SinusoidalProfile(amplitude=0.2, angular_frequency=5e10, phase=0.3)
    assert float(profile.value(1e-11)) == pytest.approx(1.1434712181799045, rel=1e-15)


def test_profile_round_trip():
    for profile in _all_profiles():
        assert profile_from_dict(profile.to_dict()) == profile


def test_profile_from_dict_rejects_unknown_kind():
    with pytest.raises(ValueError):
        profile_from_dict({"kind": "sawtooth"})


def test_vector_potential_curl_is_b():
    """curl_z A = dAy/dx - dAx/dy must equal B(t); A is linear, so exact."""
    cfg = Fields(Ex=0.0, Ey=0.0, B0=0.04, b_profile=SinusoidalProfile(amplitude=0.3, angular_frequency=2e10))
    d = 1e-6
    for t in (0.0, 3e-11, 1e-10):
        day_dx = (cfg.vector_potential(d, 0.2e-6, t)[1] - cfg.vector_potential(-d, 0.2e-6, t)[1]) / (2 * d)
        dax_dy = (cfg.vector_potential(0.5e-6, d, t)[0] - cfg.vector_potential(0.5e-6, -d, t)[0]) / (2 * d)
        assert day_dx - dax_dy == pytest.approx(cfg.magnetic_field(t), rel=1e-12)


def test_total_field_is_gauge_consistent():
    """E_total must equal -grad(phi) - dA/dt for the stored potentials."""
    cfg = Fields(
        Ex=40.0, Ey=-70.0, B0=0.04,
        b_profile=SinusoidalProfile(amplitude=0.2, angular_frequency=5e10),
        ex_profile=RampProfile(slope=1e9),
    )
    x, y, t = 3e-7, -2e-7, 1.7e-11
    d, h = 1e-9, 1e-16
    grad_x = (cfg.scalar_potential(x + d, y, t) - cfg.scalar_potential(x - d, y, t)) / (2 * d)
    grad_y = (cfg.scalar_potential(x, y + d, t) - cfg.scalar_potential(x, y - d, t)) / (2 * d)
    dat = (cfg.vector_potential(x, y, t + h) - cfg.vector_potential(x, y, t - h)) / (2 * h)
    ex_tot, ey_tot = cfg.total_electric_field(x, y, t)
    assert ex_tot == pytest.approx(-grad_x - dat[0], rel=1e-9)
    assert ey_tot == pytest.approx(-grad_y - dat[1], rel=1e-9)


def test_induced_field_vanishes_for_static_b():
    cfg = Fields(Ex=10.0, Ey=20.0, B0=0.04)
    ind = cfg.induced_electric_field(1e-6, -1e-6, 5e-11)
    assert ind[0] == 0.0 and ind[1] == 0.0
    np.testing.assert_array_equal(cfg.total_electric_field(1e-6, -1e-6, 5e-11),
                                  cfg.uniform_electric_field(5e-11))


def test_rotated_field():
    ex, ey = rotated_field(3.0, 4.0, 0.7)
    assert math.hypot(ex, ey) == pytest.approx(5.0, rel=1e-15)
    # quarter turn maps (Ex, Ey) -> (Ey, -Ex)
    ex, ey = rotated_field(3.0, 4.0, math.pi / 2)
    assert ex == pytest.approx(4.0, abs=1e-15)
    assert ey == pytest.approx(-3.0, abs=1e-15)


def test_sample_fields_static_configuration():
    cfg = Fields(Ex=0.0, Ey=100.0, B0=0.04)
    mass = ConstantMass(m0=M0)
    sample = sample_fields(cfg, mass, Q, 2e-11)
    assert sample.t == 2e-11
    assert sample.B == 0.04
    assert sample.Bdot == 0.0
    assert sample.Ey == 100.0
    assert sample.kappa == 0.0
    assert sample.omega == pytest.approx(Q * 0.04 / M0, rel=1e-15)
    assert sample.beta == 0.0  # log(1) with no confinement: exactly zero
    assert sample.beta_rate == 0.0


def test_sample_fields_exponential_b():
    """With B = B0*e^{rt} and no confinement, beta = r*t and beta_rate = r."""
    r = -3e9
    cfg = Fields(Ex=0.0, Ey=0.0, B0=0.04, b_profile=ExponentialProfile(rate_constant=r))
    sample = sample_fields(cfg, ExponentialMass(m0=M0, tau=5.6e-11), Q, 4e-11)
    assert sample.beta == pytest.approx(r * 4e-11, rel=1e-13)
    assert sample.beta_rate == pytest.approx(r, rel=1e-13)


def test_sample_fields_confinement_shifts_beta():
    # exp(2*beta) = 1 + kappa0/(m0*omega_ref^2) for constant mass/profiles at t=0
    omega_ref = Q * 0.04 / M0
    kappa0 = 0.5 * M0 * omega_ref**2
    cfg = Fields(Ex=0.0, Ey=0.0, B0=0.04, kappa0=kappa0)
    sample = sample_fields(cfg, ConstantMass(m0=M0), Q, 0.0)
    assert sample.beta == pytest.approx(0.5 * math.log(1.5), rel=1e-13)
    assert sample.kappa == pytest.approx(kappa0, rel=1e-15)


def test_sample_fields_domain_errors():
    mass = ConstantMass(m0=M0)
    # confinement without a magnetic reference frequency
    no_b = Fields(Ex=0.0, Ey=0.0, B0=0.0, kappa0=1e-10)
    with pytest.raises(BetaDomainError):
        sample_fields(no_b, mass, Q, 0.0)
    # anti-confinement strong enough to push the log argument negative
    omega_ref = Q * 0.04 / M0
    overturned = Fields(Ex=0.0, Ey=0.0, B0=0.04, kappa0=-2.0 * M0 * omega_ref**2)
    with pytest.raises(BetaDomainError):
        sample_fields(overturned, mass, Q, 0.0)
