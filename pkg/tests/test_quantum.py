"""Unit tests for the Gaussian-packet machinery: amplitudes, kernels, quadrature.

The heaviest check here feeds the closed-form amplitude back into the
time-dependent Schrodinger equation of the underlying Hamiltonian with
finite differences -- an oracle that shares nothing with the parameter
ODEs beyond the field configuration.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from chargedamp import (
    CanonicalConfig,
    Grid2D,
    PacketSpec,
    QuadratureNotConvergedError,
    ShearParams,
    SingularTimeError,
    TimeGrid,
    TranslationParams,
    ValidationError,
    default_packet_spec,
    ehrenfest_residual,
    gaas_scenario,
    greens_function,
    grid_norm,
    homogeneous_center_residual,
    integrate_variable_mass,
    packet_center,
    params_at_time,
    propagate_via_green,
    psi,
    sigma,
    solve_parameters,
)
from chargedamp.quantum import density_from_params, greens_from_params, psi_from_params
from chargedamp.verify import variable_field_scenario


def test_default_packet_spec_matches_initial_velocity():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    assert spec.a == 50e-9
    assert spec.p_x0 == 0.0
    assert spec.p_y0 == pytest.approx(s.initial_mass() * 3.7e3, rel=1e-15)


def test_initial_amplitude_is_gaussian_times_plane_wave():
    """At t_start the closed form must reduce to i * phi0(x) phi0(y) e^{i p.r/hbar}.

    phi0 is the ground-state-width Gaussian with <rho^2> = a^2, launched at
    the origin (the packet machinery always starts the packet there; the
    scenario's initial_position belongs to the classical routes).
    """
    s = gaas_scenario()
    spec = default_packet_spec(s)
    trans, shear = params_at_time(s, s.t_start)
    rng = np.random.default_rng(3)
    x = rng.uniform(-1e-7, 1e-7, 40)
    y = rng.uniform(-1e-7, 1e-7, 40)
    a, hbar = spec.a, spec.hbar
    oracle = (1j / math.sqrt(math.pi * a * a)) * np.exp(
        -(x * x + y * y) / (2.0 * a * a) + 1j * (spec.p_x0 * x + spec.p_y0 * y) / hbar
    )
    got = psi_from_params(x, y, trans, shear, spec)
    assert np.max(np.abs(got - oracle)) < 1e-13 * np.max(np.abs(oracle))


def test_sigma_starts_exactly_at_packet_width():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    _, shear = params_at_time(s, s.t_start)
    assert sigma(shear, spec.a, spec.hbar) == spec.a  # bitwise, by arrangement


def test_sigma_hand_formula():
    shear = ShearParams(t=1.0, delta=0.3, eta=0.0, gamma=0.4, beta=0.0, Delta=-2e-21)
    a, hbar = 5e-8, 1.054571817e-34
    want = math.sqrt(
        a * a * math.exp(-0.4) * math.cos(0.3) ** 2
        + (hbar / (a * 2e-21)) ** 2 * math.exp(0.4) * math.sin(0.3) ** 2
    )
    assert sigma(shear, a, hbar) == pytest.approx(want, rel=1e-14)


def test_packet_center_starts_at_origin():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    trans, shear = params_at_time(s, s.t_start)
    assert packet_center(trans, shear, spec) == (0.0, 0.0)


def test_density_matches_amplitude_squared():
    """density_from_params is a separate closed form; it must equal |psi|^2."""
    s = gaas_scenario()
    spec = default_packet_spec(s)
    trans, shear = params_at_time(s, 6e-12)
    rng = np.random.default_rng(8)
    x = rng.uniform(-1e-6, 1e-6, 60)
    y = rng.uniform(-1e-6, 1e-6, 60)
    dens = density_from_params(x, y, trans, shear, spec)
    amp2 = np.abs(psi_from_params(x, y, trans, shear, spec)) ** 2
    np.testing.assert_allclose(dens, amp2, rtol=1e-10, atol=0.0)


def test_psi_wrapper_equals_params_route():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    x = np.linspace(-2e-7, 2e-7, 11)
    direct = psi(x, x, 4e-12, s, spec)
    trans, shear = params_at_time(s, 4e-12)
    np.testing.assert_array_equal(direct, psi_from_params(x, x, trans, shear, spec))


def test_params_at_time_guards():
    s = gaas_scenario()
    with pytest.raises(ValidationError):
        params_at_time(s, -1e-12)
    no_b = replace(s, field_config=replace(s.field_config, B0=0.0))
    with pytest.raises(ValidationError):
        params_at_time(no_b, 1e-12)


def _schrodinger_residual(scenario, t0: float, seed: int) -> tuple[float, float]:
    """Finite-difference TDSE residual of the closed-form amplitude.

    i*hbar dpsi/dt and H psi are built independently: the time derivative
    from a 2-point central difference of the amplitude (parameters solved
    once, on a 4-sample grid sharing one ODE pass), the Hamiltonian side
    from 5-point spatial stencils plus the potentials of the field
    configuration.  Returns (max residual, max term magnitude).
    """
    spec = default_packet_spec(scenario)
    hbar, q = spec.hbar, scenario.charge
    h = 1e-15  # s
    d = 3e-9   # m

    grid = TimeGrid(np.array([scenario.t_start, t0 - h, t0, t0 + h]))
    sol = solve_parameters(scenario, grid, CanonicalConfig(rel_tol=1e-12))

    trans2, shear2 = sol.translations.at(2), sol.shear.at(2)
    center = packet_center(trans2, shear2, spec)
    sig = sigma(shear2, spec.a, hbar)
    rng = np.random.default_rng(seed)
    px = center[0] + rng.uniform(-1.2, 1.2, 24) * sig
    py = center[1] + rng.uniform(-1.2, 1.2, 24) * sig

    offsets = np.array([-2, -1, 0, 1, 2]) * d
    w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * d)
    w2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * d * d)

    def amp(i, xs, ys):
        return psi_from_params(xs, ys, sol.translations.at(i), sol.shear.at(i), spec)

    stencil_x = amp(2, px[:, None] + offsets[None, :], np.repeat(py[:, None], 5, axis=1))
    stencil_y = amp(2, np.repeat(px[:, None], 5, axis=1), py[:, None] + offsets[None, :])
    value = stencil_x[:, 2]
    dpsi_dt = (amp(3, px, py) - amp(1, px, py)) / (2.0 * h)

    m = float(scenario.mass_model.mass(t0))
    cfg = scenario.field_config
    ax, ay = cfg.vector_potential(px, py, t0)
    phi = cfg.scalar_potential(px, py, t0)
    kappa = cfg.confinement(t0)
    h_psi = (
        -hbar * hbar / (2.0 * m) * (stencil_x @ w2 + stencil_y @ w2)
        + (1j * hbar * q / m) * (ax * (stencil_x @ w1) + ay * (stencil_y @ w1))
        + (q * q * (ax * ax + ay * ay) / (2.0 * m) + q * phi
           + kappa * (px * px + py * py) / 8.0) * value
    )
    lhs = 1j * hbar * dpsi_dt
    scale = max(float(np.abs(h_psi).max()), float(np.abs(lhs).max()))
    return float(np.abs(lhs - h_psi).max()), scale


def test_amplitude_satisfies_schrodinger_equation_static_b():
    residual, scale = _schrodinger_residual(gaas_scenario(), 6e-12, seed=7)
    assert residual < 1e-5 * scale


def test_amplitude_satisfies_schrodinger_equation_varying_b():
    residual, scale = _schrodinger_residual(variable_field_scenario(), 6e-12, seed=11)
    assert residual < 1e-5 * scale


def test_norm_is_conserved():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    grid2d = Grid2D.centered(3e-6, 601)
    X, Y = grid2d.mesh()
    for t in (0.0, 2e-12, 6e-12):
        values = psi(X, Y, t, s, spec)
        assert grid_norm(values, grid2d) == pytest.approx(1.0, abs=1e-6)


def test_width_growth_matches_sigma():
    """Second moment of |psi|^2 must reproduce sigma(t) (spread through caustics)."""
    s = gaas_scenario()
    spec = default_packet_spec(s)
    t = 6e-12
    trans, shear = params_at_time(s, t)
    grid2d = Grid2D.centered(3e-6, 601)
    X, Y = grid2d.mesh()
    dens = np.abs(psi_from_params(X, Y, trans, shear, spec)) ** 2
    cx, cy = packet_center(trans, shear, spec)
    from scipy.integrate import trapezoid

    rho2 = (X - cx) ** 2 + (Y - cy) ** 2
    second_moment = trapezoid(trapezoid(dens * rho2, grid2d.x_axis, axis=1), grid2d.y_axis, axis=0)
    assert math.sqrt(second_moment) == pytest.approx(sigma(shear, spec.a, spec.hbar), rel=1e-5)


def test_green_quadrature_reproduces_closed_form():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    t = 3e-12
    grid2d = Grid2D.centered(9e-7, 129)
    quad = propagate_via_green(s, spec, t, grid2d)
    X, Y = grid2d.mesh()
    closed = psi_from_params(X, Y, *params_at_time(s, t), spec)
    peak = np.abs(closed).max()
    mask = np.abs(closed) > 1e-3 * peak
    rel = np.max(np.abs(quad - closed)[mask] / np.abs(closed)[mask])
    assert rel < 1e-6


def test_green_quadrature_guards():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    # grid too small for the initial packet
    with pytest.raises(ValidationError, match="packet widths"):
        propagate_via_green(s, spec, 3e-12, Grid2D.centered(1e-7, 64))
    # resolvable extent but hopeless spacing: refinement check must fire
    with pytest.raises(QuadratureNotConvergedError):
        propagate_via_green(s, spec, 3e-12, Grid2D.centered(1.2e-6, 25))


def test_greens_kernel_refuses_caustics():
    trans = TranslationParams(t=1.0, theta=0.0, lambda_x=0.0, lambda_y=0.0,
                              pi_x=0.0, pi_y=0.0, S=0.0)
    shear = ShearParams(t=1.0, delta=math.pi, eta=0.0, gamma=0.0, beta=0.0, Delta=-1e-21)
    with pytest.raises(SingularTimeError):
        greens_from_params(0.0, 0.0, 0.0, 0.0, trans, shear)


def test_greens_function_wrapper():
    s = gaas_scenario()
    xp = np.linspace(-1e-7, 1e-7, 5)
    got = greens_function(0.0, 0.0, 5e-12, xp, xp, s)
    trans, shear = params_at_time(s, 5e-12)
    np.testing.assert_array_equal(got, greens_from_params(0.0, 0.0, xp, xp, trans, shear))


def test_packet_center_follows_classical_trajectory():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    grid = TimeGrid.from_count(0.0, 1e-9, 101)
    residual = ehrenfest_residual(s, spec, grid)
    oracle = integrate_variable_mass(s, grid)
    excursion = np.max(np.hypot(oracle.x, oracle.y))
    assert np.max(residual) < 1e-6 * excursion


def test_homogeneous_center_satisfies_source_free_equation():
    s = gaas_scenario()
    spec = default_packet_spec(s)
    grid = TimeGrid.from_count(0.0, 1e-10, 2001)
    residual, scale = homogeneous_center_residual(s, spec, grid)
    assert np.max(residual[2:-2]) < 1e-3 * scale
    with pytest.raises(ValidationError, match="uniform"):
        homogeneous_center_residual(s, spec, TimeGrid(np.array([0.0, 1e-12, 5e-12])))


def test_grid_norm_flat_field():
    grid2d = Grid2D(x_axis=np.linspace(0.0, 2.0, 41), y_axis=np.linspace(0.0, 3.0, 61))
    values = np.full((61, 41), 0.5 + 0.0j)
    assert grid_norm(values, grid2d) == pytest.approx(0.25 * 6.0, rel=1e-12)


def test_grid2d_validation_and_mesh():
    with pytest.raises(ValidationError):
        Grid2D(x_axis=np.array([0.0]), y_axis=np.array([0.0, 1.0]))
    with pytest.raises(ValidationError):
        Grid2D(x_axis=np.array([0.0, 0.0]), y_axis=np.array([0.0, 1.0]))
    grid2d = Grid2D.centered(1.0, 5, center=(2.0, -1.0))
    assert grid2d.x_axis[0] == 1.0 and grid2d.x_axis[-1] == 3.0
    assert grid2d.y_axis[2] == -1.0
    X, Y = grid2d.mesh()
    assert X.shape == (5, 5)


def test_packet_spec_accepts_custom_width():
    spec = PacketSpec(a=25e-9, p_x0=1e-29, p_y0=-2e-29)
    assert spec.a == 25e-9
    assert spec.hbar > 0
