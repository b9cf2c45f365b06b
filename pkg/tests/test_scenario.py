"""Unit tests for scenarios: time grids, validation, file round trips, constants."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from chargedamp import (
    CODATA,
    BadStrideError,
    BadWindowError,
    ExponentialProfile,
    Fields,
    LinearMass,
    MassNonPositiveError,
    RampProfile,
    Scenario,
    SinusoidalProfile,
    SoftplusMass,
    TimeGrid,
    ValidationError,
    gaas_scenario,
    load_scenario,
    save_scenario,
    scenario_from_mobility,
    validate_scenario,
    with_mass_model,
)


def test_time_grid_from_stride():
    grid = TimeGrid.from_stride(0.0, 1e-9, 1e-10)
    assert len(grid) == 11
    assert grid.t_start == 0.0
    assert grid.t_end == 1e-9
    assert np.all(np.diff(grid.samples) > 0)


def test_time_grid_from_stride_rounds_to_nearest_step_count():
    # 1e-9 / 3e-10 = 3.33 -> 3 steps, endpoint kept exactly
    grid = TimeGrid.from_stride(0.0, 1e-9, 3e-10)
    assert len(grid) == 4
    assert grid.t_end == 1e-9


def test_time_grid_accepts_nonuniform_samples():
    grid = TimeGrid(np.array([0.0, 1e-12, 5e-12, 6e-12]))
    assert len(grid) == 4
    assert grid.t_end == 6e-12


def test_time_grid_errors():
    with pytest.raises(BadWindowError):
        TimeGrid.from_stride(1e-9, 0.0, 1e-10)
    with pytest.raises(BadStrideError):
        TimeGrid.from_stride(0.0, 1e-9, -1e-10)
    with pytest.raises(BadStrideError):
        TimeGrid.from_count(0.0, 1e-9, 1)
    with pytest.raises(BadWindowError):
        TimeGrid(np.array([0.0]))
    with pytest.raises(BadWindowError):
        TimeGrid(np.array([0.0, 2e-12, 1e-12]))


def test_scenario_grid_matches_stride_constructor():
    s = gaas_scenario()
    np.testing.assert_array_equal(s.grid().samples,
                                  TimeGrid.from_stride(s.t_start, s.t_end, s.output_stride).samples)


def test_gaas_scenario_reference_values():
    s = gaas_scenario()
    assert s.charge == -CODATA.elementary_charge
    assert s.mass_model.m0 == pytest.approx(0.067 * CODATA.electron_mass, rel=1e-15)
    # omega_ref = q*B0/m0: negative for the electron
    assert s.omega_ref == pytest.approx(-105004179747.59183, rel=1e-12)
    # linear law with k=0.25 starts at a quarter of the reference mass
    assert s.initial_mass() == pytest.approx(0.25 * s.mass_model.m0, rel=1e-15)
    assert validate_scenario(s) is s


def test_gaas_scenario_mass_kinds():
    assert gaas_scenario("constant").mass_model.kind == "constant"
    assert gaas_scenario("kanai_caldirola").mass_model.kind == "kanai_caldirola"
    assert gaas_scenario("log_interp").mass_model.kind == "log_interp"
    with pytest.raises(ValidationError):
        gaas_scenario("quadratic")


def test_scenario_from_mobility():
    # Drude: tau = mu * m* / e; GaAs-like numbers land on ~56 ps
    tau = scenario_from_mobility(148.0, 0.067)
    assert tau == pytest.approx(5.637870810695771e-11, rel=1e-15)
    assert 5.5e-11 < tau < 5.8e-11
    with pytest.raises(ValidationError):
        scenario_from_mobility(-1.0, 0.067)
    with pytest.raises(ValidationError):
        scenario_from_mobility(148.0, 0.0)


def test_validate_scenario_window_and_stride():
    s = gaas_scenario()
    with pytest.raises(BadWindowError):
        validate_scenario(replace(s, t_end=s.t_start))
    with pytest.raises(BadStrideError):
        validate_scenario(replace(s, output_stride=0.0))
    with pytest.raises(BadStrideError, match="exceeds the window"):
        validate_scenario(replace(s, output_stride=1.0))
    # first violated category wins the type; message carries both problems
    with pytest.raises(BadWindowError, match="stride"):
        validate_scenario(replace(s, t_end=-1.0, output_stride=0.0))


def test_validate_scenario_mass_positivity():
    s = gaas_scenario()
    dying = with_mass_model(s, LinearMass(m0=s.mass_model.m0, tau=5.6e-11, k=0.0))
    with pytest.raises(MassNonPositiveError) as excinfo:
        validate_scenario(dying)
    assert excinfo.value.t == 0.0


def test_with_mass_model_keeps_everything_else():
    s = gaas_scenario()
    swapped = with_mass_model(s, SoftplusMass(m0=s.mass_model.m0, tau=5.6e-11))
    assert swapped.mass_model.kind == "log_interp"
    assert swapped.field_config == s.field_config
    assert swapped.initial_velocity == s.initial_velocity


def test_save_load_round_trip_is_exact(tmp_path):
    """Floats are written with repr, so the round trip must be bit-exact."""
    s = gaas_scenario()
    path = tmp_path / "gaas.ini"
    save_scenario(s, path)
    assert load_scenario(path) == s


def test_save_load_round_trip_with_all_profiles(tmp_path):
    s = Scenario(
        charge=1.602176634e-19,
        mass_model=SoftplusMass(m0=9.11e-31, tau=2.3e-11),
        field_config=Fields(
            Ex=12.5, Ey=-3.75, B0=0.08, kappa0=1.25e-11,
            b_profile=SinusoidalProfile(amplitude=0.3, angular_frequency=7.5e10, phase=0.1),
            kappa_profile=RampProfile(slope=2e9),
            ex_profile=ExponentialProfile(rate_constant=-1e9),
        ),
        initial_position=(1e-8, -2e-8),
        initial_velocity=(150.0, -3700.0),
        t_start=1e-12,
        t_end=7e-10,
        output_stride=1e-12,
    )
    path = tmp_path / "rich.ini"
    save_scenario(s, path)
    assert load_scenario(path) == s


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        load_scenario(tmp_path / "nope.ini")


def test_load_scenario_missing_section(tmp_path):
    path = tmp_path / "broken.ini"
    path.write_text("[particle]\ncharge = -1.6e-19\n")
    with pytest.raises(ValidationError, match="missing section"):
        load_scenario(path)


def test_load_scenario_bad_number(tmp_path):
    s = gaas_scenario()
    path = tmp_path / "bad.ini"
    save_scenario(s, path)
    text = path.read_text().replace("b0 = 0.04", "b0 = forty")
    path.write_text(text)
    with pytest.raises(ValidationError):
        load_scenario(path)


def test_physical_constants_validation():
    from chargedamp import PhysicalConstants

    with pytest.raises(ValueError):
        PhysicalConstants(elementary_charge=-1.0)
