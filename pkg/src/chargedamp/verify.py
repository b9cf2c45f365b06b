"""Built-in verification suite: every cross-route claim as a timed check.

Each check is a standalone function returning one :class:`CheckResult`
with a measured number, the tolerance it must meet, and the wall time of
the computation that the runtime budget refers to.  Parameter solutions
shared by several checks (symplecticity, hyperbola identity) are
prepared lazily in a module-level cache outside the timed region; the
solve cost is charged to the route-equivalence and map checks that
exercise the solver directly.

Run everything with :func:`run_verification`, or through the CLI as
``chargedamp verify``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import trapezoid

from .canonical import (
    CanonicalConfig,
    classical_trajectory_canonical,
    closed_form_constant_field,
    hyperbola_residual,
    solve_parameters,
    symplecticity_defect,
)
from .classical_direct import (
    integrate_newtonian,
    integrate_variable_mass,
    saturation_time,
    stationary_velocity_ltdmm,
)
from .fields import SinusoidalProfile
from .mass_models import ExponentialMass, SoftplusMass, asymptotic_interpolation_check
from .quantum import (
    Grid2D,
    default_packet_spec,
    grid_norm,
    packet_center,
    propagate_via_green,
    psi,
    psi_from_params,
    sigma,
)
from .scenario import Scenario, TimeGrid, gaas_scenario, with_mass_model

__all__ = [
    "CheckResult",
    "run_verification",
    "ALL_CHECKS",
    "variable_field_scenario",
    "constant_field_scenario",
    "check_terminal_velocity",
    "check_saturation_ordering",
    "check_exponential_mass_damping",
    "check_route_equivalence",
    "check_symplecticity",
    "check_constant_field_map",
    "check_hyperbola_identity",
    "check_angle_identities",
    "check_packet_width_and_norm",
    "check_ehrenfest",
    "check_green_consistency",
    "check_mass_asymptotics",
]


@dataclass(frozen=True)
class CheckResult:
    """One verification outcome: a number against a tolerance, plus timing."""

    name: str
    passed: bool
    measured: float
    tolerance: float
    seconds: float
    budget: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status}  {self.name}: measured {self.measured:.3e} "
            f"(tol {self.tolerance:.1e}) in {self.seconds:.2f} s (budget {self.budget:g} s)"
        )
        if self.detail:
            text += f" -- {self.detail}"
        return text


def variable_field_scenario() -> Scenario:
    """GaAs-like scenario with a sinusoidally modulated B, short window.

    B(t) = B0*(1 + 0.2 sin(5e10 t)) drives the shear coordinate eta away
    from zero, which is the regime where the hyperbola identity and the
    symplecticity of the assembled map are non-trivial.  The 25 ps window
    stops well short of the first focusing caustic (near 35 ps), where
    this coordinate chart blows up.
    """
    base = gaas_scenario(mass_kind="linear", k=1.0)
    fields = replace(
        base.field_config,
        b_profile=SinusoidalProfile(amplitude=0.2, angular_frequency=5.0e10),
    )
    return replace(base, field_config=fields, t_end=25e-12, output_stride=25e-15)


def constant_field_scenario() -> Scenario:
    """Constant mass, constant B, no E: one closed cyclotron period."""
    base = gaas_scenario(mass_kind="constant")
    period = 2.0 * math.pi / abs(base.omega_ref)
    fields = replace(base.field_config, Ex=0.0, Ey=0.0)
    return replace(
        base,
        field_config=fields,
        initial_velocity=(3.7e3, 0.0),
        t_end=period,
        output_stride=period / 999.0,
    )


# Lazily built, shared parameter solutions (1000 samples each).
_cache: dict[str, object] = {}


def _shared_solution(key: str):
    if key not in _cache:
        if key == "gaas":
            scenario = gaas_scenario()
            grid = TimeGrid.from_count(0.0, 5e-9, 1000)
        elif key == "variable_b":
            scenario = variable_field_scenario()
            grid = TimeGrid.from_count(0.0, scenario.t_end, 1000)
        elif key == "constant":
            scenario = constant_field_scenario()
            grid = TimeGrid.from_count(0.0, scenario.t_end, 1000)
        else:
            raise KeyError(key)
        _cache[key] = solve_parameters(scenario, grid)
    return _cache[key]


def _relative_gap(vx: float, vy: float, target: tuple[float, float]) -> float:
    return math.hypot(vx - target[0], vy - target[1]) / math.hypot(*target)


def check_terminal_velocity() -> CheckResult:
    """Long-time velocities of both drag models against the closed-form drift."""
    scenario = gaas_scenario()
    start = time.perf_counter()
    v_inf = stationary_velocity_ltdmm(scenario)
    newtonian = integrate_newtonian(scenario)
    linear = integrate_variable_mass(scenario)
    rel_newtonian = _relative_gap(newtonian.vx[-1], newtonian.vy[-1], v_inf)
    rel_linear = _relative_gap(linear.vx[-1], linear.vy[-1], v_inf)
    seconds = time.perf_counter() - start
    measured = max(rel_newtonian, rel_linear)
    return CheckResult(
        name="terminal-velocity-closed-form",
        passed=measured < 5e-3 and seconds < 2.0,
        measured=measured,
        tolerance=5e-3,
        seconds=seconds,
        budget=2.0,
        detail=f"newtonian {rel_newtonian:.2e}, linear-mass {rel_linear:.2e} at t=10 ns",
    )


def check_saturation_ordering() -> CheckResult:
    """Newtonian saturates by 1.5 ns, linear mass in [1.5, 4] ns, in that order."""
    scenario = gaas_scenario()
    start = time.perf_counter()
    v_inf = stationary_velocity_ltdmm(scenario)
    sat_newtonian = saturation_time(integrate_newtonian(scenario), v_inf)
    sat_linear = saturation_time(integrate_variable_mass(scenario), v_inf)
    seconds = time.perf_counter() - start
    ordered = (
        sat_newtonian <= 1.5e-9
        and 1.5e-9 <= sat_linear <= 4e-9
        and sat_newtonian < sat_linear
    )
    return CheckResult(
        name="saturation-ordering",
        passed=ordered and seconds < 2.0,
        measured=sat_linear,
        tolerance=4e-9,
        seconds=seconds,
        budget=2.0,
        detail=(
            f"newtonian {sat_newtonian:.2e} s (<= 1.5e-9), "
            f"linear-mass {sat_linear:.2e} s (in [1.5e-9, 4e-9])"
        ),
    )


def check_exponential_mass_damping() -> CheckResult:
    """Exponential mass kills the velocity: |v(20 tau)| under 1% of the drift."""
    base = gaas_scenario()
    tau = base.mass_model.tau
    start = time.perf_counter()
    drift_speed = math.hypot(*stationary_velocity_ltdmm(base))
    damped = replace(
        with_mass_model(base, ExponentialMass(m0=base.mass_model.m0, tau=tau)),
        t_end=20.0 * tau,
        output_stride=tau / 5.0,
    )
    trajectory = integrate_variable_mass(damped)
    final_speed = math.hypot(trajectory.vx[-1], trajectory.vy[-1])
    seconds = time.perf_counter() - start
    measured = final_speed / drift_speed
    return CheckResult(
        name="exponential-mass-damping",
        passed=measured < 1e-2 and seconds < 1.0,
        measured=measured,
        tolerance=1e-2,
        seconds=seconds,
        budget=1.0,
        detail=f"|v(20 tau)| = {final_speed:.3e} m/s vs drift {drift_speed:.3e} m/s",
    )


def check_route_equivalence() -> CheckResult:
    """Symplectic-map trajectory against direct integration, positions."""
    scenario = gaas_scenario()
    grid = TimeGrid.from_count(0.0, 5e-9, 1001)
    start = time.perf_counter()
    direct = integrate_variable_mass(scenario, grid)
    mapped = classical_trajectory_canonical(scenario, grid)
    scale = float(np.max(np.hypot(direct.x, direct.y)))
    measured = float(np.max(np.hypot(mapped.x - direct.x, mapped.y - direct.y))) / scale
    seconds = time.perf_counter() - start
    return CheckResult(
        name="canonical-vs-direct",
        passed=measured < 1e-6 and seconds < 5.0,
        measured=measured,
        tolerance=1e-6,
        seconds=seconds,
        budget=5.0,
        detail=f"max position gap over [0, 5 ns], relative to {scale:.2e} m",
    )


def _random_maps(n: int, rng: np.random.Generator) -> np.ndarray:
    """Assembled maps for random (theta, delta, eta, gamma, Delta) tuples.

    Delta is drawn at order one (the dimensionless setting), so the raw
    defect is already meaningful without rebalancing.
    """
    theta = rng.uniform(-math.pi, math.pi, n)
    delta = rng.uniform(-3.0, 3.0, n)
    gamma = rng.uniform(-2.0, 2.0, n)
    big_delta = rng.choice([-1.0, 1.0], n) * np.exp(rng.uniform(-1.0, 1.0, n))
    c_th, s_th = np.cos(theta), np.sin(theta)
    c_d, s_d = np.cos(delta), np.sin(delta)
    e_pg, e_mg = np.exp(0.5 * gamma), np.exp(-0.5 * gamma)
    rot = np.zeros((n, 2, 2))
    rot[:, 0, 0] = c_th
    rot[:, 0, 1] = -s_th
    rot[:, 1, 0] = s_th
    rot[:, 1, 1] = c_th
    maps = np.zeros((n, 4, 4))
    maps[:, :2, :2] = (e_mg * c_d)[:, None, None] * rot
    maps[:, :2, 2:] = (e_pg * s_d / big_delta)[:, None, None] * rot
    maps[:, 2:, :2] = (-e_mg * big_delta * s_d)[:, None, None] * rot
    maps[:, 2:, 2:] = (e_pg * c_d)[:, None, None] * rot
    return maps


def check_symplecticity() -> CheckResult:
    """M^T J M = J on three solved scenarios and 1e4 random parameter tuples."""
    solutions = [_shared_solution(k) for k in ("gaas", "variable_b", "constant")]
    start = time.perf_counter()
    worst = 0.0
    for solution in solutions:
        scale = solution.scenario.mass_model.m0 * abs(solution.scenario.omega_ref)
        for map_ in solution.maps():
            worst = max(worst, symplecticity_defect(map_.M, scale))
    rng = np.random.default_rng(20260823)
    maps = _random_maps(10_000, rng)
    j4 = np.array([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ])
    defect = np.einsum("nji,jk,nkl->nil", maps, j4, maps) - j4
    worst = max(worst, float(np.max(np.abs(defect))))
    seconds = time.perf_counter() - start
    return CheckResult(
        name="symplecticity",
        passed=worst < 1e-10 and seconds < 1.0,
        measured=worst,
        tolerance=1e-10,
        seconds=seconds,
        budget=1.0,
        detail="1000 times x 3 scenarios (momentum-rescaled) + 1e4 random tuples",
    )


def check_constant_field_map() -> CheckResult:
    """Assembled map vs the constant-field closed form over one period."""
    scenario = constant_field_scenario()
    solution = _shared_solution("constant")
    start = time.perf_counter()
    m0 = scenario.mass_model.m0
    omega0 = scenario.omega_ref
    scale = m0 * abs(omega0)
    d = np.array([1.0, 1.0, 1.0 / scale, 1.0 / scale])
    balance = d[:, None] / d[None, :]
    entry_gap = 0.0
    for map_ in solution.maps():
        reference = closed_form_constant_field(map_.t, m0, omega0)
        entry_gap = max(entry_gap, float(np.max(np.abs((map_.M - reference.M) * balance))))
    closing = solution.map_at(len(solution) - 1)
    identity_gap = float(np.max(np.abs(closing.M * balance - np.eye(4))))

    trajectory = classical_trajectory_canonical(scenario, solution.grid)
    radius_expected = math.hypot(*scenario.initial_velocity) / abs(omega0)
    # The last sample repeats t=0 (full period), so the orbit centre is the
    # mean over one uniform angular cover.
    cx = float(np.mean(trajectory.x[:-1]))
    cy = float(np.mean(trajectory.y[:-1]))
    radii = np.hypot(trajectory.x - cx, trajectory.y - cy)
    radius_gap = float(np.max(np.abs(radii - radius_expected))) / radius_expected
    seconds = time.perf_counter() - start
    measured = max(entry_gap, identity_gap, radius_gap)
    return CheckResult(
        name="constant-field-map",
        passed=measured < 1e-9 and seconds < 1.0,
        measured=measured,
        tolerance=1e-9,
        seconds=seconds,
        budget=1.0,
        detail=(
            f"entries {entry_gap:.2e}, M(T)=I {identity_gap:.2e}, "
            f"orbit radius {radius_gap:.2e} rel"
        ),
    )


def check_hyperbola_identity() -> CheckResult:
    """Shear-rate hyperbola residual on every solved scenario."""
    solutions = [_shared_solution(k) for k in ("gaas", "variable_b", "constant")]
    start = time.perf_counter()
    worst = 0.0
    for solution in solutions:
        residual = hyperbola_residual(solution.shear)
        worst = max(worst, float(np.nanmax(np.abs(residual))))
    seconds = time.perf_counter() - start
    return CheckResult(
        name="shear-rate-hyperbola",
        passed=worst < 1e-8 and seconds < 1.0,
        measured=worst,
        tolerance=1e-8,
        seconds=seconds,
        budget=1.0,
        detail="non-singular grid points of 3 scenarios",
    )


def check_angle_identities() -> CheckResult:
    """Constant-B identities: theta = -delta, and the linear-mass delta quadrature."""
    scenario = gaas_scenario()
    grid = TimeGrid.from_count(0.0, 1e-10, 1001)
    start = time.perf_counter()
    solution = solve_parameters(scenario, grid, CanonicalConfig(rel_tol=1e-12))
    angle_sum = float(np.max(np.abs(solution.translations.theta + solution.shear.delta)))
    model = scenario.mass_model
    closed = (
        0.5 * scenario.omega_ref * model.tau
        * np.log1p(grid.samples / (model.k * model.tau))
    )
    delta = solution.shear.delta
    rel = float(np.max(np.abs(delta[1:] - closed[1:]) / np.abs(closed[1:])))
    seconds = time.perf_counter() - start
    return CheckResult(
        name="constant-b-angle-identities",
        passed=angle_sum < 1e-10 and rel < 1e-9 and seconds < 1.0,
        measured=angle_sum,
        tolerance=1e-10,
        seconds=seconds,
        budget=1.0,
        detail=f"theta+delta {angle_sum:.2e}; delta vs log quadrature {rel:.2e} rel (tol 1e-9)",
    )


def check_packet_width_and_norm() -> CheckResult:
    """sigma(t_start) = a exactly; unit norm and closed-form width on a grid."""
    scenario = gaas_scenario()
    spec = default_packet_spec(scenario)
    start = time.perf_counter()
    grid = TimeGrid.from_count(0.0, 2e-11, 10)
    solution = solve_parameters(scenario, grid)
    width_exact = sigma(solution.shear.at(0), spec.a, spec.hbar) == spec.a

    grid2d = Grid2D.centered(4e-6, 1201)
    xg, yg = grid2d.mesh()
    norm_gap = 0.0
    for i in range(len(grid)):
        values = psi_from_params(xg, yg, solution.translations.at(i), solution.shear.at(i), spec)
        norm_gap = max(norm_gap, abs(grid_norm(values, grid2d) - 1.0))

    i_wide = 6  # far from launch, away from the first caustic
    values = psi_from_params(
        xg, yg, solution.translations.at(i_wide), solution.shear.at(i_wide), spec
    )
    density = np.abs(values) ** 2

    def moment(weight):
        return float(trapezoid(trapezoid(weight * density, grid2d.x_axis, axis=1), grid2d.y_axis))

    total = moment(1.0)
    mean_x = moment(xg) / total
    mean_y = moment(yg) / total
    variance = moment((xg - mean_x) ** 2 + (yg - mean_y) ** 2) / total
    width_closed = sigma(solution.shear.at(i_wide), spec.a, spec.hbar)
    width_rel = abs(math.sqrt(variance) - width_closed) / width_closed
    seconds = time.perf_counter() - start
    return CheckResult(
        name="packet-width-and-norm",
        passed=width_exact and norm_gap < 1e-6 and width_rel < 1e-5 and seconds < 10.0,
        measured=norm_gap,
        tolerance=1e-6,
        seconds=seconds,
        budget=10.0,
        detail=(
            f"sigma(0)=a exact: {width_exact}; "
            f"quadrature width {width_rel:.2e} rel (tol 1e-5) at t={grid.samples[i_wide]:.2e} s"
        ),
    )


def check_ehrenfest() -> CheckResult:
    """Packet centre follows the matched classical trajectory and velocity curve."""
    scenario = gaas_scenario()
    spec = default_packet_spec(scenario)
    grid = TimeGrid.from_count(0.0, 5e-9, 1001)
    start = time.perf_counter()
    solution = solve_parameters(scenario, grid)
    n = len(grid)
    cx = np.empty(n)
    cy = np.empty(n)
    for i in range(n):
        cx[i], cy[i] = packet_center(solution.translations.at(i), solution.shear.at(i), spec)
    oracle = integrate_variable_mass(scenario, grid)
    scale = float(np.max(np.hypot(oracle.x, oracle.y)))
    center_rel = float(np.max(np.hypot(cx - oracle.x, cy - oracle.y))) / scale

    # Velocities recovered from the centre alone (fourth-order differences on
    # a fine grid) must land on the classical velocity curve.
    fine = TimeGrid.from_count(0.0, 1e-9, 4001)
    fine_solution = solve_parameters(scenario, fine)
    fx = np.empty(len(fine))
    fy = np.empty(len(fine))
    for i in range(len(fine)):
        fx[i], fy[i] = packet_center(fine_solution.translations.at(i), fine_solution.shear.at(i), spec)
    h = float(fine.samples[1] - fine.samples[0])
    vx_fd = (-fx[4:] + 8.0 * fx[3:-1] - 8.0 * fx[1:-3] + fx[:-4]) / (12.0 * h)
    vy_fd = (-fy[4:] + 8.0 * fy[3:-1] - 8.0 * fy[1:-3] + fy[:-4]) / (12.0 * h)
    reference = integrate_variable_mass(scenario, fine)
    speed_scale = float(np.max(np.hypot(reference.vx, reference.vy)))
    velocity_rel = float(np.max(np.hypot(
        vx_fd - reference.vx[2:-2], vy_fd - reference.vy[2:-2]
    ))) / speed_scale
    seconds = time.perf_counter() - start
    return CheckResult(
        name="ehrenfest-correspondence",
        passed=center_rel < 1e-6 and velocity_rel < 1e-4 and seconds < 5.0,
        measured=center_rel,
        tolerance=1e-6,
        seconds=seconds,
        budget=5.0,
        detail=f"centre over [0, 5 ns]; FD centre velocity {velocity_rel:.2e} rel (tol 1e-4)",
    )


def check_green_consistency() -> CheckResult:
    """Kernel quadrature against the closed-form amplitude at two times."""
    scenario = gaas_scenario()
    spec = default_packet_spec(scenario)
    grid2d = Grid2D.centered(1.2e-6, 512)
    xg, yg = grid2d.mesh()
    start = time.perf_counter()
    worst = 0.0
    for t in (13.64e-12, 19.9e-12):
        quadrature = propagate_via_green(scenario, spec, t, grid2d)
        closed = psi(xg, yg, t, scenario, spec)
        amplitude = np.abs(closed)
        mask = amplitude > 1e-3 * float(np.max(amplitude))
        rel = float(np.max(np.abs(quadrature - closed)[mask] / amplitude[mask]))
        worst = max(worst, rel)
    seconds = time.perf_counter() - start
    return CheckResult(
        name="green-kernel-consistency",
        passed=worst < 1e-4 and seconds < 60.0,
        measured=worst,
        tolerance=1e-4,
        seconds=seconds,
        budget=60.0,
        detail="512^2 grid, amplitudes above 1e-3 of peak, t = 13.64 ps and 19.9 ps",
    )


def check_mass_asymptotics() -> CheckResult:
    """Softplus mass approaches the exponential law at -30 tau, linear at +30 tau."""
    base = gaas_scenario()
    m0, tau = base.mass_model.m0, base.mass_model.tau
    model = SoftplusMass(m0=m0, tau=tau)
    start = time.perf_counter()
    exp_ref, _ = asymptotic_interpolation_check(model, -30.0 * tau)
    rel_exp = abs(model.mass(-30.0 * tau) - exp_ref) / exp_ref
    _, linear_ref = asymptotic_interpolation_check(model, 30.0 * tau)
    rel_linear = abs(model.mass(30.0 * tau) - linear_ref) / linear_ref
    seconds = time.perf_counter() - start
    measured = max(rel_exp, rel_linear)
    return CheckResult(
        name="mass-model-asymptotics",
        passed=measured < 1e-12 and seconds < 1.0,
        measured=measured,
        tolerance=1e-12,
        seconds=seconds,
        budget=1.0,
        detail=f"exponential side {rel_exp:.2e}, linear side {rel_linear:.2e}",
    )


ALL_CHECKS = [
    check_terminal_velocity,
    check_saturation_ordering,
    check_exponential_mass_damping,
    check_route_equivalence,
    check_symplecticity,
    check_constant_field_map,
    check_hyperbola_identity,
    check_angle_identities,
    check_packet_width_and_norm,
    check_ehrenfest,
    check_green_consistency,
    check_mass_asymptotics,
]


def run_verification(checks=None, printer=None) -> list[CheckResult]:
    """Run the (selected) checks, optionally printing one line per result."""
    results = []
    for check in checks if checks is not None else ALL_CHECKS:
        result = check()
        results.append(result)
        if printer is not None:
            printer(result.line())
    return results
