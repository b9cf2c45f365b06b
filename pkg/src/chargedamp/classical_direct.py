"""Direct ODE integration of the damped charged-particle models.

Two second-order models are integrated in first-order form (x, y, vx, vy):

* Newtonian drag: constant mass m0 with an explicit friction force,

      m0*ax = q*(Ex + vy*B) - (m0/tau)*vx
      m0*ay = q*(Ey - vx*B) - (m0/tau)*vy

* variable mass: the friction is carried by the growing mass m(t),

      m*ax = q*(Ex + Bdot*y/2 + vy*B) - kappa*x/4 - mdot*vx
      m*ay = q*(Ey - Bdot*x/2 - vx*B) - kappa*y/4 - mdot*vy

  which is the full force law of the quadratic Hamiltonian in the
  symmetric gauge: Lorentz force, induced electric field from a
  time-varying B, optional harmonic confinement, and the mdot*v drag
  that replaces the Newtonian friction term.

The variable-mass route is the brute-force oracle for the canonical
(symplectic-map) solver, so its default tolerances are tight.  Closed-form
stationary-state evaluators and the saturation-time measure used in the
relaxation comparisons live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DivisionDomainError, StepFailureError, WrongModelError
from .mass_models import LinearMass
from .scenario import Scenario, TimeGrid

__all__ = [
    "KinematicState",
    "Trajectory",
    "IntegratorConfig",
    "integrate_newtonian",
    "integrate_variable_mass",
    "stationary_velocity_general",
    "stationary_velocity_ltdmm",
    "saturation_time",
]


@dataclass(frozen=True)
class KinematicState:
    t: float  # s
    x: float  # m
    y: float  # m
    vx: float  # m/s
    vy: float  # m/s


@dataclass(frozen=True)
class Trajectory:
    """Sampled kinematics on the output grid; indexable like a list of states."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray

    def __len__(self) -> int:
        return int(self.t.size)

    def __getitem__(self, i: int) -> KinematicState:
        return KinematicState(
            t=float(self.t[i]), x=float(self.x[i]), y=float(self.y[i]),
            vx=float(self.vx[i]), vy=float(self.vy[i]),
        )

    def speed(self) -> np.ndarray:
        return np.hypot(self.vx, self.vy)

    def positions(self) -> np.ndarray:
        """(n, 2) array of (x, y)."""
        return np.column_stack([self.x, self.y])

    def velocities(self) -> np.ndarray:
        """(n, 2) array of (vx, vy)."""
        return np.column_stack([self.vx, self.vy])


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for the direct integrators.

    method "rk45" uses adaptive RK45; "rk4" is a fixed-step classic
    Runge-Kutta retained for convergence studies (step = max_step, or one
    step per output interval if unset).  abs_tol None picks
    1e-12 * max(initial speed, 1 m/s) for velocities (positions scaled by
    the window length).
    """

    method: str = "rk45"
    rel_tol: float = 1e-10
    abs_tol: float | None = None
    max_step: float | None = None

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be positive")
        if self.abs_tol is not None and not (self.abs_tol > 0.0):
            raise ValueError("abs_tol must be positive when given")
        if self.max_step is not None and not (self.max_step > 0.0):
            raise ValueError("max_step must be positive when given")


DEFAULT_INTEGRATOR = IntegratorConfig()


def _solve_on_grid(rhs, state0, grid: TimeGrid, config: IntegratorConfig) -> np.ndarray:
    """Integrate rhs over the grid; returns states with shape (4, n)."""
    if config.method == "rk4":
        return _rk4_on_grid(rhs, state0, grid, config.max_step)
    if config.abs_tol is None:
        vel_scale = 1e-12 * max(math.hypot(state0[2], state0[3]), 1.0)
        window = grid.t_end - grid.t_start
        atol = np.array([vel_scale * window, vel_scale * window, vel_scale, vel_scale])
    else:
        atol = config.abs_tol
    sol = solve_ivp(
        rhs,
        (grid.t_start, grid.t_end),
        state0,
        method="RK45",
        t_eval=grid.samples,
        rtol=config.rel_tol,
        atol=atol,
        max_step=config.max_step if config.max_step is not None else np.inf,
    )
    if not sol.success:
        raise StepFailureError(f"adaptive integration failed: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise StepFailureError("adaptive integration produced non-finite state")
    return sol.y


def _rk4_step(rhs, t, state, h):
    k1 = np.asarray(rhs(t, state))
    k2 = np.asarray(rhs(t + 0.5 * h, state + 0.5 * h * k1))
    k3 = np.asarray(rhs(t + 0.5 * h, state + 0.5 * h * k2))
    k4 = np.asarray(rhs(t + h, state + h * k3))
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_on_grid(rhs, state0, grid: TimeGrid, max_step: float | None) -> np.ndarray:
    states = np.empty((4, len(grid)))
    state = np.asarray(state0, dtype=float)
    states[:, 0] = state
    ts = grid.samples
    for i in range(len(grid) - 1):
        dt = ts[i + 1] - ts[i]
        n_sub = 1 if max_step is None else max(1, int(math.ceil(dt / max_step)))
        h = dt / n_sub
        t = ts[i]
        for _ in range(n_sub):
            state = _rk4_step(rhs, t, state, h)
            t += h
        states[:, i + 1] = state
    if not np.all(np.isfinite(states)):
        raise StepFailureError("fixed-step integration produced non-finite state")
    return states


def _initial_state(scenario: Scenario) -> np.ndarray:
    x0, y0 = scenario.initial_position
    vx0, vy0 = scenario.initial_velocity
    return np.array([x0, y0, vx0, vy0], dtype=float)


def _package(grid: TimeGrid, states: np.ndarray) -> Trajectory:
    return Trajectory(t=grid.samples.copy(), x=states[0], y=states[1], vx=states[2], vy=states[3])


def integrate_newtonian(
    scenario: Scenario, grid: TimeGrid | None = None, config: IntegratorConfig = DEFAULT_INTEGRATOR
) -> Trajectory:
    """Constant-mass drag model using the mass law's reference m0 and tau.

    The drag coefficient is m0/tau, so the mass model must carry a drag
    time; the induced-field and confinement terms of the variable-mass
    Hamiltonian are deliberately absent here (this is the force-level
    reference the mass-transport models are compared against).
    """
    if scenario.mass_model.tau is None:
        raise WrongModelError("the Newtonian drag model needs a mass law with a drag time tau")
    grid = scenario.grid() if grid is None else grid
    q = scenario.charge
    m0 = scenario.mass_model.m0
    drag = m0 / scenario.mass_model.tau
    cfg = scenario.field_config

    def rhs(t, state):
        x, y, vx, vy = state
        B = cfg.B0 * cfg.b_profile.value(t)
        Ex = cfg.Ex * cfg.ex_profile.value(t)
        Ey = cfg.Ey * cfg.ey_profile.value(t)
        ax = (q * (Ex + vy * B) - drag * vx) / m0
        ay = (q * (Ey - vx * B) - drag * vy) / m0
        return (vx, vy, ax, ay)

    return _package(grid, _solve_on_grid(rhs, _initial_state(scenario), grid, config))


def integrate_variable_mass(
    scenario: Scenario, grid: TimeGrid | None = None, config: IntegratorConfig = DEFAULT_INTEGRATOR
) -> Trajectory:
    """Variable-mass model: drag carried by mdot, full gauge-consistent forces."""
    grid = scenario.grid() if grid is None else grid
    q = scenario.charge
    mass = scenario.mass_model
    cfg = scenario.field_config
    has_kappa = cfg.kappa0 != 0.0

    def rhs(t, state):
        x, y, vx, vy = state
        m = mass.mass(t)
        mdot = mass.mass_rate(t)
        B = cfg.B0 * cfg.b_profile.value(t)
        Bdot = cfg.B0 * cfg.b_profile.rate(t)
        Ex = cfg.Ex * cfg.ex_profile.value(t)
        Ey = cfg.Ey * cfg.ey_profile.value(t)
        fx = q * (Ex + 0.5 * Bdot * y + vy * B) - mdot * vx
        fy = q * (Ey - 0.5 * Bdot * x - vx * B) - mdot * vy
        if has_kappa:
            kappa = cfg.kappa0 * cfg.kappa_profile.value(t)
            fx -= 0.25 * kappa * x
            fy -= 0.25 * kappa * y
        return (vx, vy, fx / m, fy / m)

    return _package(grid, _solve_on_grid(rhs, _initial_state(scenario), grid, config))


def stationary_velocity_general(mdot: float, B: float, Ex: float, Ey: float, q: float) -> tuple[float, float]:
    """Drift velocity with vanishing acceleration: mdot*v = q*(E + v x B).

    Written in the singularity-free form
        vx = q*(mdot*Ex + q*B*Ey) / (mdot^2 + q^2*B^2),
        vy = q*(mdot*Ey - q*B*Ex) / (mdot^2 + q^2*B^2),
    which covers the drag-only limit (B=0) and the pure-drift limit
    (mdot=0, giving E x B / B^2).  Undefined only when both mdot and q*B
    vanish.
    """
    denom = mdot * mdot + (q * B) ** 2
    if denom == 0.0:
        raise DivisionDomainError("stationary velocity undefined: mdot = 0 and q*B = 0")
    vx = q * (mdot * Ex + q * B * Ey) / denom
    vy = q * (mdot * Ey - q * B * Ex) / denom
    return vx, vy


def stationary_velocity_ltdmm(scenario: Scenario) -> tuple[float, float]:
    """Closed-form terminal velocity of the linear mass law.

    With mdot = m0/tau and w := q*B0*tau/m0 (reference cyclotron frequency
    times drag time):
        vx = (q*tau/m0)*(Ex + w*Ey) / (1 + w^2),
        vy = (q*tau/m0)*(Ey - w*Ex) / (1 + w^2).
    Identical to stationary_velocity_general(m0/tau, ...) for every k.
    """
    model = scenario.mass_model
    if not isinstance(model, LinearMass):
        raise WrongModelError("stationary_velocity_ltdmm needs a linear mass law")
    cfg = scenario.field_config
    q, m0, tau = scenario.charge, model.m0, model.tau
    w = q * cfg.B0 * tau / m0
    mobility = q * tau / m0
    denom = 1.0 + w * w
    vx = mobility * (cfg.Ex + w * cfg.Ey) / denom
    vy = mobility * (cfg.Ey - w * cfg.Ex) / denom
    return vx, vy


def saturation_time(traj: Trajectory, v_terminal: tuple[float, float], fraction: float = 0.99) -> float:
    """First grid time after which |v(t) - v_terminal| stays within (1-fraction)*|v_terminal|.

    The gap is measured in the vector norm (not speed difference), so a
    velocity spiralling around the terminal drift counts as unsaturated
    until its whole excursion fits in the band.  Returns the first sample
    after the last excursion; t[0] if always inside; inf if still outside
    at the end of the window.
    """
    if not (0.0 < fraction < 1.0):
        raise ValueError("fraction must be in (0, 1)")
    vx_inf, vy_inf = v_terminal
    band = (1.0 - fraction) * math.hypot(vx_inf, vy_inf)
    if band == 0.0:
        raise ValueError("terminal velocity is zero; saturation band is empty")
    gap = np.hypot(traj.vx - vx_inf, traj.vy - vy_inf)
    outside = np.nonzero(gap > band)[0]
    if outside.size == 0:
        return float(traj.t[0])
    last = int(outside[-1])
    if last == len(traj) - 1:
        return float("inf")
    return float(traj.t[last + 1])
