"""
Two faces of drag: friction force vs growing inertia
====================================================

A charged carrier in crossed static E and B fields drifts toward the
same stationary velocity whether the dissipation enters as a Newtonian
friction force -(m0/tau) v or as inertia that grows linearly in time.
The transients differ: the friction model spirals in quickly, the
growing-mass model takes a few times longer to settle.  This script
integrates both models for the bundled GaAs-electron scenario and
reports the approach to the closed-form drift.
"""

import numpy as np

from chargedamp import (
    gaas_scenario,
    integrate_newtonian,
    integrate_variable_mass,
    saturation_time,
    stationary_velocity_ltdmm,
)

# The bundled scenario: an electron-like carrier (GaAs effective mass,
# mobility-derived relaxation time) in E = 100 V/m crossed with B = 0.04 T.
scenario = gaas_scenario()
print(f"relaxation time tau = {scenario.mass_model.tau:.3e} s")
print(f"reference cyclotron frequency = {scenario.omega_ref:.4e} rad/s")

# Integrate the two damped models over the 10 ns window of the scenario.
newtonian = integrate_newtonian(scenario)
linear = integrate_variable_mass(scenario)

# The long-time drift follows in closed form from the force balance.
v_inf = stationary_velocity_ltdmm(scenario)
print(f"\nclosed-form drift velocity: vx = {v_inf[0]:.6g} m/s, vy = {v_inf[1]:.6g} m/s")

for name, traj in (("newtonian", newtonian), ("linear mass", linear)):
    gap = np.hypot(traj.vx[-1] - v_inf[0], traj.vy[-1] - v_inf[1])
    rel = gap / np.hypot(*v_inf)
    sat = saturation_time(traj, v_inf)
    print(f"{name:12s} final velocity gap {rel:.2e} relative, saturated by {sat:.2e} s")

# A few sampled velocities to see the transient shapes side by side.
print("\n      t [s]    newtonian vx    linear-mass vx")
for i in range(0, len(newtonian.t), len(newtonian.t) // 8):
    print(f"{newtonian.t[i]:11.2e} {newtonian.vx[i]:15.4f} {linear.vx[i]:17.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, (ax_path, ax_vel) = plt.subplots(1, 2, figsize=(10, 4))
    ax_path.plot(newtonian.x * 1e6, newtonian.y * 1e6, label="newtonian")
    ax_path.plot(linear.x * 1e6, linear.y * 1e6, "--", label="linear mass")
    ax_path.set_xlabel("x [um]")
    ax_path.set_ylabel("y [um]")
    ax_path.set_title("trajectories")
    ax_path.legend()
    ax_vel.plot(newtonian.t * 1e9, newtonian.vx, label="newtonian vx")
    ax_vel.plot(linear.t * 1e9, linear.vx, "--", label="linear-mass vx")
    ax_vel.axhline(v_inf[0], color="k", lw=0.5)
    ax_vel.set_xlabel("t [ns]")
    ax_vel.set_ylabel("vx [m/s]")
    ax_vel.set_title("approach to the drift")
    ax_vel.legend()
    fig.tight_layout()
    fig.savefig("drag_models.png", dpi=150)
    print("\nwrote drag_models.png")
