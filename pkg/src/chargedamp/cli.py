"""Command-line front end: scenario files in, deterministic CSV data out.

Subcommands
-----------
simulate-classical   trajectory of the Newtonian or variable-mass model
simulate-canonical   transformation parameters, map entries, trajectory
simulate-packet      density snapshots of the Gaussian packet + norms
green-check          kernel quadrature vs closed-form amplitude
compare              all classical routes side by side + figure data
verify               the built-in verification suite

Every command accepts a scenario file path or the literal name ``gaas``
for the bundled GaAs-electron scenario, plus repeated
``--set section.key=value`` overrides applied before parsing.  Output
CSVs are comma-separated with a header row, Unix newlines and
full-precision floats (17 significant digits), so identical inputs give
byte-identical files.

Exit codes: 0 success, 1 validation/config error, 2 solver failure,
3 verification failure (any failed check).  ``CHARGEDAMP_OUTPUT_DIR``
provides the default output directory and ``CHARGEDAMP_THREADS`` the
worker count for commands that run independent solves.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .canonical import solve_parameters, trajectory_from_solution
from .classical_direct import (
    Trajectory,
    integrate_newtonian,
    integrate_variable_mass,
    saturation_time,
    stationary_velocity_ltdmm,
)
from .errors import ChargedampError, SolverError, ValidationError, VerificationError
from .mass_models import LinearMass
from .quantum import (
    Grid2D,
    PacketSpec,
    default_packet_spec,
    grid_norm,
    packet_center,
    params_at_time,
    propagate_via_green,
    psi_from_params,
    sigma,
)
from .scenario import (
    Scenario,
    gaas_scenario,
    scenario_from_parser,
    scenario_to_parser,
    validate_scenario,
)
from .verify import ALL_CHECKS, CheckResult, run_verification

__all__ = ["RunRequest", "RunReport", "run", "emit_figure_data", "main"]

_COMMANDS = (
    "simulate-classical",
    "simulate-canonical",
    "simulate-packet",
    "green-check",
    "compare",
    "verify",
)
_SECTIONS = ("particle", "mass_model", "fields", "packet", "integration")


@dataclass(frozen=True)
class RunRequest:
    """One CLI invocation, resolved: command, scenario, output, overrides."""

    command: str
    scenario_path: str | None = None
    output_dir: Path = Path(".")
    overrides: tuple[tuple[str, str], ...] = ()
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise ValidationError(
                f"unknown command {self.command!r}; expected one of {', '.join(_COMMANDS)}"
            )


@dataclass(frozen=True)
class RunReport:
    """What a run produced: files written and checks evaluated."""

    command: str
    wall_time: float
    outputs: list[str]
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


# ---------------------------------------------------------------------------
# Scenario loading with overrides
# ---------------------------------------------------------------------------

def _parser_for_request(request: RunRequest) -> tuple[configparser.ConfigParser, str]:
    if request.scenario_path in (None, "gaas"):
        parser = scenario_to_parser(gaas_scenario())
        source = "<bundled gaas>"
    else:
        parser = configparser.ConfigParser()
        try:
            read = parser.read(request.scenario_path)
        except configparser.Error as exc:
            raise ValidationError(f"cannot parse {request.scenario_path}: {exc}") from None
        if not read:
            raise ValidationError(f"scenario file not found or unreadable: {request.scenario_path}")
        source = str(request.scenario_path)
    for key, value in request.overrides:
        section, _, option = key.partition(".")
        if not option:
            raise ValidationError(
                f"override {key!r} must be section.key (sections: {', '.join(_SECTIONS)})"
            )
        if section not in _SECTIONS:
            raise ValidationError(f"override {key!r} references unknown section {section!r}")
        if section not in parser:
            parser[section] = {}
        parser[section][option] = value
    return parser, source


def _scenario_for_request(request: RunRequest) -> tuple[Scenario, configparser.ConfigParser]:
    parser, source = _parser_for_request(request)
    scenario = scenario_from_parser(parser, source=source)
    validate_scenario(scenario)
    return scenario, parser


def _packet_for_request(parser: configparser.ConfigParser, scenario: Scenario) -> PacketSpec:
    """[packet] section (keys a, px0, py0); momenta default to m(t_start)*v0."""
    base = default_packet_spec(scenario)
    if not parser.has_section("packet"):
        return base
    section = parser["packet"]
    try:
        return PacketSpec(
            a=section.getfloat("a", base.a),
            p_x0=section.getfloat("px0", base.p_x0),
            p_y0=section.getfloat("py0", base.p_y0),
        )
    except ValueError as exc:
        raise ValidationError(f"[packet] section: {exc}") from None


# ---------------------------------------------------------------------------
# Deterministic CSV output
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    return f"{value:.17g}"


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in zip(*columns):
            handle.write(",".join(_format_cell(value) for value in row) + "\n")
    return str(path)


def _trajectory_csv(path: Path, traj: Trajectory) -> str:
    return _write_csv(path, ["t", "x", "y", "vx", "vy"], [traj.t, traj.x, traj.y, traj.vx, traj.vy])


def emit_figure_data(
    output_dir: Path,
    newtonian: Trajectory,
    linear_mass: Trajectory,
    canonical: Trajectory,
    packet_points: Trajectory,
) -> list[str]:
    """Plot-ready CSVs for the four standard views of the GaAs comparison.

    fig1: trajectories per model; fig2: velocity hodograph per model plus
    the packet-centre points; fig3/fig4: velocity components against time
    for the Newtonian and linear-mass models (fig4 with the packet-centre
    velocities alongside).  All series share the grid of the inputs.
    """
    out = []
    out.append(_write_csv(
        output_dir / "fig1_trajectories.csv",
        ["t", "newtonian_x", "newtonian_y", "linear_mass_x", "linear_mass_y",
         "canonical_x", "canonical_y"],
        [newtonian.t, newtonian.x, newtonian.y, linear_mass.x, linear_mass.y,
         canonical.x, canonical.y],
    ))
    out.append(_write_csv(
        output_dir / "fig2_velocity_hodograph.csv",
        ["t", "newtonian_vx", "newtonian_vy", "linear_mass_vx", "linear_mass_vy",
         "packet_vx", "packet_vy"],
        [newtonian.t, newtonian.vx, newtonian.vy, linear_mass.vx, linear_mass.vy,
         packet_points.vx, packet_points.vy],
    ))
    out.append(_write_csv(
        output_dir / "fig3_newtonian_velocity.csv",
        ["t", "vx", "vy"],
        [newtonian.t, newtonian.vx, newtonian.vy],
    ))
    out.append(_write_csv(
        output_dir / "fig4_linear_mass_velocity.csv",
        ["t", "vx", "vy", "packet_vx", "packet_vy"],
        [linear_mass.t, linear_mass.vx, linear_mass.vy, packet_points.vx, packet_points.vy],
    ))
    return out


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_simulate_classical(request: RunRequest) -> tuple[list[str], list[CheckResult]]:
    scenario, _ = _scenario_for_request(request)
    model = request.options.get("model", "variable-mass")
    if model == "newtonian":
        traj = integrate_newtonian(scenario)
    elif model == "variable-mass":
        traj = integrate_variable_mass(scenario)
    else:
        raise ValidationError(f"unknown model {model!r}; expected newtonian or variable-mass")
    name = f"classical_{model.replace('-', '_')}.csv"
    return [_trajectory_csv(request.output_dir / name, traj)], []


def _cmd_simulate_canonical(request: RunRequest) -> tuple[list[str], list[CheckResult]]:
    scenario, _ = _scenario_for_request(request)
    solution = solve_parameters(scenario)
    outputs = [_trajectory_csv(
        request.output_dir / "canonical_trajectory.csv", trajectory_from_solution(solution)
    )]
    trans, shear = solution.translations, solution.shear
    outputs.append(_write_csv(
        request.output_dir / "canonical_parameters.csv",
        ["t", "theta", "lambda_x", "lambda_y", "pi_x", "pi_y", "S",
         "beta", "eta", "delta", "gamma", "Delta"],
        [trans.t, trans.theta, trans.lambda_x, trans.lambda_y, trans.pi_x, trans.pi_y,
         trans.S, shear.beta, shear.eta, shear.delta, shear.gamma, shear.Delta],
    ))
    if request.options.get("dump_maps", False):
        maps = solution.maps()
        entries = np.array([m.M.reshape(-1) for m in maps])
        mus = np.array([m.mu for m in maps])
        header = ["t"] + [f"m{i}{j}" for i in range(1, 5) for j in range(1, 5)] \
            + [f"mu{i}" for i in range(1, 5)]
        columns = [trans.t] + [entries[:, k] for k in range(16)] + [mus[:, k] for k in range(4)]
        outputs.append(_write_csv(request.output_dir / "canonical_maps.csv", header, columns))
    return outputs, []


def _parse_times(text: str) -> list[float]:
    try:
        times = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad --times value: {exc}") from None
    if not times:
        raise ValidationError("--times must list at least one time")
    return times


def _cmd_simulate_packet(request: RunRequest) -> tuple[list[str], list[CheckResult]]:
    scenario, parser = _scenario_for_request(request)
    spec = _packet_for_request(parser, scenario)
    times = _parse_times(request.options.get("times", "0,6e-12,1.364e-11,2e-11"))
    halfwidth = float(request.options.get("grid_halfwidth", 4e-6))
    n_points = int(request.options.get("grid_points", 401))
    dump_wave = bool(request.options.get("wavefunction", False))
    grid2d = Grid2D.centered(halfwidth, n_points)
    xg, yg = grid2d.mesh()
    x_col = xg.reshape(-1)
    y_col = yg.reshape(-1)

    outputs: list[str] = []
    checks: list[CheckResult] = []
    norms: list[float] = []
    widths: list[float] = []
    for index, t in enumerate(times):
        trans, shear = params_at_time(scenario, t)
        values = psi_from_params(xg, yg, trans, shear, spec)
        density = np.abs(values) ** 2
        norm = grid_norm(values, grid2d)
        norms.append(norm)
        widths.append(sigma(shear, spec.a, spec.hbar))
        header = ["x", "y", "density"]
        columns = [x_col, y_col, density.reshape(-1)]
        if dump_wave:
            header += ["re", "im"]
            columns += [values.real.reshape(-1), values.imag.reshape(-1)]
        outputs.append(_write_csv(request.output_dir / f"density_{index:02d}.csv", header, columns))
        checks.append(CheckResult(
            name=f"packet-norm-t{index:02d}",
            passed=abs(norm - 1.0) < 1e-6,
            measured=abs(norm - 1.0),
            tolerance=1e-6,
            seconds=0.0,
            budget=math.inf,
            detail=f"t = {t:.6g} s",
        ))
    outputs.append(_write_csv(
        request.output_dir / "packet_summary.csv",
        ["t", "norm", "sigma"],
        [np.array(times), np.array(norms), np.array(widths)],
    ))
    return outputs, checks


def _cmd_green_check(request: RunRequest) -> tuple[list[str], list[CheckResult]]:
    scenario, parser = _scenario_for_request(request)
    spec = _packet_for_request(parser, scenario)
    times = _parse_times(request.options.get("times", "1.364e-11,1.99e-11"))
    halfwidth = float(request.options.get("grid_halfwidth", 1.2e-6))
    n_points = int(request.options.get("grid_points", 257))
    tolerance = float(request.options.get("tolerance", 1e-4))
    grid2d = Grid2D.centered(halfwidth, n_points)
    xg, yg = grid2d.mesh()

    checks: list[CheckResult] = []
    deviations: list[float] = []
    for index, t in enumerate(times):
        start = time.perf_counter()
        quadrature = propagate_via_green(scenario, spec, t, grid2d)
        closed = psi_from_params(xg, yg, *params_at_time(scenario, t), spec)
        amplitude = np.abs(closed)
        mask = amplitude > 1e-3 * float(np.max(amplitude))
        rel = float(np.max(np.abs(quadrature - closed)[mask] / amplitude[mask]))
        deviations.append(rel)
        checks.append(CheckResult(
            name=f"green-vs-closed-t{index:02d}",
            passed=rel < tolerance,
            measured=rel,
            tolerance=tolerance,
            seconds=time.perf_counter() - start,
            budget=math.inf,
            detail=f"t = {t:.6g} s, {n_points}^2 grid",
        ))
    outputs = [_write_csv(
        request.output_dir / "green_check.csv",
        ["t", "max_rel_deviation", "tolerance"],
        [np.array(times), np.array(deviations), np.full(len(times), tolerance)],
    )]
    return outputs, checks


def _cmd_compare(request: RunRequest) -> tuple[list[str], list[CheckResult]]:
    scenario, parser = _scenario_for_request(request)
    if not isinstance(scenario.mass_model, LinearMass):
        raise ValidationError(
            "compare contrasts the Newtonian drag model with the linear mass law; "
            f"this scenario uses {scenario.mass_model.kind!r} "
            "(override with --set mass_model.kind=linear)"
        )
    spec = _packet_for_request(parser, scenario)
    threads = request.options.get("threads", 1)

    jobs = {
        "newtonian": lambda: integrate_newtonian(scenario),
        "linear_mass": lambda: integrate_variable_mass(scenario),
        "canonical": lambda: solve_parameters(scenario),
    }
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            futures = {name: pool.submit(job) for name, job in jobs.items()}
            results = {name: future.result() for name, future in futures.items()}
    else:
        results = {name: job() for name, job in jobs.items()}
    newtonian = results["newtonian"]
    linear = results["linear_mass"]
    solution = results["canonical"]
    canonical = trajectory_from_solution(solution)

    # Packet-centre kinematics ride on the canonical parameters: the centre
    # equals the classical trajectory started from the packet's own initial
    # data, and its velocity is (p - qA)/m along that trajectory.
    n = len(solution.grid)
    center_x = np.empty(n)
    center_y = np.empty(n)
    for i in range(n):
        center_x[i], center_y[i] = packet_center(
            solution.translations.at(i), solution.shear.at(i), spec
        )
    packet_points = Trajectory(
        t=solution.grid.samples.copy(), x=center_x, y=center_y,
        vx=canonical.vx.copy(), vy=canonical.vy.copy(),
    )

    outputs = [
        _trajectory_csv(request.output_dir / "compare_newtonian.csv", newtonian),
        _trajectory_csv(request.output_dir / "compare_linear_mass.csv", linear),
        _trajectory_csv(request.output_dir / "compare_canonical.csv", canonical),
    ]
    outputs.extend(emit_figure_data(request.output_dir, newtonian, linear, canonical, packet_points))

    v_inf = stationary_velocity_ltdmm(scenario)
    speed_inf = math.hypot(*v_inf)
    rel_newtonian = math.hypot(newtonian.vx[-1] - v_inf[0], newtonian.vy[-1] - v_inf[1]) / speed_inf
    rel_linear = math.hypot(linear.vx[-1] - v_inf[0], linear.vy[-1] - v_inf[1]) / speed_inf
    scale = float(np.max(np.hypot(linear.x, linear.y)))
    route_gap = float(np.max(np.hypot(canonical.x - linear.x, canonical.y - linear.y))) / scale
    sat_newtonian = saturation_time(newtonian, v_inf)
    sat_linear = saturation_time(linear, v_inf)

    summary_rows = [
        ("stationary_vx", v_inf[0]),
        ("stationary_vy", v_inf[1]),
        ("newtonian_final_rel_gap", rel_newtonian),
        ("linear_mass_final_rel_gap", rel_linear),
        ("canonical_vs_direct_rel_gap", route_gap),
        ("newtonian_saturation_time", sat_newtonian),
        ("linear_mass_saturation_time", sat_linear),
    ]
    path = request.output_dir / "compare_summary.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        handle.write("quantity,value\n")
        for key, value in summary_rows:
            handle.write(f"{key},{value:.17g}\n")
    outputs.append(str(path))

    checks = [
        CheckResult(
            name="stationary-agreement-newtonian",
            passed=rel_newtonian < 5e-3,
            measured=rel_newtonian, tolerance=5e-3, seconds=0.0, budget=math.inf,
        ),
        CheckResult(
            name="stationary-agreement-linear-mass",
            passed=rel_linear < 5e-3,
            measured=rel_linear, tolerance=5e-3, seconds=0.0, budget=math.inf,
        ),
        CheckResult(
            name="canonical-vs-direct",
            passed=route_gap < 1e-6,
            measured=route_gap, tolerance=1e-6, seconds=0.0, budget=math.inf,
        ),
    ]
    return outputs, checks


def _cmd_verify(request: RunRequest) -> tuple[list[str], list[CheckResult]]:
    only = request.options.get("only")
    if only:
        lookup = {check.__name__.removeprefix("check_").replace("_", "-"): check
                  for check in ALL_CHECKS}
        missing = [name for name in only if name not in lookup]
        if missing:
            raise ValidationError(
                f"unknown check name(s) {', '.join(missing)}; "
                f"available: {', '.join(sorted(lookup))}"
            )
        selected = [lookup[name] for name in only]
    else:
        selected = None
    checks = run_verification(checks=selected, printer=print)
    outputs = [_write_csv(
        request.output_dir / "verification_report.csv",
        ["name", "passed", "measured", "tolerance", "seconds", "budget"],
        [np.array([c.name for c in checks], dtype=object),
         np.array([int(c.passed) for c in checks]),
         np.array([c.measured for c in checks]),
         np.array([c.tolerance for c in checks]),
         np.array([c.seconds for c in checks]),
         np.array([c.budget for c in checks])],
    )]
    return outputs, checks


_DISPATCH = {
    "simulate-classical": _cmd_simulate_classical,
    "simulate-canonical": _cmd_simulate_canonical,
    "simulate-packet": _cmd_simulate_packet,
    "green-check": _cmd_green_check,
    "compare": _cmd_compare,
    "verify": _cmd_verify,
}


def run(request: RunRequest) -> RunReport:
    """Execute one request; raises ChargedampError subclasses on failure."""
    start = time.perf_counter()
    outputs, checks = _DISPATCH[request.command](request)
    return RunReport(
        command=request.command,
        wall_time=time.perf_counter() - start,
        outputs=outputs,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# Argument parsing and process entry
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ValidationError (exit code 1)."""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "scenario", nargs="?", default="gaas",
        help="scenario file path, or 'gaas' for the bundled GaAs scenario",
    )
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
        help="override one scenario value before parsing (repeatable)",
    )
    parser.add_argument("--output-dir", default=None, help="directory for output files")


def _build_parser() -> _Parser:
    parser = _Parser(prog="chargedamp", description=__doc__.split("\n\n")[0])
    subparsers = parser.add_subparsers(dest="command")

    sub = subparsers.add_parser("simulate-classical", help="direct trajectory integration")
    _add_scenario_arguments(sub)
    sub.add_argument("--model", choices=("newtonian", "variable-mass"), default="variable-mass")

    sub = subparsers.add_parser("simulate-canonical", help="transformation parameters and map")
    _add_scenario_arguments(sub)
    sub.add_argument("--dump-maps", action="store_true", help="also write the 4x4 map entries")

    sub = subparsers.add_parser("simulate-packet", help="Gaussian packet density snapshots")
    _add_scenario_arguments(sub)
    sub.add_argument("--times", default="0,6e-12,1.364e-11,2e-11",
                     help="comma-separated snapshot times in seconds")
    sub.add_argument("--grid-halfwidth", type=float, default=4e-6)
    sub.add_argument("--grid-points", type=int, default=401)
    sub.add_argument("--wavefunction", action="store_true", help="add re,im columns")

    sub = subparsers.add_parser("green-check", help="kernel quadrature vs closed form")
    _add_scenario_arguments(sub)
    sub.add_argument("--times", default="1.364e-11,1.99e-11")
    sub.add_argument("--grid-halfwidth", type=float, default=1.2e-6)
    sub.add_argument("--grid-points", type=int, default=257)
    sub.add_argument("--tolerance", type=float, default=1e-4)

    sub = subparsers.add_parser("compare", help="all classical routes + figure data")
    _add_scenario_arguments(sub)

    sub = subparsers.add_parser("verify", help="run the verification suite")
    sub.add_argument("--output-dir", default=None)
    sub.add_argument("--only", action="append", default=[], metavar="CHECK",
                     help="run only the named check (repeatable)")

    return parser


def _resolve_output_dir(flag_value: str | None) -> Path:
    if flag_value is not None:
        return Path(flag_value)
    env = os.environ.get("CHARGEDAMP_OUTPUT_DIR")
    return Path(env) if env else Path(".")


def _thread_count() -> int:
    raw = os.environ.get("CHARGEDAMP_THREADS")
    if raw is None:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValidationError(f"CHARGEDAMP_THREADS must be an integer, got {raw!r}") from None
    if threads < 1:
        raise ValidationError(f"CHARGEDAMP_THREADS must be >= 1, got {threads}")
    return threads


def _request_from_namespace(namespace: argparse.Namespace) -> RunRequest:
    overrides = []
    for item in getattr(namespace, "overrides", []):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        overrides.append((key.strip(), value))
    options: dict = {}
    for name in ("model", "dump_maps", "times", "grid_halfwidth", "grid_points",
                 "wavefunction", "tolerance", "only"):
        if hasattr(namespace, name):
            options[name] = getattr(namespace, name)
    options["threads"] = _thread_count()
    return RunRequest(
        command=namespace.command,
        scenario_path=getattr(namespace, "scenario", None),
        output_dir=_resolve_output_dir(namespace.output_dir),
        overrides=tuple(overrides),
        options=options,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        namespace = parser.parse_args(argv)
        if namespace.command is None:
            parser.print_usage(sys.stderr)
            print("chargedamp: a command is required", file=sys.stderr)
            return 1
        report = run(_request_from_namespace(namespace))
    except ValidationError as exc:
        print(f"chargedamp: validation error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"chargedamp: solver failure: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"chargedamp: verification failure: {exc}", file=sys.stderr)
        return 3
    except ChargedampError as exc:
        print(f"chargedamp: {exc}", file=sys.stderr)
        return 1

    for path in report.outputs:
        print(f"wrote {path}")
    for check in report.checks:
        if report.command != "verify":  # verify already printed live
            print(check.line())
    print(f"{report.command} completed in {report.wall_time:.2f} s")
    return 0 if report.passed else 3


if __name__ == "__main__":
    sys.exit(main())
