"""Scenario definition: particle, fields, time window, shared output grid.

A ``Scenario`` bundles everything the solvers need: the (signed) charge,
the time-dependent mass law, the field configuration, initial conditions
and the reporting window.  All quantities are SI doubles throughout; the
physical scales involved (1e-32 kg masses, 1e11 rad/s frequencies,
1e-34 J*s actions) sit comfortably inside double range, so there is no
nondimensionalization layer.

``validate_scenario`` is the single entry point that turns a raw Scenario
into one the solvers will accept; it checks the window, the stride, and
mass positivity over the whole window by dense sampling (mass models are
opaque callables, so sampling at 10x the output resolution is the only
model-agnostic check).

Scenario files are flat INI-style text (sections ``particle``,
``mass_model``, ``fields``, ``packet``, ``integration``); numbers are
written with ``repr`` so that a save/load round trip is bit-exact.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace

import numpy as np

from .errors import BadStrideError, BadWindowError, MassDomainError, MassNonPositiveError, ValidationError
from .fields import Fields, TimeProfile, profile_from_dict
from .mass_models import ConstantMass, ExponentialMass, LinearMass, MassModel, SoftplusMass, mass_model_from_dict

__all__ = [
    "PhysicalConstants",
    "CODATA",
    "Scenario",
    "TimeGrid",
    "scenario_from_mobility",
    "validate_scenario",
    "gaas_scenario",
    "save_scenario",
    "load_scenario",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-style constants; never scenario-dependent."""

    elementary_charge: float = 1.602176634e-19  # C
    electron_mass: float = 9.1093837015e-31  # kg
    hbar: float = 1.054571817e-34  # J s

    def __post_init__(self):
        for name in ("elementary_charge", "electron_mass", "hbar"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be strictly positive")


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing output times spanning the scenario window."""

    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 2:
            raise BadWindowError("time grid needs at least two samples")
        if not np.all(np.diff(samples) > 0.0):
            raise BadWindowError("time grid samples must be strictly increasing")

    @classmethod
    def from_stride(cls, t_start: float, t_end: float, stride: float) -> "TimeGrid":
        if not (t_end > t_start):
            raise BadWindowError(f"need t_end > t_start, got [{t_start!r}, {t_end!r}]")
        if not (stride > 0.0):
            raise BadStrideError(f"output stride must be positive, got {stride!r}")
        n_steps = max(1, int(round((t_end - t_start) / stride)))
        return cls(np.linspace(t_start, t_end, n_steps + 1))

    @classmethod
    def from_count(cls, t_start: float, t_end: float, n_samples: int) -> "TimeGrid":
        if not (t_end > t_start):
            raise BadWindowError(f"need t_end > t_start, got [{t_start!r}, {t_end!r}]")
        if n_samples < 2:
            raise BadStrideError(f"need at least 2 samples, got {n_samples}")
        return cls(np.linspace(t_start, t_end, n_samples))

    @property
    def t_start(self) -> float:
        return float(self.samples[0])

    @property
    def t_end(self) -> float:
        return float(self.samples[-1])

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class Scenario:
    """Particle + fields + window; immutable after construction."""

    charge: float  # C, signed
    mass_model: MassModel
    field_config: Fields
    initial_position: tuple[float, float] = (0.0, 0.0)  # m
    initial_velocity: tuple[float, float] = (0.0, 0.0)  # m/s
    t_start: float = 0.0  # s
    t_end: float = 1e-9  # s
    output_stride: float = 1e-12  # s

    def grid(self) -> TimeGrid:
        return TimeGrid.from_stride(self.t_start, self.t_end, self.output_stride)

    @property
    def omega_ref(self) -> float:
        """Reference cyclotron frequency q*B0/m0 [rad/s] (signed).

        Built from the reference mass m0, not m(t_start); the oscillator
        reparametrization beta is defined relative to this frequency.
        """
        return self.charge * self.field_config.B0 / self.mass_model.m0

    def initial_mass(self) -> float:
        return float(self.mass_model.mass(self.t_start))


# validate_scenario returns its input unchanged on success; the alias keeps
# call sites explicit about which side of validation they are on.
ValidatedScenario = Scenario


def scenario_from_mobility(
    mobility: float, effective_mass_ratio: float, constants: PhysicalConstants = CODATA
) -> float:
    """Collision time tau [s] from a drift mobility [m^2/(V s)].

    Per-carrier Drude relation: mu = q*tau/m*  =>  tau = mu * m* / e with
    m* = effective_mass_ratio * electron_mass.
    """
    if not (mobility > 0.0):
        raise ValidationError(f"mobility must be positive, got {mobility!r}")
    if not (effective_mass_ratio > 0.0):
        raise ValidationError(f"effective_mass_ratio must be positive, got {effective_mass_ratio!r}")
    return mobility * effective_mass_ratio * constants.electron_mass / constants.elementary_charge


def validate_scenario(s: Scenario) -> ValidatedScenario:
    """Check every Scenario invariant; raise with all violations listed.

    Raises BadWindowError / BadStrideError / MassNonPositiveError (the first
    violated category wins the exception type; the message lists everything
    found).
    """
    violations: list[tuple[type, str]] = []
    window_ok = s.t_end > s.t_start
    if not window_ok:
        violations.append((BadWindowError, f"need t_end > t_start, got [{s.t_start!r}, {s.t_end!r}]"))
    if not (s.output_stride > 0.0):
        violations.append((BadStrideError, f"output stride must be positive, got {s.output_stride!r}"))
    elif window_ok and s.output_stride > (s.t_end - s.t_start):
        violations.append(
            (BadStrideError, f"output stride {s.output_stride!r} exceeds the window length")
        )

    if window_ok:
        # Dense positivity scan at 10x the output resolution.
        if s.output_stride > 0.0:
            n_out = max(1, int(round((s.t_end - s.t_start) / s.output_stride)))
        else:
            n_out = 100
        ts = np.linspace(s.t_start, s.t_end, 10 * n_out + 1)
        bad_t = None
        bad_mass = None
        try:
            masses = np.asarray(s.mass_model.mass(ts))
            nonpos = masses <= 0.0
            if np.any(nonpos):
                idx = int(np.argmax(nonpos))
                bad_t, bad_mass = float(ts[idx]), float(masses[idx])
        except MassDomainError:
            # Model refuses part of the window; locate the first such time.
            for t in ts:
                try:
                    m_val = float(s.mass_model.mass(float(t)))
                except MassDomainError:
                    bad_t, bad_mass = float(t), None
                    break
                if m_val <= 0.0:
                    bad_t, bad_mass = float(t), m_val
                    break
        if bad_t is not None:
            violations.append((MassNonPositiveError, None))
            mass_violation = (bad_t, bad_mass)

    if violations:
        messages = [msg for _, msg in violations if msg is not None]
        first_cls = violations[0][0]
        if first_cls is MassNonPositiveError:
            raise MassNonPositiveError(*mass_violation)
        if any(cls is MassNonPositiveError for cls, _ in violations):
            t_bad, m_bad = mass_violation
            messages.append(MassNonPositiveError(t_bad, m_bad).args[0])
        raise first_cls("; ".join(messages))
    return s


def gaas_scenario(mass_kind: str = "linear", k: float = 0.25) -> Scenario:
    """Bundled GaAs-electron drift scenario used by the demos and checks.

    Electron (q = -e) with effective mass 0.067 m_e and collision time
    tau = 56 ps in B = 40 mT (out of plane) and E = 100 V/m along +y;
    launched from the origin at 3.7 km/s along +y, reported every 5 ps
    over a 10 ns window.

    ``mass_kind`` picks the mass law: "constant", "kanai_caldirola",
    "linear" or "log_interp".  For the linear law, ``k`` fixes
    m(0) = k*m0; the relaxation timescale of that model is k*tau, and the
    default k = 0.25 places its velocity saturation between 1.5 and 4 ns,
    clearly separated from the Newtonian drag model's ~0.3 ns.
    """
    m0 = 0.067 * CODATA.electron_mass
    tau = 5.6e-11
    models: dict[str, MassModel] = {
        "constant": ConstantMass(m0=m0, tau=tau),
        "kanai_caldirola": ExponentialMass(m0=m0, tau=tau),
        "linear": LinearMass(m0=m0, tau=tau, k=k),
        "log_interp": SoftplusMass(m0=m0, tau=tau),
    }
    if mass_kind not in models:
        raise ValidationError(f"unknown mass_kind {mass_kind!r}; expected one of {sorted(models)}")
    return Scenario(
        charge=-CODATA.elementary_charge,
        mass_model=models[mass_kind],
        field_config=Fields(Ex=0.0, Ey=100.0, B0=0.04),
        initial_position=(0.0, 0.0),
        initial_velocity=(0.0, 3.7e3),
        t_start=0.0,
        t_end=10e-9,
        output_stride=5e-12,
    )


# ---------------------------------------------------------------------------
# Scenario files: flat INI, repr-exact floats, one nesting level.
# ---------------------------------------------------------------------------

def _profile_items(prefix: str, profile: TimeProfile) -> list[tuple[str, str]]:
    items = [(prefix, profile.kind)]
    for key, value in profile.to_dict().items():
        if key != "kind":
            items.append((f"{prefix}_{key}", repr(float(value))))
    return items


def _parse_profile(section: configparser.SectionProxy, prefix: str) -> TimeProfile:
    kind = section.get(prefix, "constant")
    params: dict[str, float | str] = {"kind": kind}
    marker = f"{prefix}_"
    for key in section:
        if key.startswith(marker):
            params[key[len(marker):]] = section[key]
    return profile_from_dict(params)


def scenario_to_parser(s: Scenario) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    parser["particle"] = {
        "charge": repr(s.charge),
        "x0": repr(s.initial_position[0]),
        "y0": repr(s.initial_position[1]),
        "vx0": repr(s.initial_velocity[0]),
        "vy0": repr(s.initial_velocity[1]),
    }
    parser["mass_model"] = {key: (value if isinstance(value, str) else repr(value))
                            for key, value in s.mass_model.to_dict().items()}
    fields = s.field_config
    field_items: dict[str, str] = {
        "ex": repr(fields.Ex),
        "ey": repr(fields.Ey),
        "b0": repr(fields.B0),
        "kappa0": repr(fields.kappa0),
    }
    field_items.update(_profile_items("b_profile", fields.b_profile))
    field_items.update(_profile_items("kappa_profile", fields.kappa_profile))
    field_items.update(_profile_items("ex_profile", fields.ex_profile))
    field_items.update(_profile_items("ey_profile", fields.ey_profile))
    parser["fields"] = field_items
    parser["integration"] = {
        "t_start": repr(s.t_start),
        "t_end": repr(s.t_end),
        "output_stride": repr(s.output_stride),
    }
    return parser


def save_scenario(s: Scenario, path) -> None:
    with open(path, "w") as handle:
        scenario_to_parser(s).write(handle)


def scenario_from_parser(parser: configparser.ConfigParser, source: str = "<scenario>") -> Scenario:
    try:
        particle = parser["particle"]
        mass_section = parser["mass_model"]
        fields_section = parser["fields"]
        integration = parser["integration"]
    except KeyError as exc:
        raise ValidationError(f"scenario file {source} is missing section {exc}") from None
    try:
        mass_model = mass_model_from_dict(dict(mass_section))
        field_config = Fields(
            Ex=fields_section.getfloat("ex", 0.0),
            Ey=fields_section.getfloat("ey", 0.0),
            B0=fields_section.getfloat("b0", 0.0),
            kappa0=fields_section.getfloat("kappa0", 0.0),
            b_profile=_parse_profile(fields_section, "b_profile"),
            kappa_profile=_parse_profile(fields_section, "kappa_profile"),
            ex_profile=_parse_profile(fields_section, "ex_profile"),
            ey_profile=_parse_profile(fields_section, "ey_profile"),
        )
        scenario = Scenario(
            charge=particle.getfloat("charge"),
            mass_model=mass_model,
            field_config=field_config,
            initial_position=(particle.getfloat("x0", 0.0), particle.getfloat("y0", 0.0)),
            initial_velocity=(particle.getfloat("vx0", 0.0), particle.getfloat("vy0", 0.0)),
            t_start=integration.getfloat("t_start", 0.0),
            t_end=integration.getfloat("t_end"),
            output_stride=integration.getfloat("output_stride"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"scenario file {source}: {exc}") from None
    return scenario


def load_scenario(path) -> Scenario:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValidationError(f"scenario file not found or unreadable: {path}")
    return scenario_from_parser(parser, source=str(path))


def with_mass_model(s: Scenario, model: MassModel) -> Scenario:
    """Copy of ``s`` with a different mass law (fields and ICs unchanged)."""
    return replace(s, mass_model=model)
