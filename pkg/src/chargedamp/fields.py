"""Time-dependent crossed electric and magnetic fields.

The configuration is a uniform in-plane electric field (Ex, Ey) with
optional time profiles, a perpendicular magnetic field B(t) = B0*f(t)
and an optional isotropic harmonic confinement of stiffness
kappa(t) = kappa0*g(t).  All profiles are dimensionless multipliers with
analytic derivatives, so the solvers never differentiate field data
numerically.

Gauge choice: symmetric gauge A = (-B y / 2, B x / 2, 0) together with
phi = -Ex*x - Ey*y.  With a time-varying B the physical electric field
then acquires the induced part -dA/dt = (Bdot*y/2, -Bdot*x/2).

``sample_fields`` additionally reports the derived oscillator quantities:
the instantaneous cyclotron frequency omega = q*B/m(t) and the combined
field-plus-confinement reparametrization beta(t) defined by

    exp(2*beta) = f(t)^2 + kappa0*exp(alpha)*g(t) / (m0*omega_ref^2),

with omega_ref = q*B0/m0 the reference cyclotron frequency.  This is the
log-scale of the effective oscillator stiffness:
m*omega^2 + kappa = m0*omega_ref^2*exp(2*beta - alpha).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BetaDomainError
from .mass_models import MassModel

__all__ = [
    "TimeProfile",
    "ConstantProfile",
    "ExponentialProfile",
    "SinusoidalProfile",
    "RampProfile",
    "profile_from_dict",
    "Fields",
    "FieldSample",
    "sample_fields",
    "rotated_field",
]


@dataclass(frozen=True)
class TimeProfile:
    """Dimensionless multiplier f(t) with closed-form df/dt."""

    def value(self, t):
        raise NotImplementedError

    def rate(self, t):
        raise NotImplementedError

    @property
    def kind(self) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict[str, float | str]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class ConstantProfile(TimeProfile):
    """f(t) = 1."""

    def value(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def rate(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    @property
    def kind(self) -> str:
        return "constant"


@dataclass(frozen=True)
class ExponentialProfile(TimeProfile):
    """f(t) = exp(rate*t); ``rate`` in 1/s (negative for decay)."""

    rate_constant: float = 0.0

    def value(self, t):
        return np.exp(self.rate_constant * np.asarray(t, dtype=float))

    def rate(self, t):
        return self.rate_constant * self.value(t)

    @property
    def kind(self) -> str:
        return "exponential"

    def to_dict(self) -> dict[str, float | str]:
        return {"kind": self.kind, "rate_constant": self.rate_constant}


@dataclass(frozen=True)
class SinusoidalProfile(TimeProfile):
    """f(t) = 1 + amplitude*sin(angular_frequency*t + phase)."""

    amplitude: float = 0.0
    angular_frequency: float = 0.0  # rad/s
    phase: float = 0.0  # rad

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return 1.0 + self.amplitude * np.sin(self.angular_frequency * t + self.phase)

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * self.angular_frequency * np.cos(self.angular_frequency * t + self.phase)

    @property
    def kind(self) -> str:
        return "sinusoidal"

    def to_dict(self) -> dict[str, float | str]:
        return {
            "kind": self.kind,
            "amplitude": self.amplitude,
            "angular_frequency": self.angular_frequency,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class RampProfile(TimeProfile):
    """f(t) = 1 + slope*t; ``slope`` in 1/s."""

    slope: float = 0.0

    def value(self, t):
        return 1.0 + self.slope * np.asarray(t, dtype=float)

    def rate(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.slope)

    @property
    def kind(self) -> str:
        return "ramp"

    def to_dict(self) -> dict[str, float | str]:
        return {"kind": self.kind, "slope": self.slope}


_PROFILE_KINDS = {
    "constant": ConstantProfile,
    "exponential": ExponentialProfile,
    "sinusoidal": SinusoidalProfile,
    "ramp": RampProfile,
}


def profile_from_dict(data: dict) -> TimeProfile:
    kind = str(data["kind"])
    if kind not in _PROFILE_KINDS:
        raise ValueError(f"unknown profile kind {kind!r}; expected one of {sorted(_PROFILE_KINDS)}")
    kwargs = {key: float(value) for key, value in data.items() if key != "kind"}
    return _PROFILE_KINDS[kind](**kwargs)


@dataclass(frozen=True)
class Fields:
    """Uniform E, perpendicular B(t) = B0*f(t), confinement kappa0*g(t).

    Parameters
    ----------
    Ex, Ey : float
        Uniform electric field components [V/m].
    B0 : float
        Reference magnetic field [T] (perpendicular to the plane).
    b_profile : TimeProfile
        Dimensionless B multiplier f(t).
    kappa0 : float
        Reference confinement stiffness [N/m] (0 disables confinement).
    kappa_profile : TimeProfile
        Dimensionless confinement multiplier g(t).
    """

    Ex: float = 0.0
    Ey: float = 0.0
    B0: float = 0.0
    b_profile: TimeProfile = field(default_factory=ConstantProfile)
    kappa0: float = 0.0
    kappa_profile: TimeProfile = field(default_factory=ConstantProfile)
    ex_profile: TimeProfile = field(default_factory=ConstantProfile)
    ey_profile: TimeProfile = field(default_factory=ConstantProfile)

    def magnetic_field(self, t):
        """B(t) [T]."""
        return self.B0 * self.b_profile.value(t)

    def magnetic_field_rate(self, t):
        """dB/dt [T/s]."""
        return self.B0 * self.b_profile.rate(t)

    def confinement(self, t):
        """kappa(t) [N/m]."""
        return self.kappa0 * self.kappa_profile.value(t)

    def confinement_rate(self, t):
        """d(kappa)/dt [N/(m s)]."""
        return self.kappa0 * self.kappa_profile.rate(t)

    def uniform_electric_field(self, t=0.0) -> np.ndarray:
        """The phi-derived part of E at time t (no induced contribution)."""
        return np.stack([
            self.Ex * self.ex_profile.value(t),
            self.Ey * self.ey_profile.value(t),
        ])

    def induced_electric_field(self, x, y, t):
        """-dA/dt = (Bdot*y/2, -Bdot*x/2) [V/m] in the symmetric gauge."""
        bdot = self.magnetic_field_rate(t)
        return np.stack([0.5 * bdot * np.asarray(y, float), -0.5 * bdot * np.asarray(x, float)])

    def total_electric_field(self, x, y, t):
        """Uniform plus induced field at (x, y) [V/m]; equals -grad(phi) - dA/dt."""
        uni = self.uniform_electric_field(t)
        ind = self.induced_electric_field(x, y, t)
        return np.stack([uni[0] + ind[0], uni[1] + ind[1]])

    def vector_potential(self, x, y, t):
        """Symmetric-gauge A = (-B y/2, B x/2) [T m]."""
        b = self.magnetic_field(t)
        return np.stack([-0.5 * b * np.asarray(y, float), 0.5 * b * np.asarray(x, float)])

    def scalar_potential(self, x, y, t=0.0):
        """phi = -Ex(t)*x - Ey(t)*y [V]."""
        uni = self.uniform_electric_field(t)
        return -uni[0] * np.asarray(x, float) - uni[1] * np.asarray(y, float)

    def to_dict(self) -> dict:
        return {
            "Ex": self.Ex,
            "Ey": self.Ey,
            "B0": self.B0,
            "b_profile": self.b_profile.to_dict(),
            "kappa0": self.kappa0,
            "kappa_profile": self.kappa_profile.to_dict(),
            "ex_profile": self.ex_profile.to_dict(),
            "ey_profile": self.ey_profile.to_dict(),
        }


@dataclass(frozen=True)
class FieldSample:
    """All field-derived quantities the solvers need at one time."""

    t: float  # s
    B: float  # T
    Bdot: float  # T/s
    Ex: float  # V/m (uniform part)
    Ey: float  # V/m
    kappa: float  # N/m
    omega: float  # rad/s, q*B/m(t), signed
    beta: float  # dimensionless
    beta_rate: float  # 1/s


def sample_fields(cfg: Fields, mass: MassModel, q: float, t: float) -> FieldSample:
    """Evaluate fields and the derived oscillator quantities at time t.

    Raises BetaDomainError when the reparametrization is undefined: either
    the expression under the log is non-positive, or confinement is present
    (kappa0 != 0) while the reference frequency q*B0/m0 vanishes.
    """
    f_val = float(cfg.b_profile.value(t))
    f_rate = float(cfg.b_profile.rate(t))
    m_val = float(mass.mass(t))
    arg = f_val * f_val
    arg_rate = 2.0 * f_val * f_rate
    if cfg.kappa0 != 0.0:
        omega_ref = q * cfg.B0 / mass.m0
        if omega_ref == 0.0:
            raise BetaDomainError(
                "confinement (kappa0 != 0) requires a nonzero reference frequency q*B0/m0"
            )
        g_val = float(cfg.kappa_profile.value(t))
        g_rate = float(cfg.kappa_profile.rate(t))
        alpha = float(mass.alpha(t))
        alpha_rate = float(mass.alpha_rate(t))
        scale = cfg.kappa0 * np.exp(alpha) / (mass.m0 * omega_ref**2)
        arg = arg + scale * g_val
        arg_rate = arg_rate + scale * (alpha_rate * g_val + g_rate)
    if not (arg > 0.0):
        raise BetaDomainError(
            f"oscillator reparametrization undefined at t={t!r} s: f^2 + kappa-term = {arg!r} <= 0"
        )
    beta = 0.5 * np.log(arg)
    beta_rate = arg_rate / (2.0 * arg)
    uni = cfg.uniform_electric_field(t)
    return FieldSample(
        t=float(t),
        B=cfg.B0 * f_val,
        Bdot=cfg.B0 * f_rate,
        Ex=float(uni[0]),
        Ey=float(uni[1]),
        kappa=float(cfg.confinement(t)),
        omega=q * cfg.B0 * f_val / m_val,
        beta=float(beta),
        beta_rate=float(beta_rate),
    )


def rotated_field(Ex, Ey, theta):
    """Rotate the in-plane field into the frame at angle theta.

    ExR = Ex*cos(theta) + Ey*sin(theta); EyR = -Ex*sin(theta) + Ey*cos(theta).
    """
    c, s = np.cos(theta), np.sin(theta)
    return Ex * c + Ey * s, -Ex * s + Ey * c
