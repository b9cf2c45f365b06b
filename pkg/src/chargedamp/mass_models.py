"""Time-dependent effective-mass laws.

Dissipation is encoded by letting the particle's effective mass grow with
time: a drag force -(m/tau)*v is equivalent, at the equation-of-motion
level, to transporting the dynamics with m(t) = m0*exp(t/tau), and other
growth laws give other (non-exponential) relaxation behaviour.  Four laws
are provided:

* ``ConstantMass``     -- m(t) = m0 (no dissipation),
* ``ExponentialMass``  -- m(t) = m0*exp(t/tau), the classic
  Caldirola-Kanai growth law (exponential velocity relaxation),
* ``LinearMass``       -- m(t) = m0*(t/tau + k), algebraic ~1/t relaxation,
* ``SoftplusMass``     -- m(t) = m0*ln(1 + exp(t/tau)), which interpolates
  smoothly from the exponential law (t << -tau) to the linear asymptote
  m0*t/tau (t >> tau).

Every model exposes the mass, its time derivative, the log-mass
alpha(t) = ln(m/m0) and its rate, all as closed-form expressions; the
integrators never differentiate numerically.  All quantities are SI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import MassDomainError

__all__ = [
    "MassModel",
    "ConstantMass",
    "ExponentialMass",
    "LinearMass",
    "SoftplusMass",
    "mass_model_from_dict",
    "asymptotic_interpolation_check",
]

# Below x = t/tau ~ -40 the correction ln(1 - e^x/2 + ...) to alpha = x is
# smaller than double-precision resolution of x itself.
_SOFTPLUS_LINEARIZE_BELOW = -40.0


def _require_positive(name: str, value: float) -> None:
    if not (value > 0.0) or not np.isfinite(value):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class MassModel:
    """Base class: reference mass ``m0`` [kg] plus the closed-form law."""

    m0: float

    #: drag time tau [s]; None for models without one (constant mass)
    tau: float | None = None

    def __post_init__(self):
        _require_positive("m0", self.m0)

    # Subclasses override the four evaluators. ``t`` may be a float or an
    # ndarray; results broadcast accordingly.
    def mass(self, t):
        raise NotImplementedError

    def mass_rate(self, t):
        raise NotImplementedError

    def alpha(self, t):
        """Log-mass ln(m(t)/m0)."""
        raise NotImplementedError

    def alpha_rate(self, t):
        """d/dt ln(m(t)/m0) = mass_rate/mass."""
        raise NotImplementedError

    @property
    def kind(self) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict[str, float | str]:
        out: dict[str, float | str] = {"kind": self.kind, "m0": self.m0}
        if self.tau is not None:
            out["tau"] = self.tau
        return out


@dataclass(frozen=True)
class ConstantMass(MassModel):
    def mass(self, t):
        return self.m0 * np.ones_like(np.asarray(t, dtype=float))

    def mass_rate(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def alpha(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def alpha_rate(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    @property
    def kind(self) -> str:
        return "constant"


@dataclass(frozen=True)
class ExponentialMass(MassModel):
    """m(t) = m0*exp(t/tau): uniform exponential mass growth."""

    def __post_init__(self):
        super().__post_init__()
        _require_positive("tau", self.tau if self.tau is not None else -1.0)

    def mass(self, t):
        return self.m0 * np.exp(np.asarray(t, dtype=float) / self.tau)

    def mass_rate(self, t):
        return self.mass(t) / self.tau

    def alpha(self, t):
        return np.asarray(t, dtype=float) / self.tau

    def alpha_rate(self, t):
        return np.full_like(np.asarray(t, dtype=float), 1.0 / self.tau)

    @property
    def kind(self) -> str:
        return "kanai_caldirola"


@dataclass(frozen=True)
class LinearMass(MassModel):
    """m(t) = m0*(t/tau + k), defined for t > -k*tau.

    ``k`` fixes the initial mass m(0) = m0*k; it defaults to 1 so that the
    reference mass is also the initial mass.
    """

    k: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        _require_positive("tau", self.tau if self.tau is not None else -1.0)
        if not np.isfinite(self.k):
            raise ValueError(f"k must be finite, got {self.k!r}")

    def _scaled(self, t):
        s = np.asarray(t, dtype=float) / self.tau + self.k
        if np.any(s <= 0.0):
            bad = np.asarray(t, dtype=float)[np.asarray(s <= 0.0)] if np.ndim(t) else t
            first = float(np.atleast_1d(bad)[0])
            raise MassDomainError(
                f"linear mass law undefined at t={first!r} s (needs t > -k*tau = {-self.k * self.tau!r} s)"
            )
        return s

    def mass(self, t):
        return self.m0 * self._scaled(t)

    def mass_rate(self, t):
        self._scaled(t)  # domain check
        return np.full_like(np.asarray(t, dtype=float), self.m0 / self.tau)

    def alpha(self, t):
        return np.log(self._scaled(t))

    def alpha_rate(self, t):
        return 1.0 / (self.tau * self._scaled(t))

    @property
    def kind(self) -> str:
        return "linear"

    def to_dict(self) -> dict[str, float | str]:
        out = super().to_dict()
        out["k"] = self.k
        return out


@dataclass(frozen=True)
class SoftplusMass(MassModel):
    """m(t) = m0*ln(1 + exp(t/tau)).

    For t << -tau this approaches the exponential law m0*exp(t/tau); for
    t >> tau it approaches the linear asymptote m0*t/tau.  ``np.logaddexp``
    evaluates ln(1+e^x) as x + log1p(e^-x) for x > 0, so the law is stable
    for arbitrarily large |t|/tau.
    """

    def __post_init__(self):
        super().__post_init__()
        _require_positive("tau", self.tau if self.tau is not None else -1.0)

    def mass(self, t):
        x = np.asarray(t, dtype=float) / self.tau
        return self.m0 * np.logaddexp(0.0, x)

    def mass_rate(self, t):
        x = np.asarray(t, dtype=float) / self.tau
        return (self.m0 / self.tau) * expit(x)

    def alpha(self, t):
        x = np.asarray(t, dtype=float) / self.tau
        # For deeply negative x, ln(ln(1+e^x)) = x + ln(1 - e^x/2 + ...) and
        # the correction is below double resolution; avoids log(0) underflow.
        softplus = np.logaddexp(0.0, x)
        with np.errstate(divide="ignore"):
            direct = np.log(softplus)
        return np.where(x < _SOFTPLUS_LINEARIZE_BELOW, x, direct)

    def alpha_rate(self, t):
        x = np.asarray(t, dtype=float) / self.tau
        softplus = np.logaddexp(0.0, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = expit(x) / softplus
        # x -> -inf limit: expit/softplus -> 1 (both ~ e^x).
        return np.where(x < -700.0, 1.0, ratio) / self.tau

    @property
    def kind(self) -> str:
        return "log_interp"


_KINDS = {
    "constant": ConstantMass,
    "kanai_caldirola": ExponentialMass,
    "linear": LinearMass,
    "log_interp": SoftplusMass,
}


def mass_model_from_dict(data: dict) -> MassModel:
    """Inverse of ``MassModel.to_dict`` (used by the scenario file parser)."""
    kind = str(data["kind"])
    if kind not in _KINDS:
        raise ValueError(f"unknown mass model kind {kind!r}; expected one of {sorted(_KINDS)}")
    kwargs = {key: float(value) for key, value in data.items() if key != "kind"}
    return _KINDS[kind](**kwargs)


def asymptotic_interpolation_check(model: SoftplusMass, t: float) -> tuple[float, float]:
    """Masses of the softplus law's two asymptotes at time ``t``.

    Returns ``(m_exponential, m_linear)`` [kg]: the exponential law with the
    same (m0, tau), and the linear asymptote m0*t/tau (the k=0 line; any
    other k offsets the comparison by k*m0 and would swamp the asymptotic
    agreement).  Compare against ``model.mass(t)``: the softplus mass
    approaches the first for t << -tau and the second for t >> tau.
    """
    if not isinstance(model, SoftplusMass):
        raise TypeError("asymptotic_interpolation_check expects a SoftplusMass model")
    m_exp = float(ExponentialMass(m0=model.m0, tau=model.tau).mass(t))
    m_lin = model.m0 * t / model.tau
    return m_exp, m_lin
