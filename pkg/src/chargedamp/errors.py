"""Exception hierarchy shared across the package.

Three families matter for callers (and for the CLI exit codes):
validation problems (bad inputs, exit 1), solver failures (exit 2), and
verification failures (exit 3). Everything derives from ``ChargedampError``
so library users can catch one base class.
"""

from __future__ import annotations


class ChargedampError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ChargedampError):
    """Invalid user input: scenario, model parameters, CLI arguments."""


class MassNonPositiveError(ValidationError):
    """Mass model is non-positive somewhere inside the requested window."""

    def __init__(self, t: float, mass: float | None = None):
        self.t = t
        self.mass = mass
        if mass is None:
            message = f"mass model is undefined at t={t!r} s (outside its positivity domain)"
        else:
            message = f"mass model is non-positive at t={t!r} s (m={mass!r} kg)"
        super().__init__(message)


class BadWindowError(ValidationError):
    """Time window is empty or reversed."""


class BadStrideError(ValidationError):
    """Output stride is non-positive or larger than the window."""


class WrongModelError(ValidationError):
    """An operation was asked to use a mass model it does not support."""


class MassDomainError(ChargedampError):
    """Mass model evaluated outside its domain (e.g. linear law at t <= -k*tau)."""


class BetaDomainError(ChargedampError):
    """The field-stiffness reparametrization argument is non-positive."""


class DivisionDomainError(ChargedampError):
    """Stationary velocity undefined: both the drag rate and the field vanish."""


class SolverError(ChargedampError):
    """Numerical solution could not be produced."""


class StepFailureError(SolverError):
    """Adaptive integrator failed to reach the end of the window."""


class SingularStartError(SolverError):
    """The regularized launch of the shear equations is not applicable."""


class SingularTimeError(SolverError):
    """Requested kernel evaluation at (or too close to) a focusing caustic."""


class QuadratureNotConvergedError(SolverError):
    """Grid-refinement check of a quadrature failed to meet tolerance."""


class VerificationError(ChargedampError):
    """A cross-check between independent solution routes failed."""
