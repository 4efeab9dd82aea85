"""Adaptive quadrature on [a, b].

Thin layer over QUADPACK (``scipy.integrate.quad``): Gauss-Kronrod 21-point
panels never sample the interval ends, and the epsilon-algorithm
extrapolation handles integrable endpoint singularities such as z^(-1/2).
"""
import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import DomainError, NonFinite, ToleranceNotMet

__all__ = ["QuadratureResult", "integrate", "DEFAULT_TOL", "MAX_EVALUATIONS"]

DEFAULT_TOL = 1e-10
MAX_EVALUATIONS = 10 ** 6
KRONROD_POINTS = 21


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


class _Counted:

    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        y = float(self.f(x))
        if not math.isfinite(y):
            raise NonFinite(f"integrand returned {y} at x={x}")
        return y


def integrate(f, a, b, tol=DEFAULT_TOL, max_evaluations=MAX_EVALUATIONS, breakpoints=()):
    """Integrate ``f`` over [a, b] to ``max(tol, tol·|value|)``.

    Args:
        f (callable): pure integrand, finite on the open interval.
        breakpoints (iterable): interior points where ``f`` has kinks.

    Raises:
        ToleranceNotMet: the evaluation budget ran out before the tolerance.
        NonFinite: ``f`` returned inf/nan at an interior sample.
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise DomainError(f"integration limits must satisfy a <= b, got [{a}, {b}]")
    if not tol > 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)

    points = sorted(p for p in breakpoints if a < p < b) or None
    limit = max(1, max_evaluations // (2 * KRONROD_POINTS))
    counted = _Counted(f)
    value, error, _info, *message = quad(
        counted, a, b, epsabs=tol, epsrel=tol, limit=limit, points=points, full_output=1
    )
    if message and error > max(tol, tol * abs(value)):
        raise ToleranceNotMet(
            f"quadrature on [{a}, {b}] stopped at error {error:.3g} > {tol:.3g}: {message[0].splitlines()[0]}",
            value=value,
            estimate=error,
        )
    return QuadratureResult(float(value), float(error), counted.calls)
