"""Center of gravity T(h) of a partly filled solid and its lowest position.

The lowest position of the center of gravity is the unique fixed point
T(h*) = h*, i.e. the root of F(h) = m0(h)·h − m1(h). F'(h) = m0(h) > 0,
so F is strictly increasing with F(0) = −α·S1 ≤ 0 ≤ F(H).
"""
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq, minimize_scalar

from moments import (
    CrossSectionSolid,
    MassSpec,
    MaterialSpec,
    mass_moments,
    section_moments,
    surface_moments,
    volume_and_area,
)
from profiles import Cylinder, HalfSphere, Power, Profile, Sphere
from utils.errors import CogError, DomainError, NoBracket, NonFinite, ToleranceNotMet
from utils.quadrature import DEFAULT_TOL as QUAD_TOL

__all__ = [
    "Method",
    "EquilibriumResult",
    "CurveSample",
    "CogCurve",
    "MassForm",
    "cog",
    "cog_mass_form",
    "cog_derivative",
    "fixed_point_function",
    "solve_fixed_point",
    "solve_minimum_scan",
    "minimize_on_grid",
    "closed_form_cylinder",
    "solve_cone_cubic",
    "solve_power_equation",
    "solve_sphere_quartic",
    "solve_half_sphere_quartic",
    "alpha_from_h_sphere",
    "alpha_from_h_half_sphere",
    "solve_special_case",
    "ode_residual",
    "moment_rate_residual",
    "sample_curve",
    "mass_form_functions",
    "mass_form_cog",
    "mass_form_slope",
    "mass_form_ode_residual",
    "solve_mass_form",
    "sample_mass_form_curve",
    "cog_section",
    "solve_section",
    "section_ode_residual",
]

SOLVER_TOL = 1e-10
POLY_TOL = 1e-12
MAX_ITER = 200
SCAN_GRID = 1000
EPS = sys.float_info.epsilon


class Method(str, Enum):
    GENERAL_BRACKETED = "GeneralBracketed"
    CYLINDER_CLOSED_FORM = "CylinderClosedForm"
    CONE_CUBIC = "ConeCubic"
    POWER_EQUATION = "PowerEquation"
    SPHERE_QUARTIC = "SphereQuartic"
    HALF_SPHERE_QUARTIC = "HalfSphereQuartic"


@dataclass(frozen=True)
class EquilibriumResult:
    h_star: float
    T_star: float
    fixed_point_residual: float
    bracket: tuple
    iterations: int
    method: Method

    def to_dict(self):
        return {
            "h_star": self.h_star,
            "T_star": self.T_star,
            "fixed_point_residual": self.fixed_point_residual,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "method": self.method.value,
        }


@dataclass(frozen=True)
class CurveSample:
    h: float
    T: float
    T_prime: float
    m0: float
    m1: float
    error: str = None


@dataclass(frozen=True)
class CogCurve:
    samples: tuple

    header = ("h", "T", "dT", "m0", "m1")

    def rows(self):
        for s in self.samples:
            yield (s.h, s.T, s.T_prime, s.m0, s.m1)

    def column(self, name):
        index = self.header.index(name)
        return [row[index] for row in self.rows()]


def _interior(h, H):
    h = float(h)
    if not (0.0 < h < H):
        raise DomainError(f"h must lie strictly inside (0,H): h={h}, H={H}")
    return h


def _bracketed_root(fn, lo, hi, tol=POLY_TOL, max_iter=MAX_ITER):
    """Root of ``fn`` on [lo, hi] with Brent's method (bisection + interpolation).

    Returns (root, iterations).
    """
    flo, fhi = fn(lo), fn(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise NonFinite(f"non-finite value at the bracket ends: f({lo})={flo}, f({hi})={fhi}")
    if flo == 0.0:
        return lo, 0
    if fhi == 0.0:
        return hi, 0
    if (flo > 0.0) == (fhi > 0.0):
        raise NoBracket(f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}")
    xtol = min(tol, POLY_TOL) * (hi - lo)
    root, info = brentq(fn, lo, hi, xtol=xtol, rtol=4 * EPS, maxiter=max_iter, full_output=True, disp=False)
    if not info.converged:
        raise ToleranceNotMet(f"root refinement did not converge in {max_iter} iterations", value=root)
    return float(root), int(info.iterations)


# ---------------------------------------------------------------------------
# General solid of revolution
# ---------------------------------------------------------------------------

def cog(profile, material, h, tol=QUAD_TOL):
    """T(h) = m1(h)/m0(h)."""
    return mass_moments(profile, material, h, tol).cog


def _slope(profile, material, h, tol):
    ms = mass_moments(profile, material, h, tol)
    if ms.m0 == 0.0:
        raise DomainError(f"T'(h) is undefined where m0(h) = 0 (h={h})")
    return math.pi * material.beta * profile.g(h) ** 2 * (ms.m0 * h - ms.m1) / ms.m0 ** 2


def cog_derivative(profile, material, h, tol=QUAD_TOL):
    """T'(h) = πβ·g(h)²/m0(h)² · (m0(h)·h − m1(h))."""
    h = _interior(h, profile.height)
    return _slope(profile, material, h, tol)


def fixed_point_function(profile, material, tol=QUAD_TOL):
    """F(h) = m0(h)·h − m1(h) = α·S0·h + πβ·h·I0(h) − α·S1 − πβ·I1(h)."""

    def F(h):
        ms = mass_moments(profile, material, h, tol)
        return ms.m0 * h - ms.m1

    return F


def _result(h_star, T_star, bracket, iterations, method, tol):
    residual = abs(T_star - h_star)
    if residual > tol:
        raise ToleranceNotMet(
            f"fixed point residual |T(h*) - h*| = {residual:.3g} exceeds {tol:.3g}", value=h_star, estimate=residual
        )
    return EquilibriumResult(h_star, T_star, residual, bracket, iterations, method)


def solve_fixed_point(profile, material, tol=SOLVER_TOL, quad_tol=QUAD_TOL,
                      max_iter=MAX_ITER):
    """Unique root of F(h) on [0, H]; the lowest position of the center of gravity.

    With α = 0 the root is h* = 0 (F(0) = 0). With β = 0, T is constant and
    h* = S1/S0.
    """
    H = profile.height
    F = fixed_point_function(profile, material, quad_tol)
    h_star, iterations = _bracketed_root(F, 0.0, H, tol, max_iter)
    T_star = cog(profile, material, h_star, quad_tol)
    return _result(h_star, T_star, (0.0, H), iterations, Method.GENERAL_BRACKETED, tol)


def minimize_on_grid(fn, lo, hi, grid_size=SCAN_GRID, xtol=1e-10):
    """Argmin of ``fn`` over a uniform grid, refined by golden-section search in the best cell."""
    hs = np.linspace(lo, hi, grid_size)
    values = np.array([fn(h) for h in hs])
    i = int(np.argmin(values))
    if 0 < i < grid_size - 1:
        try:
            res = minimize_scalar(fn, bracket=(hs[i - 1], hs[i], hs[i + 1]), method="golden", tol=xtol)
            if hs[i - 1] <= res.x <= hs[i + 1]:
                return float(res.x)
        except ValueError:
            # flat cell: golden section needs f(b) < f(a), f(c)
            pass
        a, b = hs[i - 1], hs[i + 1]
    else:
        a, b = (hs[0], hs[1]) if i == 0 else (hs[-2], hs[-1])
    res = minimize_scalar(fn, bounds=(a, b), method="bounded", options={"xatol": xtol * (hi - lo)})
    return float(hs[i]) if values[i] <= res.fun else float(res.x)


def solve_minimum_scan(profile, material, grid_size=SCAN_GRID, tol=QUAD_TOL):
    """Brute-force argmin of T over [0, H]; certifies that the minimum is the fixed point.

    ``material`` may be a MassSpec for cylinder/cone profiles, in which case the
    mass form of T is scanned instead of the general engine.
    """
    if grid_size < 100:
        raise DomainError(f"grid_size must be >= 100, got {grid_size}")
    H = profile.height
    if isinstance(material, MassSpec):
        return minimize_on_grid(lambda h: mass_form_cog(profile.kind, material, H, h), 0.0, H, grid_size)
    if material.beta == 0.0:
        # shell only: T is constant, every level is a minimum
        S0, S1 = surface_moments(profile, tol)
        return S1 / S0
    return minimize_on_grid(lambda h: cog(profile, material, h, tol), 0.0, H, grid_size)


# ---------------------------------------------------------------------------
# Closed forms and special cases
# ---------------------------------------------------------------------------

def _require_positive(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0.0):
            raise DomainError(f"{name} must be positive, got {value}")


def closed_form_cylinder(M, m, H):
    """h = (MH/m)(√(1+m/M) − 1), the positive root of m·h² + 2MH·h − MH² = 0.

    Evaluated as H/(√(1+m/M) + 1), which is the same number without the
    cancellation for small m/M.
    """
    _require_positive(M=M, m=m, H=H)
    return H / (math.sqrt(1.0 + m / M) + 1.0)


def _cone_cubic(M, m, H, tol):
    _require_positive(M=M, H=H)
    if not (math.isfinite(m) and m >= 0.0):
        raise DomainError(f"m must be non-negative, got {m}")
    if m == 0.0:
        return 0.75 * H, 0
    # 4m·h³ + 12MH²·h − 9MH³
    cubic = Polynomial([-9.0 * M * H ** 3, 12.0 * M * H ** 2, 0.0, 4.0 * m])
    return _bracketed_root(lambda h: float(cubic(h)), 0.0, H, tol)


def solve_cone_cubic(M, m, H, tol=POLY_TOL):
    """Unique root in [0, H] of 4m·h³ + 12MH²·h − 9MH³ = 0."""
    return _cone_cubic(M, m, H, tol)[0]


def _power_equation(p, H, material, tol, quad_tol):
    _require_positive(p=p, H=H)
    a, b = material.alpha, material.beta
    if a == 0.0:
        return 0.0, 0
    S0, S1 = surface_moments(Power(p, H), quad_tol)
    c = math.pi * b / ((2 * p + 1) * (2 * p + 2))
    return _bracketed_root(lambda h: a * S0 * h - a * S1 + c * h ** (2 * p + 2), 0.0, H, tol)


def solve_power_equation(p, H, material, tol=POLY_TOL, quad_tol=QUAD_TOL):
    """Root of α·S0·h − α·S1 + πβ·h^(2p+2)/((2p+1)(2p+2)) = 0 for g(z) = z^p."""
    return _power_equation(p, H, material, tol, quad_tol)[0]


def _sphere_quartic(R, material, tol, half):
    _require_positive(R=R)
    a, b = material.alpha, material.beta
    if b <= 0.0:
        raise DomainError("the sphere quartic needs beta > 0")
    if a == 0.0:
        return 0.0, 0
    h = Polynomial([0.0, 1.0])
    shell = a * R ** 3 - 2.0 * a * R ** 2 * h if half else 4.0 * a * R ** 3 - 4.0 * a * R ** 2 * h
    quartic = shell + b * (2.0 * R * h ** 3 / 3.0 - h ** 4 / 4.0) - b * (R * h ** 2 - h ** 3 / 3.0) * h
    hi = R / 2.0 if half else R
    return _bracketed_root(lambda x: float(quartic(x)), 0.0, hi, tol)


def solve_sphere_quartic(R, material, tol=POLY_TOL):
    """Root in [0, R) of 4αR³ + β(2Rh³/3 − h⁴/4) − 4αR²h − β(Rh² − h³/3)h = 0."""
    return _sphere_quartic(R, material, tol, half=False)[0]


def solve_half_sphere_quartic(R, material, tol=POLY_TOL):
    """Root in [0, R/2) of αR³ + β(2Rh³/3 − h⁴/4) − 2αR²h − β(Rh² − h³/3)h = 0."""
    return _sphere_quartic(R, material, tol, half=True)[0]


def alpha_from_h_sphere(h, R, beta):
    """α = (β/48R²)·h³(4R − h)/(R − h), the density putting the minimum at ``h``."""
    _require_positive(R=R, beta=beta)
    if not (0.0 <= h < R):
        raise DomainError(f"h must lie in [0, R) for the sphere inversion, got h={h}, R={R}")
    return beta / (48.0 * R ** 2) * h ** 3 * (4.0 * R - h) / (R - h)


def alpha_from_h_half_sphere(h, R, beta):
    """α = (β/12R²)·(h⁴ − 4Rh³)/(2h − R)."""
    _require_positive(R=R, beta=beta)
    if not (0.0 <= h < R / 2.0):
        raise DomainError(f"h must lie in [0, R/2) for the half-sphere inversion, got h={h}, R={R}")
    return beta / (12.0 * R ** 2) * (h ** 4 - 4.0 * R * h ** 3) / (2.0 * h - R)


def solve_special_case(profile, material, tol=POLY_TOL,
                       quad_tol=QUAD_TOL):
    """Solve with the shape's own closed form or polynomial, if it has one."""
    H = profile.height
    if isinstance(profile, HalfSphere):
        if material.beta == 0.0:
            return None
        (h_star, iterations), method = _sphere_quartic(profile.radius, material, tol, True), Method.HALF_SPHERE_QUARTIC
        bracket = (0.0, profile.radius / 2.0)
    elif isinstance(profile, Sphere):
        if material.beta == 0.0:
            return None
        (h_star, iterations), method = _sphere_quartic(profile.radius, material, tol, False), Method.SPHERE_QUARTIC
        bracket = (0.0, profile.radius)
    elif isinstance(profile, Power):
        (h_star, iterations), method = _power_equation(profile.exponent, H, material, tol, quad_tol), Method.POWER_EQUATION
        bracket = (0.0, H)
    elif isinstance(profile, Cylinder):
        V, S0 = volume_and_area(profile, quad_tol)
        M, m = material.alpha * S0, material.beta * V
        if M == 0.0:
            h_star = 0.0
        elif m == 0.0:
            h_star = H / 2.0
        else:
            h_star = closed_form_cylinder(M, m, H)
        iterations, method, bracket = 0, Method.CYLINDER_CLOSED_FORM, (0.0, H)
    else:
        return None
    T_star = cog(profile, material, h_star, quad_tol)
    return _result(h_star, T_star, bracket, iterations, method, max(tol, SOLVER_TOL))


# ---------------------------------------------------------------------------
# Differential equation and moment-rate identity
# ---------------------------------------------------------------------------

def ode_residual(profile, material, h, tol=QUAD_TOL, fd_step=None):
    """T'(h) + (m0'(h)/m0(h))·(T(h) − h), with m0'(h) = πβ·g(h)².

    ``fd_step`` (relative to H) replaces the analytic T' by a central
    difference of T, an independent check of the identity.
    """
    H = profile.height
    h = _interior(h, H)
    ms = mass_moments(profile, material, h, tol)
    if fd_step is None:
        slope = _slope(profile, material, h, tol)
    else:
        step = fd_step * H
        if not (0.0 <= h - step and h + step <= H):
            raise DomainError(f"finite-difference stencil h±{step} leaves [0,H]")
        slope = (cog(profile, material, h + step, tol) - cog(profile, material, h - step, tol)) / (2.0 * step)
    rate = math.pi * material.beta * profile.g(h) ** 2
    return slope + rate / ms.m0 * (ms.cog - h)


def moment_rate_residual(profile, material, h, step, tol=QUAD_TOL):
    """Central difference of m1 = T·m0 minus h·πβ·g(h)²; O(step²) for smooth g."""
    H = profile.height
    if not (step > 0.0 and 0.0 < h - step and h + step < H):
        raise DomainError(f"stencil h±step must lie inside (0,H): h={h}, step={step}, H={H}")

    def first_moment(x):
        ms = mass_moments(profile, material, x, tol)
        return ms.cog * ms.m0

    derivative = (first_moment(h + step) - first_moment(h - step)) / (2.0 * step)
    return derivative - h * math.pi * material.beta * profile.g(h) ** 2


def _grid(H, n_samples):
    if n_samples < 2:
        raise DomainError(f"n_samples must be >= 2, got {n_samples}")
    hs = np.linspace(0.0, H, int(n_samples))
    hs[-1] = H
    return hs


def sample_curve(profile, material, n_samples, tol=QUAD_TOL):
    """(h, T, T', m0, m1) on the uniform grid h_i = i·H/(n−1).

    A row whose evaluation fails keeps its h and carries the error message;
    T' is absent where it is undefined (m0 = 0).
    """
    samples = []
    for h in _grid(profile.height, n_samples):
        h = float(h)
        try:
            ms = mass_moments(profile, material, h, tol)
        except CogError as e:
            samples.append(CurveSample(h, None, None, None, None, str(e)))
            continue
        try:
            slope = _slope(profile, material, h, tol)
        except CogError:
            slope = None
        samples.append(CurveSample(h, ms.cog, slope, ms.m0, ms.m1))
    return CogCurve(tuple(samples))


# ---------------------------------------------------------------------------
# Mass forms (shell mass M, full-fill mass m)
# ---------------------------------------------------------------------------

class MassForm(NamedTuple):
    fill_fraction: Callable[[float], float]
    fill_fraction_rate: Callable[[float], float]
    fill_cog: Callable[[float], float]
    shell_cog: float


def mass_form_functions(kind, H):
    """Fill fraction, its rate, fill centroid and default shell centroid.

    The cone form places the empty-cone centroid at 3H/4 and weights the fill
    by (h/H)² with centroid 2h/3.
    """
    if kind == "cylinder":
        return MassForm(lambda h: h / H, lambda h: 1.0 / H, lambda h: h / 2.0, H / 2.0)
    if kind == "cone":
        return MassForm(lambda h: (h / H) ** 2, lambda h: 2.0 * h / H ** 2, lambda h: 2.0 * h / 3.0, 0.75 * H)
    raise DomainError(f"mass form is defined for the cylinder and the cone only, got {kind!r}")


def cog_mass_form(mass, fill_cog_fn, fill_fraction_fn, h):
    """(M·shell_cog + m·f(h)·c(h)) / (M + m·f(h)) with fill fraction f and fill centroid c."""
    fraction = fill_fraction_fn(h)
    return (mass.M * mass.shell_cog + mass.m * fraction * fill_cog_fn(h)) / (mass.M + mass.m * fraction)


def mass_form_cog(kind, mass, H, h):
    form = mass_form_functions(kind, H)
    mass.check(H)
    h = float(h)
    if not (0.0 <= h <= H):
        raise DomainError(f"h outside [0,H]: h={h}, H={H}")
    return cog_mass_form(mass, form.fill_cog, form.fill_fraction, h)


def mass_form_slope(kind, mass, H, h):
    """T'(h) = −(m0'(h)/m0(h))·(T(h) − h) with m0 = M + m·f(h)."""
    form = mass_form_functions(kind, H)
    T = mass_form_cog(kind, mass, H, h)
    return -mass.m * form.fill_fraction_rate(h) / (mass.M + mass.m * form.fill_fraction(h)) * (T - h)


def mass_form_ode_residual(kind, mass, H, h, step=1e-5):
    """Central difference of the mass-form T minus the first-order ODE slope."""
    h = _interior(h, H)
    s = step * H
    if not (0.0 <= h - s and h + s <= H):
        raise DomainError(f"finite-difference stencil h±{s} leaves [0,H]")
    slope = (mass_form_cog(kind, mass, H, h + s) - mass_form_cog(kind, mass, H, h - s)) / (2.0 * s)
    return slope - mass_form_slope(kind, mass, H, h)


def solve_mass_form(kind, mass, H, tol=POLY_TOL):
    """Fixed point of a mass-form scenario.

    Uses the closed form (cylinder) or the cubic (cone) when the shell
    centroid is the default one, otherwise brackets F(h) = m0(h)·h − m1(h).
    """
    form = mass_form_functions(kind, H)
    mass.check(H)
    if mass.shell_cog == form.shell_cog and kind == "cylinder":
        h_star = closed_form_cylinder(mass.M, mass.m, H) if mass.m > 0.0 else H / 2.0
        iterations, method = 0, Method.CYLINDER_CLOSED_FORM
    elif mass.shell_cog == form.shell_cog and kind == "cone":
        (h_star, iterations), method = _cone_cubic(mass.M, mass.m, H, tol), Method.CONE_CUBIC
    else:
        def F(h):
            fraction = form.fill_fraction(h)
            return (mass.M + mass.m * fraction) * h - mass.M * mass.shell_cog - mass.m * fraction * form.fill_cog(h)

        (h_star, iterations), method = _bracketed_root(F, 0.0, H, tol), Method.GENERAL_BRACKETED
    T_star = cog_mass_form(mass, form.fill_cog, form.fill_fraction, h_star)
    return _result(h_star, T_star, (0.0, H), iterations, method, max(tol, SOLVER_TOL))


def sample_mass_form_curve(kind, mass, H, n_samples):
    form = mass_form_functions(kind, H)
    samples = []
    for h in _grid(H, n_samples):
        h = float(h)
        T = mass_form_cog(kind, mass, H, h)
        m0 = mass.M + mass.m * form.fill_fraction(h)
        samples.append(CurveSample(h, T, mass_form_slope(kind, mass, H, h), m0, T * m0))
    return CogCurve(tuple(samples))


# ---------------------------------------------------------------------------
# Cross-section engine: any solid known through its section area f(h)
# ---------------------------------------------------------------------------

def cog_section(solid, material, h, tol=QUAD_TOL):
    return section_moments(solid, material, h, tol).cog


def solve_section(solid, material, tol=SOLVER_TOL, quad_tol=QUAD_TOL,
                  max_iter=MAX_ITER):
    def F(h):
        ms = section_moments(solid, material, h, quad_tol)
        return ms.m0 * h - ms.m1

    h_star, iterations = _bracketed_root(F, 0.0, solid.height, tol, max_iter)
    T_star = cog_section(solid, material, h_star, quad_tol)
    return _result(h_star, T_star, (0.0, solid.height), iterations, Method.GENERAL_BRACKETED, tol)


def section_ode_residual(solid, material, h, step=1e-5,
                         tol=QUAD_TOL):
    """Central difference of T minus −(m'(h)/m(h))·(T(h) − h) with m'(h) = β·f(h)."""
    H = solid.height
    h = _interior(h, H)
    s = step * H
    if not (0.0 <= h - s and h + s <= H):
        raise DomainError(f"finite-difference stencil h±{s} leaves [0,H]")
    slope = (cog_section(solid, material, h + s, tol) - cog_section(solid, material, h - s, tol)) / (2.0 * s)
    ms = section_moments(solid, material, h, tol)
    return slope + material.beta * solid.area(h) / ms.m0 * (ms.cog - h)
