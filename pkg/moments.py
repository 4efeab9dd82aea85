"""Geometric and mass moments of the shell and of the fill.

All moments are taken relative to the base plane P0.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from profiles import Profile
from utils.errors import DomainError, InvalidMaterial
from utils.quadrature import DEFAULT_TOL, integrate

__all__ = [
    "MaterialSpec",
    "MassSpec",
    "MomentSet",
    "CrossSectionSolid",
    "surface_moments",
    "volume_and_area",
    "cross_section_area",
    "fill_integrals",
    "mass_moments",
    "section_moments",
    "material_from_mass",
    "mass_from_material",
]

METHODS = ("auto", "quadrature")


def _density(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise InvalidMaterial(f"{name} must be a finite non-negative density, got {value}")
    return value


@dataclass(frozen=True)
class MaterialSpec:
    """Surface density ``alpha`` of the shell and volume density ``beta`` of the fill."""

    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _density("alpha", self.alpha))
        object.__setattr__(self, "beta", _density("beta", self.beta))
        if self.alpha == 0.0 and self.beta == 0.0:
            raise InvalidMaterial("alpha and beta cannot both be zero")


@dataclass(frozen=True)
class MassSpec:
    """Abstract masses: shell mass ``M``, full-fill mass ``m``, shell centroid height."""

    M: float
    m: float
    shell_cog: float

    def __post_init__(self):
        M, m = float(self.M), float(self.m)
        if not math.isfinite(M) or M <= 0.0:
            raise InvalidMaterial(f"shell mass M must be positive, got {M}")
        if not math.isfinite(m) or m < 0.0:
            raise InvalidMaterial(f"fill mass m must be non-negative, got {m}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "shell_cog", float(self.shell_cog))

    def check(self, height):
        if not (0.0 <= self.shell_cog <= height):
            raise DomainError(f"shell_cog={self.shell_cog} must lie in [0, H={height}]")
        return self


@dataclass(frozen=True)
class MomentSet:
    S0: float
    S1: float
    m0: float
    m1: float

    @property
    def cog(self):
        # empty massless shell: the fill centroid tends to the bottom
        return self.m1 / self.m0 if self.m0 > 0.0 else 0.0


def _check_method(method):
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}, got {method!r}")


@lru_cache(maxsize=256)
def _surface_moments(profile, tol, method):
    closed = profile.closed_surface_moments() if method == "auto" else None
    if closed is not None:
        return closed
    H = profile.height
    marks = profile.breakpoints()
    s0 = integrate(profile.arc, 0.0, H, tol, breakpoints=marks).value
    s1 = integrate(lambda z: z * profile.arc(z), 0.0, H, tol, breakpoints=marks).value
    return 2.0 * math.pi * s0, 2.0 * math.pi * s1


def surface_moments(profile, tol=DEFAULT_TOL, method="auto"):
    """Zero-th and first area moments (S0, S1) of the surface of revolution.

    ``method="quadrature"`` skips the closed forms; used to cross-check them.
    """
    _check_method(method)
    return _surface_moments(profile, float(tol), method)


def volume_and_area(profile, tol=DEFAULT_TOL, method="auto"):
    I0, _ = fill_integrals(profile, profile.height, tol, method)
    S0, _ = surface_moments(profile, tol, method)
    return math.pi * I0, S0


def cross_section_area(profile, h):
    return math.pi * profile.g(h) ** 2


def fill_integrals(profile, h, tol=DEFAULT_TOL, method="auto"):
    """I0 = ∫₀ʰ g² dz and I1 = ∫₀ʰ z·g² dz."""
    _check_method(method)
    h = profile.check_level(h, "h")
    if h == 0.0:
        return 0.0, 0.0
    closed = profile.closed_fill_integrals(h) if method == "auto" else None
    if closed is not None:
        return closed
    marks = profile.breakpoints()
    I0 = integrate(lambda z: profile._g(z) ** 2, 0.0, h, tol, breakpoints=marks).value
    I1 = integrate(lambda z: z * profile._g(z) ** 2, 0.0, h, tol, breakpoints=marks).value
    return I0, I1


def mass_moments(profile, material, h, tol=DEFAULT_TOL, method="auto"):
    """m0(h) = α·S0 + πβ·I0(h) and m1(h) = α·S1 + πβ·I1(h)."""
    if not isinstance(material, MaterialSpec):
        raise InvalidMaterial(f"expected a MaterialSpec, got {type(material).__name__}")
    S0, S1 = surface_moments(profile, tol, method)
    I0, I1 = fill_integrals(profile, h, tol, method)
    a, b = material.alpha, material.beta
    return MomentSet(S0, S1, a * S0 + math.pi * b * I0, a * S1 + math.pi * b * I1)


@dataclass(frozen=True)
class CrossSectionSolid:
    """A solid between P0 and PH known through its cross-section area f(h).

    ``S0``/``S1`` are the area moments of its surface. No symmetry is assumed.
    """

    height: float
    area: Callable[[float], float] = field(compare=False)
    S0: float
    S1: float
    breakpoints: tuple = ()

    def __post_init__(self):
        if not self.height > 0.0:
            raise DomainError(f"height must be positive, got {self.height}")
        if not self.S0 > 0.0:
            raise DomainError(f"S0 must be positive, got {self.S0}")
        if not (0.0 <= self.S1 <= self.height * self.S0):
            raise DomainError(f"S1={self.S1} must lie in [0, H·S0]")

    @classmethod
    def from_profile(cls, profile, tol=DEFAULT_TOL):
        S0, S1 = surface_moments(profile, tol)
        return cls(
            height=profile.height,
            area=lambda z: math.pi * profile._g(z) ** 2,
            S0=S0,
            S1=S1,
            breakpoints=tuple(profile.breakpoints()),
        )

    def check_level(self, h, what="h"):
        h = float(h)
        if not (0.0 <= h <= self.height):
            raise DomainError(f"{what} outside [0,H]: {what}={h}, H={self.height}")
        return h


def section_moments(solid, material, h, tol=DEFAULT_TOL):
    """m0 = α·S0 + β·∫₀ʰ f and m1 = α·S1 + β·∫₀ʰ z·f (f is already an area)."""
    h = solid.check_level(h)
    if h == 0.0:
        J0 = J1 = 0.0
    else:
        J0 = integrate(solid.area, 0.0, h, tol, breakpoints=solid.breakpoints).value
        J1 = integrate(lambda z: z * solid.area(z), 0.0, h, tol, breakpoints=solid.breakpoints).value
    a, b = material.alpha, material.beta
    return MomentSet(solid.S0, solid.S1, a * solid.S0 + b * J0, a * solid.S1 + b * J1)


def material_from_mass(profile, mass, tol=DEFAULT_TOL):
    """α = M/S0 and β = m/V; the shell is the surface of revolution only."""
    V, S0 = volume_and_area(profile, tol)
    return MaterialSpec(mass.M / S0, mass.m / V)


def mass_from_material(profile, material, tol=DEFAULT_TOL):
    V, S0 = volume_and_area(profile, tol)
    _, S1 = surface_moments(profile, tol)
    return MassSpec(material.alpha * S0, material.beta * V, S1 / S0)
