import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from utils.errors import DomainError
from .expression import ExprAst, parse_expression

__all__ = [
    "PROFILES",
    "Profile",
    "Cylinder",
    "Cone",
    "Power",
    "Sphere",
    "HalfSphere",
    "Expression",
    "Tabulated",
    "get_profile_class",
    "parse_profile",
    "eval_g",
    "eval_g_prime",
    "arc_integrand",
]

PROFILES = [
    "cylinder",
    "cone",
    "power",
    "sphere",
    "half_sphere",
    "expression",
    "tabulated",
]

# cube root of machine precision, the usual step for central differences
FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a positive finite number, got {value}")
    return value


class Profile:
    """Generating curve x = g(z) on [0, H] of a solid of revolution.

    Subclasses are frozen dataclasses and implement ``_g`` (vectorized, no
    domain checks) and ``_g_prime``. They may provide closed forms through
    ``closed_surface_moments`` and ``closed_fill_integrals``; ``None`` means
    the moments module falls back to quadrature.
    """

    kind: ClassVar[str] = ""

    def _g(self, z):
        raise NotImplementedError

    def _g_prime(self, z):
        raise NotImplementedError

    def _arc(self, z):
        return float(self._g(z)) * math.hypot(1.0, self._g_prime(z))

    def check_level(self, z, what="z"):
        z = float(z)
        if not (0.0 <= z <= self.height):
            raise DomainError(f"{what} outside [0,H]: {what}={z}, H={self.height}")
        return z

    def g(self, z):
        return float(self._g(self.check_level(z)))

    def g_prime(self, z):
        return float(self._g_prime(self.check_level(z)))

    def arc(self, z):
        return float(self._arc(self.check_level(z)))

    def g_values(self, z):
        """Vectorized g(z) for a numpy array of levels inside [0, H]."""
        z = np.asarray(z, dtype=float)
        if z.size and (z.min() < 0.0 or z.max() > self.height):
            raise DomainError(f"levels outside [0,H], H={self.height}")
        return np.broadcast_to(np.asarray(self._g(z), dtype=float), z.shape).copy()

    def breakpoints(self):
        """Interior levels where g is not smooth."""
        return ()

    def closed_surface_moments(self):
        return None

    def closed_fill_integrals(self, h):
        return None

    def describe(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Cylinder(Profile):
    radius: float
    height: float

    kind: ClassVar[str] = "cylinder"

    def __post_init__(self):
        _positive("radius", self.radius)
        _positive("height", self.height)

    def _g(self, z):
        return np.full_like(z, self.radius, dtype=float) if isinstance(z, np.ndarray) else self.radius

    def _g_prime(self, z):
        return 0.0

    def closed_surface_moments(self):
        r, H = self.radius, self.height
        return 2.0 * math.pi * r * H, math.pi * r * H ** 2

    def closed_fill_integrals(self, h):
        r2 = self.radius ** 2
        return r2 * h, r2 * h ** 2 / 2.0

    def describe(self):
        return {"kind": self.kind, "r": self.radius, "H": self.height}


@dataclass(frozen=True)
class Cone(Profile):
    """Cone with its vertex on P0: g(z) = r·z/H."""

    top_radius: float
    height: float

    kind: ClassVar[str] = "cone"

    def __post_init__(self):
        _positive("top_radius", self.top_radius)
        _positive("height", self.height)

    def _g(self, z):
        return self.top_radius * z / self.height

    def _g_prime(self, z):
        return self.top_radius / self.height

    def closed_surface_moments(self):
        r, H = self.top_radius, self.height
        slant = math.hypot(H, r)
        return math.pi * r * slant, 2.0 * math.pi * r * H * slant / 3.0

    def closed_fill_integrals(self, h):
        c = (self.top_radius / self.height) ** 2
        return c * h ** 3 / 3.0, c * h ** 4 / 4.0

    def describe(self):
        return {"kind": self.kind, "r": self.top_radius, "H": self.height}


@dataclass(frozen=True)
class Power(Profile):
    """Power solid g(z) = z^p."""

    exponent: float
    height: float

    kind: ClassVar[str] = "power"

    def __post_init__(self):
        _positive("exponent", self.exponent)
        _positive("height", self.height)

    def _g(self, z):
        return np.power(z, self.exponent)

    def _g_prime(self, z):
        p = self.exponent
        if z == 0.0:
            if p < 1.0:
                raise DomainError(f"g'(0) is unbounded for the power solid with p={p}")
            return 1.0 if p == 1.0 else 0.0
        return p * z ** (p - 1.0)

    def closed_surface_moments(self):
        if self.exponent != 1.0:
            return None
        H = self.height
        return math.pi * math.sqrt(2.0) * H ** 2, 2.0 * math.pi * math.sqrt(2.0) * H ** 3 / 3.0

    def closed_fill_integrals(self, h):
        p = self.exponent
        return h ** (2 * p + 1) / (2 * p + 1), h ** (2 * p + 2) / (2 * p + 2)

    def describe(self):
        return {"kind": self.kind, "p": self.exponent, "H": self.height}


@dataclass(frozen=True)
class Sphere(Profile):
    """Sphere of radius R centred at (0, 0, R); H = 2R."""

    radius: float

    kind: ClassVar[str] = "sphere"

    def __post_init__(self):
        _positive("radius", self.radius)

    @property
    def height(self):
        return 2.0 * self.radius

    def _g(self, z):
        R = self.radius
        return np.sqrt(np.maximum(R * R - (R - z) ** 2, 0.0))

    def _g_prime(self, z):
        g = float(self._g(z))
        if g == 0.0:
            raise DomainError(f"g'(z) is unbounded at the pole z={z}")
        return (self.radius - z) / g

    def _arc(self, z):
        # g·sqrt(1+g'²) is identically R on a sphere
        return self.radius

    def closed_surface_moments(self):
        R = self.radius
        return 4.0 * math.pi * R ** 2, 4.0 * math.pi * R ** 3

    def closed_fill_integrals(self, h):
        R = self.radius
        return R * h ** 2 - h ** 3 / 3.0, 2.0 * R * h ** 3 / 3.0 - h ** 4 / 4.0

    def describe(self):
        return {"kind": self.kind, "R": self.radius, "H": self.height}


@dataclass(frozen=True)
class HalfSphere(Sphere):
    """Lower half of the sphere: same curve on [0, R]."""

    kind: ClassVar[str] = "half_sphere"

    @property
    def height(self):
        return self.radius

    def closed_surface_moments(self):
        R = self.radius
        return 2.0 * math.pi * R ** 2, math.pi * R ** 3


@dataclass(frozen=True)
class Expression(Profile):
    ast: ExprAst
    height: float
    text: str = field(default="", compare=False)
    slope: ExprAst = field(init=False, repr=False, compare=False)

    kind: ClassVar[str] = "expression"

    def __post_init__(self):
        _positive("height", self.height)
        object.__setattr__(self, "slope", self.ast.derivative())

    @staticmethod
    def _run(node, z):
        try:
            with np.errstate(divide="raise", invalid="raise", over="raise"):
                value = node.evaluate(z)
        except (FloatingPointError, ZeroDivisionError, OverflowError) as e:
            raise DomainError(f"expression {node} is undefined at z={z}: {e}") from e
        if not np.all(np.isfinite(value)):
            raise DomainError(f"expression {node} is not finite at z={z}")
        return value

    def _g(self, z):
        return self._run(self.ast, z)

    def _g_prime(self, z):
        return float(self._run(self.slope, z))

    def describe(self):
        return {"kind": self.kind, "g": self.text or str(self.ast), "H": self.height}


@dataclass(frozen=True)
class Tabulated(Profile):
    """Piecewise-linear profile through ordered (z, g) points."""

    points: tuple
    _zs: np.ndarray = field(init=False, repr=False, compare=False)
    _gs: np.ndarray = field(init=False, repr=False, compare=False)

    kind: ClassVar[str] = "tabulated"

    def __post_init__(self):
        points = tuple((float(z), float(g)) for z, g in self.points)
        object.__setattr__(self, "points", points)
        if len(points) < 2:
            raise DomainError("a tabulated profile needs at least two points")
        zs = np.array([p[0] for p in points])
        gs = np.array([p[1] for p in points])
        if not (np.all(np.isfinite(zs)) and np.all(np.isfinite(gs))):
            raise DomainError("tabulated points must be finite")
        if zs[0] != 0.0:
            raise DomainError(f"first tabulated point must be at z=0, got {zs[0]}")
        if np.any(np.diff(zs) <= 0.0):
            raise DomainError("tabulated z values must be strictly increasing")
        if np.any(gs < 0.0) or np.any(gs[1:-1] <= 0.0):
            raise DomainError("tabulated g must be >= 0, and > 0 at interior points")
        object.__setattr__(self, "_zs", zs)
        object.__setattr__(self, "_gs", gs)

    @property
    def height(self):
        return self.points[-1][0]

    def _g(self, z):
        value = np.interp(z, self._zs, self._gs)
        return value if isinstance(z, np.ndarray) else float(value)

    def _g_prime(self, z):
        H = self.height
        step = FD_STEP * H
        lo = max(z - step, 0.0)
        hi = min(z + step, H)
        return (self._g(hi) - self._g(lo)) / (hi - lo)

    def breakpoints(self):
        return tuple(z for z, _ in self.points[1:-1])

    def describe(self):
        return {"kind": self.kind, "points": [list(p) for p in self.points], "H": self.height}


def get_profile_class(kind):
    """Return the profile class registered under ``kind``."""
    for cls in (Cylinder, Cone, Power, Sphere, HalfSphere, Expression, Tabulated):
        if cls.kind == kind:
            return cls
    raise DomainError(f"Profile kind not found: {kind} (known: {', '.join(PROFILES)})")


def parse_profile(text, height, constants=None):
    """Parse ``text`` into an Expression profile on [0, height].

    Raises ParseError on malformed text and DomainError when g(H/2) is
    negative or not finite.
    """
    height = _positive("height", height)
    ast = parse_expression(text, constants)
    profile = Expression(ast=ast, height=height, text=text)
    g_mid = float(profile._g(height / 2.0))
    if g_mid < 0.0:
        raise DomainError(f"g(H/2) = {g_mid} is negative")
    return profile


def eval_g(profile, z):
    return profile.g(z)


def eval_g_prime(profile, z):
    return profile.g_prime(z)


def arc_integrand(profile, z):
    """g(z)·sqrt(1 + g'(z)²), the surface-moment integrand."""
    return profile.arc(z)
