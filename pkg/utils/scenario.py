"""Scenario files: one solid, one material, solver settings.

A scenario is a flat JSON object, e.g.::

    {"name": "sphere", "kind": "sphere", "R": 1, "alpha": 0.018229166666666668, "beta": 1}

See README.md for the full schema.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from equilibrium import mass_form_functions
from moments import MassSpec, MaterialSpec, material_from_mass
from profiles import Cone, Cylinder, HalfSphere, Power, Profile, Sphere, Tabulated, parse_profile
from utils.errors import DomainError, SchemaError, UnknownParam, ValidationError
from utils.registry import sweepable

__all__ = ["Scenario", "load_scenario", "scenario_from_dict", "scenario_with", "DEFAULT_TOL", "DEFAULT_SAMPLES"]

DEFAULT_TOL = 1e-8
DEFAULT_SAMPLES = 201
PROFILE_CHECK_GRID = 1001  # levels on which an expression profile must stay positive

COMMON_KEYS = frozenset({"name", "description", "kind", "alpha", "beta", "M", "m", "shell_cog", "tol", "samples"})
GEOMETRY_KEYS = {
    "cylinder": frozenset({"H", "r"}),
    "cone": frozenset({"H", "r"}),
    "power": frozenset({"H", "p"}),
    "sphere": frozenset({"R", "H"}),
    "half_sphere": frozenset({"R", "H"}),
    "expression": frozenset({"g", "H", "constants"}),
    "tabulated": frozenset({"points", "H"}),
}
MASS_FORM_KINDS = ("cylinder", "cone")


@dataclass(frozen=True)
class Scenario:
    name: str
    profile: Profile
    material: MaterialSpec
    mass: MassSpec
    tol: float = DEFAULT_TOL
    samples: int = DEFAULT_SAMPLES
    raw: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def kind(self):
        return self.profile.kind

    @property
    def height(self):
        return self.profile.height

    @property
    def mass_form(self):
        return self.mass is not None

    def engine_material(self, tol=1e-10):
        """Densities for the general engine; mass forms are converted with α = M/S0, β = m/V."""
        if self.material is not None:
            return self.material
        return material_from_mass(self.profile, self.mass, tol)


def _number(raw, key, required=True, positive=False):
    if key not in raw:
        if required:
            raise SchemaError(key, "missing required field")
        return None
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(key, f"expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(key, f"expected a finite number, got {value}")
    if positive and value <= 0.0:
        raise ValidationError(f"{key} > 0", f"{key} must be positive, got {value}")
    return value


def _infer_kind(raw):
    if "kind" in raw:
        kind = raw["kind"]
        if not isinstance(kind, str):
            raise SchemaError("kind", f"expected a string, got {type(kind).__name__}")
        if kind not in GEOMETRY_KEYS:
            raise SchemaError("kind", f"unknown profile kind {kind!r} (known: {', '.join(GEOMETRY_KEYS)})")
        return kind
    if "g" in raw:
        return "expression"
    if "points" in raw:
        return "tabulated"
    raise SchemaError("kind", "missing required field (or give 'g' / 'points')")


def _constants(raw):
    constants = raw.get("constants", {})
    if not isinstance(constants, dict):
        raise SchemaError("constants", "expected an object of name -> number")
    out = {}
    for name, value in constants.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"constants.{name}", f"expected a number, got {type(value).__name__}")
        out[name] = float(value)
    return out


def _points(raw):
    points = raw["points"] if "points" in raw else None
    if not isinstance(points, list):
        raise SchemaError("points", "expected an array of [z, g] pairs")
    out = []
    for i, point in enumerate(points):
        if (not isinstance(point, list) or len(point) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in point)):
            raise SchemaError(f"points[{i}]", "expected a [z, g] pair of numbers")
        out.append((float(point[0]), float(point[1])))
    return tuple(out)


def _profile(kind, raw):
    if kind == "cylinder":
        return Cylinder(_number(raw, "r", positive=True), _number(raw, "H", positive=True))
    if kind == "cone":
        return Cone(_number(raw, "r", positive=True), _number(raw, "H", positive=True))
    if kind == "power":
        return Power(_number(raw, "p", positive=True), _number(raw, "H", positive=True))
    if kind in ("sphere", "half_sphere"):
        cls = HalfSphere if kind == "half_sphere" else Sphere
        profile = cls(_number(raw, "R", positive=True))
        H = _number(raw, "H", required=False)
        if H is not None and H != profile.height:
            raise ValidationError("H derived from R", f"H={H} does not match the {kind} height {profile.height}")
        return profile
    if kind == "expression":
        text = raw.get("g")
        if not isinstance(text, str):
            raise SchemaError("g", "expected the profile expression as a string")
        H = _number(raw, "H", positive=True)
        profile = parse_profile(text, H, _constants(raw))
        g = profile.g_values(np.linspace(0.0, H, PROFILE_CHECK_GRID))
        if np.any(g < 0.0) or np.any(g[1:-1] == 0.0):
            raise ValidationError("g >= 0 on [0,H], g > 0 inside", f"profile '{text}' is negative or vanishes inside (0, {H:g})")
        return profile
    profile = Tabulated(_points(raw))
    H = _number(raw, "H", required=False)
    if H is not None and H != profile.height:
        raise ValidationError("H equals the last tabulated z", f"H={H} but the last point is at z={profile.height}")
    return profile


def _material(kind, raw, profile):
    has_density = "alpha" in raw or "beta" in raw
    has_mass = "M" in raw or "m" in raw or "shell_cog" in raw
    if has_density and has_mass:
        raise SchemaError("alpha", "give either {alpha, beta} or {M, m, shell_cog}, not both")
    if not (has_density or has_mass):
        raise SchemaError("alpha", "missing material: give {alpha, beta} or {M, m}")
    if has_density:
        return MaterialSpec(_number(raw, "alpha"), _number(raw, "beta")), None
    if kind not in MASS_FORM_KINDS:
        raise SchemaError("M", f"the mass form is defined for {' and '.join(MASS_FORM_KINDS)} only, not {kind}")
    shell_cog = _number(raw, "shell_cog", required=False)
    if shell_cog is None:
        shell_cog = mass_form_functions(kind, profile.height).shell_cog
    mass = MassSpec(_number(raw, "M"), _number(raw, "m"), shell_cog)
    return None, mass.check(profile.height)


def scenario_from_dict(raw, default_tol=DEFAULT_TOL, default_samples=DEFAULT_SAMPLES, name=""):
    """Validate a scenario mapping.

    Raises:
        SchemaError: unknown or missing fields, wrong types, ambiguous material.
        ValidationError: a profile or material invariant does not hold.
        ParseError: malformed profile expression.
    """
    if not isinstance(raw, dict):
        raise SchemaError("", f"a scenario must be a JSON object, got {type(raw).__name__}")
    kind = _infer_kind(raw)
    unknown = sorted(set(raw) - COMMON_KEYS - GEOMETRY_KEYS[kind])
    if unknown:
        raise SchemaError(unknown[0], f"unknown field for a {kind} scenario")

    try:
        profile = _profile(kind, raw)
    except DomainError as e:
        raise ValidationError("profile", e.msg) from e
    try:
        material, mass = _material(kind, raw, profile)
    except DomainError as e:
        raise ValidationError("material", e.msg) from e

    tol = _number(raw, "tol", required=False)
    tol = default_tol if tol is None else tol
    if not tol > 0.0:
        raise ValidationError("tol > 0", f"tol must be positive, got {tol}")
    samples = raw.get("samples", default_samples)
    if isinstance(samples, bool) or not isinstance(samples, int):
        raise SchemaError("samples", f"expected an integer, got {samples!r}")
    if samples < 2:
        raise ValidationError("samples >= 2", f"samples must be at least 2, got {samples}")

    title = raw.get("name", name or kind)
    if not isinstance(title, str):
        raise SchemaError("name", "expected a string")
    return Scenario(title, profile, material, mass, float(tol), int(samples), dict(raw))


def load_scenario(path, default_tol=DEFAULT_TOL, default_samples=DEFAULT_SAMPLES):
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError("", f"{path} is not valid JSON: {e}") from e
        except UnicodeDecodeError as e:
            raise SchemaError("", f"{path} is not valid UTF-8: {e}") from e
    stem = path.replace("\\", "/").rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return scenario_from_dict(raw, default_tol, default_samples, name=stem)


def scenario_with(scenario, param, value):
    """Copy of ``scenario`` with one scalar replaced, re-validated."""
    allowed = sweepable(scenario.raw)
    if param not in allowed:
        raise UnknownParam(f"cannot sweep {param!r} for this scenario (sweepable: {', '.join(allowed) or 'none'})")
    raw = dict(scenario.raw)
    raw[param] = float(value)
    if param == "R":
        raw.pop("H", None)
    return scenario_from_dict(raw, scenario.tol, scenario.samples, name=scenario.name)
