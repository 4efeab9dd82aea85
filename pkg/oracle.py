"""Brute-force slicing of the solid, independent of the quadrature engine.

The shell is cut into conical frustum bands through the chord between
consecutive profile samples and the fill into thin disks sampled at the slice
midpoint. Nothing here uses g' or the closed forms.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from profiles import Profile
from utils.errors import DomainError

__all__ = ["Discretization", "ConvergenceReport", "discretize", "oracle_surface_moments", "oracle_cog",
           "oracle_convergence", "ORACLE_LADDER", "MIN_SLICES"]

MIN_SLICES = 10
ORACLE_LADDER = (1000, 10000, 100000)


@dataclass(frozen=True)
class Discretization:
    n_slices: int
    height: float
    edges: np.ndarray  # z_i = i·H/n, i = 0..n
    z_mid: np.ndarray
    band_area: np.ndarray
    disk_volume: np.ndarray

    @property
    def step(self):
        return self.height / self.n_slices


def _check_slices(n):
    if int(n) != n or n < MIN_SLICES:
        raise DomainError(f"number of slices must be an integer >= {MIN_SLICES}, got {n}")
    return int(n)


@lru_cache(maxsize=16)
def discretize(profile, n):
    n = _check_slices(n)
    H = profile.height
    edges = np.arange(n + 1) * (H / n)
    edges[-1] = H
    g = profile.g_values(edges)
    dz = np.diff(edges)
    band_area = math.pi * (g[:-1] + g[1:]) * np.hypot(dz, np.diff(g))
    z_mid = 0.5 * (edges[:-1] + edges[1:])
    disk_volume = math.pi * profile.g_values(z_mid) ** 2 * dz
    return Discretization(n, H, edges, z_mid, band_area, disk_volume)


def oracle_surface_moments(profile, n):
    """Frustum band sums (S0, S1), each band placed at its slice midpoint."""
    d = discretize(profile, n)
    return float(np.sum(d.band_area)), float(np.sum(d.band_area * d.z_mid))


def oracle_cog(profile, material, h, n):
    """Discrete T(h); the top filled slice is clipped at exactly h."""
    d = discretize(profile, n)
    h = profile.check_level(h, "h")
    a, b = material.alpha, material.beta

    full = int(np.searchsorted(d.edges, h, side="right")) - 1
    full = min(full, d.n_slices)
    fill0 = float(np.sum(d.disk_volume[:full]))
    fill1 = float(np.sum(d.disk_volume[:full] * d.z_mid[:full]))
    lo = float(d.edges[full])
    if h > lo:
        mid = 0.5 * (lo + h)
        vol = math.pi * float(profile.g_values(np.array([mid]))[0]) ** 2 * (h - lo)
        fill0 += vol
        fill1 += vol * mid

    S0, S1 = oracle_surface_moments(profile, n)
    m0 = a * S0 + b * fill0
    m1 = a * S1 + b * fill1
    return m1 / m0 if m0 > 0.0 else 0.0


@dataclass(frozen=True)
class ConvergenceReport:
    ladder: tuple
    values: tuple
    errors: tuple
    order: float
    reference: float

    @property
    def converged(self):
        return all(b <= a for a, b in zip(self.errors, self.errors[1:]))


def oracle_convergence(profile, material, h, reference,
                       ladder=ORACLE_LADDER, floor=None):
    """Errors of ``oracle_cog`` along ``ladder`` against ``reference`` and the fitted order.

    The order is the negative log-log slope of error versus n. When the finest
    error is at or below ``floor`` the discretization is exact for this
    profile and the order is reported as infinite.
    """
    ladder = tuple(_check_slices(n) for n in ladder)
    if len(ladder) < 2:
        raise DomainError("the convergence ladder needs at least two slice counts")
    floor = 1e-12 * profile.height if floor is None else floor
    values = tuple(oracle_cog(profile, material, h, n) for n in ladder)
    errors = tuple(abs(v - reference) for v in values)
    if errors[-1] <= floor:
        order = math.inf
    else:
        clipped = np.maximum(np.array(errors), floor)
        slope = np.polyfit(np.log(ladder), np.log(clipped), 1)[0]
        order = float(-slope)
    return ConvergenceReport(ladder, values, errors, order, float(reference))
