import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equilibrium import (
    Method,
    _bracketed_root,
    alpha_from_h_half_sphere,
    alpha_from_h_sphere,
    closed_form_cylinder,
    cog,
    cog_derivative,
    cog_mass_form,
    cog_section,
    mass_form_functions,
    mass_form_ode_residual,
    moment_rate_residual,
    ode_residual,
    sample_curve,
    sample_mass_form_curve,
    section_ode_residual,
    solve_cone_cubic,
    solve_fixed_point,
    solve_half_sphere_quartic,
    solve_mass_form,
    solve_minimum_scan,
    solve_power_equation,
    solve_section,
    solve_special_case,
    solve_sphere_quartic,
)
from moments import CrossSectionSolid, MassSpec, MaterialSpec, surface_moments
from profiles import Cone, Cylinder, HalfSphere, Power, Sphere, Tabulated, parse_profile
from utils.errors import DomainError, NoBracket, ToleranceNotMet

PI = math.pi
SQRT2_M1 = math.sqrt(2.0) - 1.0
UNIT_CYLINDER = Cylinder(1.0, 1.0)
CYLINDER_M1 = MaterialSpec(1 / (2 * PI), 1 / PI)  # M = m = 1
CYLINDER_M3 = MaterialSpec(1 / (2 * PI), 3 / PI)  # M = 1, m = 3
SPHERE_ALPHA = 7 / 384


def bisect(f, lo, hi, iterations=200):
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (f(lo) > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# T(h)
# ---------------------------------------------------------------------------

def test_cog_sphere_endpoints():
    material = MaterialSpec(0.3, 2.0)
    assert cog(Sphere(1.0), material, 0.0) == pytest.approx(1.0)
    assert cog(Sphere(1.0), material, 2.0) == pytest.approx(1.0)


def test_cog_half_sphere_shell_only():
    assert cog(HalfSphere(1.0), MaterialSpec(1.0, 0.0), 0.0) == pytest.approx(0.5)


def test_cog_outside_domain():
    with pytest.raises(DomainError, match=r"h outside \[0,H\]"):
        cog(UNIT_CYLINDER, CYLINDER_M1, -1.0)


def test_cog_massless_shell_empty():
    assert cog(Cone(1.0, 1.0), MaterialSpec(0.0, 1.0), 0.0) == 0.0


@settings(max_examples=30, deadline=None)
@given(h=st.floats(min_value=0.0, max_value=1.0), alpha=st.floats(0.0, 5.0), beta=st.floats(0.01, 5.0))
def test_cog_maps_into_height(h, alpha, beta):
    T = cog(Cone(0.8, 1.0), MaterialSpec(alpha, beta), h)
    assert -1e-12 <= T <= 1.0 + 1e-12


def test_cog_mass_form():
    H = 1.0
    cylinder = mass_form_functions("cylinder", H)
    mass = MassSpec(1.0, 1.0, cylinder.shell_cog)
    assert cog_mass_form(mass, cylinder.fill_cog, cylinder.fill_fraction, 0.0) == pytest.approx(0.5)
    assert cog_mass_form(mass, cylinder.fill_cog, cylinder.fill_fraction, 1.0) == pytest.approx(0.5)

    cone = mass_form_functions("cone", H)
    empty = MassSpec(1.0, 0.0, cone.shell_cog)
    for h in (0.0, 0.3, 1.0):
        assert cog_mass_form(empty, cone.fill_cog, cone.fill_fraction, h) == pytest.approx(0.75)


def test_mass_forms_closed_expressions():
    M, m, H = 1.3, 0.7, 2.0
    for h in (0.0, 0.4, 1.1, 2.0):
        form = mass_form_functions("cylinder", H)
        T0 = cog_mass_form(MassSpec(M, m, form.shell_cog), form.fill_cog, form.fill_fraction, h)
        assert T0 == pytest.approx(0.5 * (M * H ** 2 + m * h ** 2) / (M * H + m * h))
        form = mass_form_functions("cone", H)
        T1 = cog_mass_form(MassSpec(M, m, form.shell_cog), form.fill_cog, form.fill_fraction, h)
        assert T1 == pytest.approx((9 * M * H ** 3 + 8 * m * h ** 3) / (12 * (M * H ** 2 + m * h ** 2)))


def test_mass_form_kinds():
    with pytest.raises(DomainError):
        mass_form_functions("sphere", 1.0)


def test_cog_derivative_sign():
    assert cog_derivative(UNIT_CYLINDER, CYLINDER_M1, 0.01) < 0.0
    assert cog_derivative(UNIT_CYLINDER, CYLINDER_M1, 0.99) > 0.0
    assert cog_derivative(UNIT_CYLINDER, CYLINDER_M1, SQRT2_M1) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(DomainError):
        cog_derivative(UNIT_CYLINDER, CYLINDER_M1, 1.0)


# ---------------------------------------------------------------------------
# Fixed point and minimum
# ---------------------------------------------------------------------------

def test_cylinder_golden_value():
    result = solve_fixed_point(UNIT_CYLINDER, CYLINDER_M1)
    assert result.h_star == pytest.approx(SQRT2_M1, abs=1e-10)
    assert result.method is Method.GENERAL_BRACKETED
    assert result.bracket == (0.0, 1.0)
    assert result.fixed_point_residual <= 1e-10
    assert closed_form_cylinder(1.0, 1.0, 1.0) == pytest.approx(SQRT2_M1, abs=1e-10)
    assert solve_minimum_scan(UNIT_CYLINDER, CYLINDER_M1, 1000) == pytest.approx(SQRT2_M1, abs=1e-6)


def test_cylinder_second_point():
    assert closed_form_cylinder(1.0, 3.0, 1.0) == pytest.approx(1 / 3, abs=1e-12)
    assert solve_fixed_point(UNIT_CYLINDER, CYLINDER_M3, tol=1e-8).h_star == pytest.approx(1 / 3, abs=1e-8)


def test_closed_form_cylinder_small_fill():
    assert closed_form_cylinder(1.0, 1e-9, 1.0) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(DomainError):
        closed_form_cylinder(1.0, 0.0, 1.0)


def test_stationary_at_fixed_point():
    result = solve_fixed_point(Sphere(1.0), MaterialSpec(SPHERE_ALPHA, 1.0))
    assert result.h_star == pytest.approx(0.5, abs=1e-10)
    assert result.T_star == pytest.approx(result.h_star, abs=1e-8)
    assert cog_derivative(Sphere(1.0), MaterialSpec(SPHERE_ALPHA, 1.0), result.h_star) == pytest.approx(0.0, abs=1e-8)


def test_massless_shell():
    for profile in (UNIT_CYLINDER, Sphere(1.0), Power(0.4, 1.0), parse_profile("1 + z^2", 1.0)):
        result = solve_fixed_point(profile, MaterialSpec(0.0, 1.0))
        assert result.h_star == 0.0
        assert result.fixed_point_residual == 0.0


def test_shell_only():
    profile = Cone(1.0, 1.0)
    S0, S1 = surface_moments(profile)
    result = solve_fixed_point(profile, MaterialSpec(1.0, 0.0))
    assert result.h_star == pytest.approx(S1 / S0, abs=1e-10)
    assert solve_minimum_scan(profile, MaterialSpec(1.0, 0.0)) == pytest.approx(S1 / S0)


@pytest.mark.parametrize("profile", [
    Cone(1.0, 1.0),
    Power(0.4, 1.0),
    Power(2.0, 1.5),
    HalfSphere(1.0),
    parse_profile("0.5 + z - 0.6*z^2", 1.2),
    Tabulated(((0, 0.8), (0.6, 1.0), (1.4, 1.0), (1.8, 0.4), (2.2, 0.3))),
], ids=lambda p: p.kind)
def test_fixed_point_is_minimum(profile):
    material = MaterialSpec(0.3, 1.0)
    h_star = solve_fixed_point(profile, material).h_star
    assert solve_minimum_scan(profile, material, 1000) == pytest.approx(h_star, abs=1e-6 * profile.height)


def test_fixed_point_function_is_increasing():
    profile, material = Sphere(1.0), MaterialSpec(SPHERE_ALPHA, 1.0)
    values = []
    for h in np.linspace(0.0, 2.0, 1000):
        T = cog(profile, material, h)
        values.append(h - T)
    # F = m0·(h - T) with m0 > 0 changes sign once
    signs = np.sign(values)
    assert np.count_nonzero(np.diff(signs)) == 1


def test_minimum_scan_grid_size():
    with pytest.raises(DomainError):
        solve_minimum_scan(UNIT_CYLINDER, CYLINDER_M1, grid_size=50)


def test_iteration_cap():
    with pytest.raises(ToleranceNotMet):
        solve_fixed_point(Sphere(1.0), MaterialSpec(SPHERE_ALPHA, 1.0), max_iter=1)


def test_no_bracket():
    with pytest.raises(NoBracket):
        _bracketed_root(lambda x: x + 1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Special cases
# ---------------------------------------------------------------------------

def test_cone_cubic_matches_bisection():
    root = solve_cone_cubic(1.0, 1.0, 1.0)
    reference = bisect(lambda h: 4 * h ** 3 + 12 * h - 9, 0.0, 1.0)
    assert root == pytest.approx(reference, abs=1e-10)
    assert root == pytest.approx(0.65586, abs=1e-5)


def test_cone_cubic_scaling_and_empty():
    assert solve_cone_cubic(1.0, 1.0, 2.0) == pytest.approx(2 * solve_cone_cubic(1.0, 1.0, 1.0), abs=1e-10)
    assert solve_cone_cubic(2.0, 0.0, 3.0) == pytest.approx(2.25)


def test_power_equation():
    material = MaterialSpec(1.0, 1.0)
    root = solve_power_equation(1.0, 1.0, material)
    assert root == pytest.approx(solve_fixed_point(Power(1.0, 1.0), material).h_star, abs=1e-8)

    S0, S1 = PI * math.sqrt(2.0), 2 * PI * math.sqrt(2.0) / 3
    reference = bisect(lambda h: S0 * h - S1 + PI * h ** 4 / 12, 0.0, 1.0)
    assert root == pytest.approx(reference, abs=1e-10)
    assert solve_power_equation(0.4, 1.0, MaterialSpec(0.0, 1.0)) == 0.0


@pytest.mark.parametrize("p", [0.4, 1.0, 2.0])
def test_power_equation_agrees_with_general_engine(p):
    material = MaterialSpec(0.5, 2.0)
    general = solve_fixed_point(Power(p, 1.0), material).h_star
    assert solve_power_equation(p, 1.0, material) == pytest.approx(general, abs=1e-8)


def test_sphere_quartic():
    assert solve_sphere_quartic(1.0, MaterialSpec(SPHERE_ALPHA, 1.0)) == pytest.approx(0.5, abs=1e-10)
    assert solve_sphere_quartic(1.0, MaterialSpec(0.0, 1.0)) == 0.0
    alpha = alpha_from_h_sphere(1.0, 2.0, 1.0)
    assert solve_sphere_quartic(2.0, MaterialSpec(alpha, 1.0)) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        solve_sphere_quartic(1.0, MaterialSpec(1.0, 0.0))


def test_half_sphere_quartic():
    alpha = alpha_from_h_half_sphere(0.25, 1.0, 1.0)
    assert alpha == pytest.approx(0.009765625)
    assert solve_half_sphere_quartic(1.0, MaterialSpec(alpha, 1.0)) == pytest.approx(0.25, abs=1e-8)
    assert solve_half_sphere_quartic(1.0, MaterialSpec(0.0, 1.0)) == 0.0
    for a in (1e-3, 0.1, 1.0, 100.0):
        assert solve_half_sphere_quartic(1.0, MaterialSpec(a, 1.0)) < 0.5


@pytest.mark.parametrize("R", [1.0, 2.5])
def test_inversion_round_trips(R):
    for u in (0.1, 0.25, 0.9):
        alpha = alpha_from_h_sphere(u * R, R, 1.0)
        assert solve_sphere_quartic(R, MaterialSpec(alpha, 1.0)) == pytest.approx(u * R, abs=1e-8 * R)
    for u in (0.1, 0.25, 0.4):
        alpha = alpha_from_h_half_sphere(u * R, R, 1.0)
        assert solve_half_sphere_quartic(R, MaterialSpec(alpha, 1.0)) == pytest.approx(u * R, abs=1e-8 * R)


def test_alpha_from_h_sphere():
    assert alpha_from_h_sphere(0.0, 1.0, 1.0) == 0.0
    assert alpha_from_h_sphere(0.5, 1.0, 1.0) == pytest.approx(7 / 384)
    assert alpha_from_h_sphere(0.99, 1.0, 1.0) > 1.0
    with pytest.raises(DomainError):
        alpha_from_h_sphere(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        alpha_from_h_half_sphere(0.5, 1.0, 1.0)


def test_alpha_from_h_sphere_is_increasing_and_convex():
    hs = np.linspace(0.0, 0.95, 200)
    alphas = np.array([alpha_from_h_sphere(h, 1.0, 1.0) for h in hs])
    assert np.all(np.diff(alphas) > 0.0)
    assert np.all(np.diff(alphas, 2) >= 0.0)
    half = np.array([alpha_from_h_half_sphere(h, 1.0, 1.0) for h in np.linspace(0.0, 0.49, 200)])
    assert np.all(half >= 0.0)
    assert np.all(np.diff(half) > 0.0)


@pytest.mark.parametrize("profile,method", [
    (Cylinder(1.0, 1.0), Method.CYLINDER_CLOSED_FORM),
    (Power(2.0, 1.0), Method.POWER_EQUATION),
    (Sphere(1.0), Method.SPHERE_QUARTIC),
    (HalfSphere(1.0), Method.HALF_SPHERE_QUARTIC),
])
def test_special_cases_agree_with_general_engine(profile, method):
    material = MaterialSpec(0.2, 1.5)
    special = solve_special_case(profile, material)
    assert special.method is method
    general = solve_fixed_point(profile, material)
    assert special.h_star == pytest.approx(general.h_star, abs=1e-8 * profile.height)


def test_no_special_case():
    assert solve_special_case(Cone(1.0, 1.0), MaterialSpec(1.0, 1.0)) is None
    assert solve_special_case(Sphere(1.0), MaterialSpec(1.0, 0.0)) is None


# ---------------------------------------------------------------------------
# Mass forms
# ---------------------------------------------------------------------------

def test_solve_mass_form():
    cylinder = solve_mass_form("cylinder", MassSpec(1.0, 1.0, 0.5), 1.0)
    assert cylinder.h_star == pytest.approx(SQRT2_M1, abs=1e-12)
    assert cylinder.method is Method.CYLINDER_CLOSED_FORM

    cone = solve_mass_form("cone", MassSpec(1.0, 1.0, 0.75), 1.0)
    assert cone.method is Method.CONE_CUBIC
    assert cone.h_star == pytest.approx(solve_cone_cubic(1.0, 1.0, 1.0), abs=1e-12)
    assert solve_minimum_scan(Cone(1.0, 1.0), MassSpec(1.0, 1.0, 0.75)) == pytest.approx(cone.h_star, abs=1e-6)


def test_mass_form_with_custom_shell_centroid():
    result = solve_mass_form("cylinder", MassSpec(1.0, 1.0, 0.3), 1.0)
    assert result.method is Method.GENERAL_BRACKETED
    assert result.T_star == pytest.approx(result.h_star, abs=1e-10)


@pytest.mark.parametrize("s", [2.0, 10.0])
def test_mass_form_scale_covariance(s):
    for kind, shell in (("cylinder", 0.5), ("cone", 0.75)):
        base = solve_mass_form(kind, MassSpec(1.0, 2.0, shell), 1.0).h_star
        scaled = solve_mass_form(kind, MassSpec(1.0, 2.0, shell * s), s).h_star
        assert scaled == pytest.approx(s * base, rel=1e-10)


def test_mass_form_ode():
    for kind, shell in (("cylinder", 0.5), ("cone", 0.75)):
        for h in (0.1, 0.5, 0.9):
            assert abs(mass_form_ode_residual(kind, MassSpec(1.0, 2.0, shell), 1.0, h)) < 1e-7


def test_mass_form_curve():
    curve = sample_mass_form_curve("cylinder", MassSpec(1.0, 1.0, 0.5), 1.0, 3)
    T = curve.column("T")
    assert T[0] == pytest.approx(0.5)
    assert T[2] == pytest.approx(0.5)
    assert T[1] < 0.5


# ---------------------------------------------------------------------------
# Differential identities
# ---------------------------------------------------------------------------

def test_ode_residual_examples():
    assert abs(ode_residual(UNIT_CYLINDER, CYLINDER_M1, 0.3)) <= 1e-8
    assert abs(ode_residual(Sphere(1.0), MaterialSpec(SPHERE_ALPHA, 1.0), 1.0)) <= 1e-8
    square = parse_profile("z^2", 1.0)
    material = MaterialSpec(1.0, 1.0)
    slope = cog_derivative(square, material, 0.7)
    assert abs(ode_residual(square, material, 0.7, fd_step=1e-5)) <= 1e-8 * (1 + abs(slope)) * 100


@settings(max_examples=50, deadline=None)
@given(h=st.floats(min_value=0.01, max_value=0.99))
def test_ode_residual_random_levels(h):
    profile = parse_profile("0.3 + z - 0.4*z^2", 1.0)
    material = MaterialSpec(0.25, 1.7)
    slope = cog_derivative(profile, material, h)
    assert abs(ode_residual(profile, material, h)) <= 1e-8 * (1 + abs(slope))


def test_ode_residual_domain():
    with pytest.raises(DomainError):
        ode_residual(UNIT_CYLINDER, CYLINDER_M1, 0.0)


def test_moment_rate_residual():
    assert abs(moment_rate_residual(UNIT_CYLINDER, CYLINDER_M1, 0.5, 1e-4)) <= 1e-6
    sphere_material = MaterialSpec(SPHERE_ALPHA, 1.0)
    assert abs(moment_rate_residual(Sphere(1.0), sphere_material, 1.0, 1e-4)) <= 1e-6
    with pytest.raises(DomainError):
        moment_rate_residual(UNIT_CYLINDER, CYLINDER_M1, 0.5, 0.6)


def test_moment_rate_second_order():
    cone, material = Cone(1.0, 1.0), MaterialSpec(1.0, 1.0)
    coarse = moment_rate_residual(cone, material, 0.5, 1e-3)
    fine = moment_rate_residual(cone, material, 0.5, 5e-4)
    assert coarse / fine == pytest.approx(4.0, rel=1e-3)
    steps = np.array([1e-3, 5e-4, 2.5e-4])
    residuals = [abs(moment_rate_residual(Sphere(1.0), MaterialSpec(0.1, 1.0), 0.7, s)) for s in steps]
    order = np.polyfit(np.log(steps), np.log(residuals), 1)[0]
    assert order == pytest.approx(2.0, abs=0.2)


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------

def test_sample_curve_cylinder():
    curve = sample_curve(UNIT_CYLINDER, CYLINDER_M1, 3)
    T = curve.column("T")
    assert T[0] == pytest.approx(0.5)
    assert T[2] == pytest.approx(0.5)
    assert T[1] < 0.5
    assert curve.column("h") == [0.0, 0.5, 1.0]


def test_sample_curve_endpoints_only():
    curve = sample_curve(Sphere(1.0), MaterialSpec(SPHERE_ALPHA, 1.0), 2)
    assert len(curve.samples) == 2
    assert curve.column("T") == pytest.approx([1.0, 1.0])


def test_sample_curve_flags_undefined_slope():
    curve = sample_curve(Cone(1.0, 1.0), MaterialSpec(0.0, 1.0), 5)
    first = curve.samples[0]
    assert first.T == 0.0
    assert first.T_prime is None
    assert all(s.T_prime is not None for s in curve.samples[1:])


def test_sample_curve_is_increasing_in_h():
    curve = sample_curve(Power(0.4, 2.0), MaterialSpec(0.5, 1.0), 201)
    hs = curve.column("h")
    assert hs[0] == 0.0 and hs[-1] == 2.0
    assert np.all(np.diff(hs) > 0.0)
    assert all(0.0 <= T <= 2.0 for T in curve.column("T"))


# ---------------------------------------------------------------------------
# Cross-section engine
# ---------------------------------------------------------------------------

def test_section_engine_matches_profile_engine():
    profile = Sphere(1.0)
    material = MaterialSpec(SPHERE_ALPHA, 1.0)
    solid = CrossSectionSolid.from_profile(profile)
    assert cog_section(solid, material, 0.8) == pytest.approx(cog(profile, material, 0.8), rel=1e-10)
    assert solve_section(solid, material).h_star == pytest.approx(0.5, abs=1e-9)


def test_section_engine_square_prism():
    # square prism, side 1, height 1; same as a cylinder up to the shell/fill ratio
    solid = CrossSectionSolid(height=1.0, area=lambda z: 1.0, S0=4.0, S1=2.0)
    material = MaterialSpec(0.25, 1.0)  # M = m = 1
    assert solve_section(solid, material).h_star == pytest.approx(SQRT2_M1, abs=1e-9)
    assert abs(section_ode_residual(solid, material, 0.3)) < 1e-7
