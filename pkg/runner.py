import csv
import math
import os
import sys
from collections import OrderedDict

import numpy as np
from tqdm import tqdm

from equilibrium import (
    POLY_TOL,
    cog,
    cog_derivative,
    mass_form_cog,
    mass_form_functions,
    mass_form_ode_residual,
    mass_form_slope,
    ode_residual,
    moment_rate_residual,
    sample_curve,
    sample_mass_form_curve,
    solve_fixed_point,
    solve_mass_form,
    solve_minimum_scan,
    solve_special_case,
)
from moments import mass_moments, surface_moments
from oracle import oracle_cog, oracle_convergence
from utils.errors import CogError, DomainError, UnknownParam
from utils.evaluator import Evaluator
from utils.meter import ResidualMeter
from utils.registry import seed_hash, sweepable
from utils.scenario import scenario_with

CURVE_HEADER = ("h", "T", "dT", "m0", "m1")


def fmt(value):
    """17 significant digits; None is an empty CSV field."""
    if value is None:
        return ""
    return f"{value:.17g}"


def write_csv(path, header, rows):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


class Runner:
    """Evaluate, solve, sample, sweep and verify one scenario."""

    def __init__(self, cfg, scenario, quiet=False):
        self.cfg = cfg
        self.scenario = scenario
        self.profile = scenario.profile
        self.quiet = quiet or not cfg.verbose
        self.quad_tol = cfg.quad_tol
        self.material = scenario.engine_material(self.quad_tol)

    def log(self, msg=""):
        if not self.quiet:
            print(msg)

    def progress(self, iterable, desc, total=None):
        return tqdm(iterable, desc=desc, total=total, file=sys.stderr, disable=self.quiet, leave=False)

    # ------------------------------------------------------------------
    # eval
    # ------------------------------------------------------------------

    def evaluate(self, h):
        s = self.scenario
        H = self.profile.height
        if s.mass_form:
            T = mass_form_cog(s.kind, s.mass, H, h)
            form = mass_form_functions(s.kind, H)
            m0 = s.mass.M + s.mass.m * form.fill_fraction(h)
            m1 = T * m0
            dT = mass_form_slope(s.kind, s.mass, H, h) if 0.0 < h < H else None
        else:
            ms = mass_moments(self.profile, self.material, h, self.quad_tol)
            T, m0, m1 = ms.cog, ms.m0, ms.m1
            dT = cog_derivative(self.profile, self.material, h, self.quad_tol) if 0.0 < h < H and m0 > 0.0 else None

        report = OrderedDict(scenario=s.name, h=float(h), T=T, dT=dT, m0=m0, m1=m1)
        self.log(f"=> T({h:g})")
        for key in ("T", "dT", "m0", "m1"):
            value = report[key]
            self.log(f"* {key}: {'undefined' if value is None else format(value, '.12g')}")
        return report

    # ------------------------------------------------------------------
    # solve
    # ------------------------------------------------------------------

    def solve_general(self):
        return solve_fixed_point(self.profile, self.material, tol=self.scenario.tol,
                                 quad_tol=self.quad_tol, max_iter=self.cfg.max_iter)

    def solve_primary(self):
        """The root reported by `solve` and `sweep`: the mass form for mass scenarios, else the general engine."""
        s = self.scenario
        if s.mass_form:
            return solve_mass_form(s.kind, s.mass, self.profile.height, tol=min(s.tol, POLY_TOL))
        return self.solve_general()

    def solve(self):
        s = self.scenario
        H = self.profile.height
        primary = self.solve_primary()
        alternatives, notes = [], []

        if s.mass_form:
            general = self.solve_general()
            alternatives.append(general)
            if s.kind == "cone":
                notes.append(
                    "the cone mass form puts the shell centroid at 3H/4 and weights the fill by (h/H)^2; "
                    "the surface-of-revolution engine (shell centroid 2H/3, fill weight (h/H)^3) gives a different root"
                )
        else:
            special = solve_special_case(self.profile, self.material, quad_tol=self.quad_tol)
            if special is not None:
                alternatives.append(special)
            if self.material.alpha == 0.0:
                notes.append("the shell is massless (alpha = 0): the center of gravity is lowest with the solid empty")
            if self.material.beta == 0.0:
                notes.append("no fill mass (beta = 0): T is constant and every level is a minimum; h* = S1/S0")

        report = OrderedDict(scenario=s.name, **primary.to_dict())
        report["alternatives"] = [
            OrderedDict(method=r.method.value, h_star=r.h_star, difference=r.h_star - primary.h_star)
            for r in alternatives
        ]
        report["notes"] = notes

        self.log("=> equilibrium")
        self.log(f"* h_star: {primary.h_star:.12g}")
        self.log(f"* T(h_star): {primary.T_star:.12g}")
        self.log(f"* residual: {primary.fixed_point_residual:.3g}")
        self.log(f"* method: {primary.method.value} ({primary.iterations} iterations)")
        for r in alternatives:
            self.log(f"* {r.method.value}: {r.h_star:.12g} (difference {r.h_star - primary.h_star:.3g}, H={H:g})")
        for note in notes:
            self.log(f"NOTE: {note}")
        return report

    # ------------------------------------------------------------------
    # curve / sweep
    # ------------------------------------------------------------------

    def curve(self, out, samples=None):
        s = self.scenario
        n = s.samples if samples is None else samples
        if s.mass_form:
            curve = sample_mass_form_curve(s.kind, s.mass, self.profile.height, n)
        else:
            curve = sample_curve(self.profile, self.material, n, self.quad_tol)
        failed = [smp for smp in curve.samples if smp.error]
        for smp in failed:
            print(f"row h={smp.h:.17g} failed: {smp.error}", file=sys.stderr)
        write_csv(out, CURVE_HEADER, curve.rows())
        self.log(f"Curve with {len(curve.samples)} rows is saved to {out}")
        return curve

    def sweep(self, param, start, stop, steps, out):
        s = self.scenario
        if param not in sweepable(s.raw):
            raise UnknownParam(f"cannot sweep {param!r} for a {s.kind} scenario "
                               f"(sweepable: {', '.join(sweepable(s.raw))})")
        if int(steps) != steps or steps < 1:
            raise DomainError(f"steps must be a positive integer, got {steps}")
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise DomainError(f"sweep range must be finite, got [{start}, {stop}]")
        values = [float(start)] if steps == 1 else [float(v) for v in np.linspace(start, stop, int(steps))]

        rows = []
        for value in self.progress(values, desc=f"Sweeping {param}"):
            runner = Runner(self.cfg, scenario_with(s, param, value), quiet=True)
            result = runner.solve_primary()
            rows.append((value, result.h_star, result.T_star))
        write_csv(out, (param, "h_star", "T_star"), rows)
        self.log(f"Sweep of {param} with {len(rows)} rows is saved to {out}")
        return rows

    # ------------------------------------------------------------------
    # verify
    # ------------------------------------------------------------------

    def verify(self):
        """Run the invariant suite; returns the Evaluator holding every check."""
        cfg, vcfg = self.cfg, self.cfg.verify
        s = self.scenario
        profile, material = self.profile, self.material
        H = profile.height
        evaluator = Evaluator(cfg)
        rng = np.random.default_rng(seed_hash(cfg.seed, s.name))

        if s.mass_form:
            self._verify_mass_form(evaluator, rng)

        try:
            result = self.solve_general()
        except CogError as e:
            evaluator.process("fixed point", False, detail=str(e))
            evaluator.evaluate()
            return evaluator
        h_star = result.h_star
        self.log(f"h_star = {h_star:.12g} ({result.method.value}, {result.iterations} iterations)")
        evaluator.process("fixed point residual", result.fixed_point_residual <= vcfg.fixed_point_tol,
                          result.fixed_point_residual, vcfg.fixed_point_tol)

        h_scan = solve_minimum_scan(profile, material, cfg.scan_grid, self.quad_tol)
        gap = abs(h_scan - h_star) / H
        evaluator.process("fixed point = minimum", gap <= vcfg.minimum_tol, gap, vcfg.minimum_tol,
                          f"argmin at {h_scan:.10g}")

        if 0.0 < h_star < H and material.beta > 0.0:
            slope = cog_derivative(profile, material, h_star, self.quad_tol)
            slope_tol = vcfg.fixed_point_tol * H
            evaluator.process("stationary at h_star", abs(slope) <= slope_tol, abs(slope), slope_tol)

        self._verify_monotone(evaluator)
        self._verify_ode(evaluator, rng)
        self._verify_moment_rate(evaluator)
        self._verify_oracle(evaluator, h_star)

        special = None
        if not s.mass_form:
            special = solve_special_case(profile, material, quad_tol=self.quad_tol)
        if special is not None:
            gap = abs(special.h_star - h_star) / H
            evaluator.process(f"{special.method.value} agreement", gap <= vcfg.agreement_tol, gap, vcfg.agreement_tol)

        evaluator.evaluate()
        return evaluator

    def _verify_monotone(self, evaluator):
        profile, material = self.profile, self.material
        H = profile.height
        hs = np.linspace(0.0, H, self.cfg.monotone_grid + 1)
        F, T = [], []
        for h in self.progress(hs, desc="Scanning F"):
            ms = mass_moments(profile, material, h, self.quad_tol)
            F.append(ms.m0 * h - ms.m1)
            T.append(ms.cog)
        F, T = np.array(F), np.array(T)
        evaluator.process("F strictly increasing", bool(np.all(np.diff(F) > 0.0)), float(np.min(np.diff(F))), 0.0)
        slack = 1e-12 * H
        inside = bool(np.all(T >= -slack) and np.all(T <= H + slack))
        evaluator.process("T within [0,H]", inside, f"[{T.min():.6g}, {T.max():.6g}]")

    def _verify_ode(self, evaluator, rng):
        cfg, vcfg = self.cfg, self.cfg.verify
        profile, material = self.profile, self.material
        H = profile.height
        levels = np.sort(rng.uniform(0.0, H, cfg.ode_points))
        levels = levels[(levels > 0.0) & (levels < H)]
        analytic, finite = ResidualMeter(), ResidualMeter()
        for h in self.progress(levels, desc="ODE residual"):
            h = float(h)
            slope = cog_derivative(profile, material, h, self.quad_tol)
            analytic.update(ode_residual(profile, material, h, self.quad_tol), scale=1.0 + abs(slope), at=h)
            if 0.05 * H <= h <= 0.95 * H:
                r = ode_residual(profile, material, h, self.quad_tol, fd_step=cfg.fd_step)
                finite.update(r, scale=1.0 + abs(slope), at=h)
        evaluator.process("ODE residual", analytic.max <= vcfg.ode_tol, analytic.max, vcfg.ode_tol,
                          f"{analytic.count} levels")
        if finite.count:
            evaluator.process("ODE residual (finite difference)", finite.max <= vcfg.ode_fd_tol, finite.max,
                              vcfg.ode_fd_tol, f"{finite.count} levels")

    def _rate_level(self):
        H = self.profile.height
        edges = [0.0, *self.profile.breakpoints(), H]
        for lo, hi in zip(edges, edges[1:]):
            if lo <= H / 2.0 <= hi:
                return 0.5 * (lo + hi), hi - lo
        return H / 2.0, H

    def _verify_moment_rate(self, evaluator):
        cfg, vcfg = self.cfg, self.cfg.verify
        profile, material = self.profile, self.material
        H = profile.height
        h, width = self._rate_level()
        steps = [s * H for s in cfg.rate_steps]
        if 2.0 * max(steps) >= width:
            evaluator.note("moment-rate order", f"skipped: the smooth piece around H/2 is narrower than {2 * max(steps):g}")
            return
        residuals = [abs(moment_rate_residual(profile, material, h, step, self.quad_tol)) for step in steps]
        ms = mass_moments(profile, material, h, self.quad_tol)
        floor = 1e-9 * (abs(ms.m1) + 1.0)
        kept = [(st, r) for st, r in zip(steps, residuals) if r > floor]
        if len(kept) < 2:
            evaluator.process("moment-rate order", True, "exact", None,
                              f"residuals {max(residuals):.3g} below rounding floor {floor:.3g}")
            return
        order = float(np.polyfit(np.log([k[0] for k in kept]), np.log([k[1] for k in kept]), 1)[0])
        target, slack = vcfg.rate_order, vcfg.rate_order_slack
        evaluator.process("moment-rate order", abs(order - target) <= slack, order, f"{target}±{slack}",
                          f"at h={h:.6g}")

    def _verify_oracle(self, evaluator, h_star):
        cfg, vcfg = self.cfg, self.cfg.verify
        profile, material = self.profile, self.material
        H = profile.height

        reference = cog(profile, material, h_star, self.quad_tol)
        report = oracle_convergence(profile, material, h_star, reference, tuple(cfg.oracle_ladder))
        errors = ", ".join(f"{e:.2e}" for e in report.errors)
        evaluator.process("oracle convergence order", report.order >= vcfg.oracle_min_order, report.order,
                          vcfg.oracle_min_order, f"errors {errors}")

        worst = 0.0
        for h in (h_star, H / 2.0):
            gap = abs(oracle_cog(profile, material, h, cfg.oracle_n) - cog(profile, material, h, self.quad_tol))
            worst = max(worst, gap / H)
        evaluator.process(f"oracle agreement (n={cfg.oracle_n})", worst <= vcfg.oracle_tol, worst, vcfg.oracle_tol)

    def _verify_mass_form(self, evaluator, rng):
        cfg, vcfg = self.cfg, self.cfg.verify
        s = self.scenario
        H = self.profile.height
        result = solve_mass_form(s.kind, s.mass, H, tol=min(s.tol, POLY_TOL))
        self.log(f"mass form h_star = {result.h_star:.12g} ({result.method.value})")
        evaluator.process("mass form fixed point residual", result.fixed_point_residual <= vcfg.fixed_point_tol,
                          result.fixed_point_residual, vcfg.fixed_point_tol)

        h_scan = solve_minimum_scan(self.profile, s.mass, cfg.scan_grid)
        gap = abs(h_scan - result.h_star) / H
        evaluator.process("mass form fixed point = minimum", gap <= vcfg.minimum_tol, gap, vcfg.minimum_tol)

        meter = ResidualMeter()
        for h in rng.uniform(0.05 * H, 0.95 * H, cfg.ode_points):
            slope = mass_form_slope(s.kind, s.mass, H, h)
            meter.update(mass_form_ode_residual(s.kind, s.mass, H, h, cfg.fd_step), scale=1.0 + abs(slope), at=h)
        evaluator.process("mass form ODE residual", meter.max <= vcfg.ode_fd_tol, meter.max, vcfg.ode_fd_tol)

        general = self.solve_general()
        S0, S1 = surface_moments(self.profile, self.quad_tol)
        if s.kind == "cylinder" and abs(s.mass.shell_cog - S1 / S0) <= 1e-12 * H:
            gap = abs(general.h_star - result.h_star) / H
            evaluator.process("mass form = general engine", gap <= vcfg.agreement_tol, gap, vcfg.agreement_tol)
        else:
            evaluator.note(
                "mass form vs general engine",
                f"mass form h*={result.h_star:.10g}, surface-of-revolution engine h*={general.h_star:.10g} "
                f"(shell centroid {s.mass.shell_cog:.6g} vs S1/S0={S1 / S0:.6g}); the two models differ by construction",
            )
