"""Command-line driver: experiment configs in, verification reports out.

Four subcommands cover the library surface: `identities` runs the
special-function identity matrix, `solve` the Bethe-equation solver with
normal-form output, `fiber` the Wronski-fiber enumeration and threshold
scan, and `eigen` the KZB / S2 / B2 / involution verification suite at
sampled lambda.  Reports are deterministic for a fixed (config, seed):
complex numbers appear as [re, im] pairs, keys are sorted, and timings
are excluded unless explicitly requested, so identical runs produce
identical bytes.  Exit codes: 0 = ran, 1 = a check failed, 2 = config
error; warnings leave the exit code at 0 unless --strict.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from .bethe import (
    BetheProblem,
    CoalescedRootsError,
    InvolutionMismatchError,
    SeedTooCoarseError,
    analytic_involution,
    normalize_solution,
    seed_asymptotic,
    solve_bae,
)
from .elliptic import (
    Torus,
    eta,
    lattice_distance,
    phi,
    rho,
    rho_prime,
    sigma,
    theta,
    theta1_derivs,
    theta1_dtau,
    theta_derivs,
)
from .repspace import (
    apply_kzb,
    apply_rst_n2,
    fundamental_b2,
    kzb_eigenvalues,
    psi_triple,
    s2_via_kzb,
    weyl_on_function,
    zero_weight_space,
)
from .thetapoly import FundamentalParallelogram, SolveError, wronskian
from .wronski import IncompleteFiberError, enumerate_fiber

SCHEMA = "elliptic-bethe/1"
LATTICE_MARGIN = 0.05
GOLDEN1 = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN2 = math.sqrt(2.0) - 1.0
SHIFTS = ((1, 0), (0, 1), (-1, 1), (2, -1))

DEFAULT_TOLERANCES = {
    "theta_prime_origin": 1e-12,
    "heat_equation": 1e-7,
    "theta_quasi_periodicity": 1e-10,
    "kernel_quasi_periodicity": 1e-10,
    "sigma_cross_identity": 1e-10,
    "sigma_product_identity": 1e-10,
    "bae_residual": 1e-10,
    "fiber_count": 0.0,
    "wr_certificate": 1e-9,
    "mu_min_found": 0.0,
    "eigen_relation": 1e-8,
    "eigen_sum_rule": 1e-9,
    "eigenvalue_sum": 1e-8,
    "s2_routes": 1e-8,
    "s2_eigen_b2": 1e-8,
    "b2_periodicity": 1e-9,
    "kernel_membership": 1e-8,
    "weyl_ratio": 1e-8,
}

DEFAULT_CONFIG = {
    "tau": [0.0, 1.0],
    "parallelogram_base": [0.0, 0.0],
    "m": 2,
    "z": [[0.13, 0.0], [0.41, 0.12], [0.55, 0.31], [0.77, 0.05]],
    "mu": [0.0, 6.0],
    "mu_grid": None,
    "subsets": "all",
    "tolerances": {},
    "seed": 0,
}


class ConfigError(ValueError):
    """Invalid experiment configuration; maps to exit code 2."""


def _as_complex(value, field):
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError("field %r must be a number or [re, im] pair, got %r"
                      % (field, value))


def _parse_mu_token(token):
    """Accept '6i', '-4+2i', plain Python complex syntax, or a float."""
    text = token.strip().replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise ConfigError("cannot parse %r as a complex number" % token) from None


@dataclass(frozen=True)
class ExperimentConfig:
    tau: complex
    parallelogram_base: complex
    m: int
    z: tuple
    mu: complex
    mu_grid: tuple
    subsets: object  # "all" or tuple of index tuples
    tolerances: dict
    seed: int

    @classmethod
    def from_dict(cls, raw) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        merged = dict(DEFAULT_CONFIG)
        unknown = sorted(set(raw) - set(merged))
        if unknown:
            raise ConfigError("unknown config fields: %s (known: %s)"
                              % (", ".join(unknown), ", ".join(sorted(merged))))
        merged.update(raw)

        m = merged["m"]
        if not isinstance(m, int) or m < 1:
            raise ConfigError("m must be a positive integer, got %r" % (m,))
        z = merged["z"]
        if not isinstance(z, (list, tuple)) or len(z) != 2 * m:
            raise ConfigError("z must list exactly 2m = %d sites" % (2 * m))
        z = tuple(_as_complex(v, "z[%d]" % i) for i, v in enumerate(z))

        mu = merged["mu"]
        mu = None if mu is None else _as_complex(mu, "mu")
        grid = merged["mu_grid"]
        if grid is not None:
            if not isinstance(grid, (list, tuple)) or not grid:
                raise ConfigError("mu_grid must be a non-empty list")
            grid = tuple(_as_complex(v, "mu_grid") for v in grid)
        if mu is None and grid is None:
            raise ConfigError("one of mu or mu_grid is required")

        subsets = merged["subsets"]
        if subsets != "all":
            if not isinstance(subsets, (list, tuple)) or not subsets:
                raise ConfigError('subsets must be "all" or a non-empty list')
            cleaned = []
            for entry in subsets:
                entry = tuple(entry)
                if (len(entry) != m or len(set(entry)) != m
                        or not all(isinstance(i, int) and 0 <= i < 2 * m
                                   for i in entry)):
                    raise ConfigError(
                        "subset %r must hold %d distinct site indices in [0, %d)"
                        % (entry, m, 2 * m))
                cleaned.append(tuple(sorted(entry)))
            subsets = tuple(cleaned)

        tolerances = merged["tolerances"] or {}
        unknown = sorted(set(tolerances) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise ConfigError("unknown tolerance names: %s (known: %s)"
                              % (", ".join(unknown),
                                 ", ".join(sorted(DEFAULT_TOLERANCES))))
        tolerances = {k: float(v) for k, v in tolerances.items()}

        seed = merged["seed"]
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer, got %r" % (seed,))

        return cls(
            tau=_as_complex(merged["tau"], "tau"),
            parallelogram_base=_as_complex(merged["parallelogram_base"],
                                           "parallelogram_base"),
            m=m, z=z, mu=mu, mu_grid=grid, subsets=subsets,
            tolerances=tolerances, seed=seed,
        )

    def torus(self) -> Torus:
        try:
            return Torus(self.tau)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def problem(self, mu=None) -> BetheProblem:
        ctx = self.torus()
        cell = FundamentalParallelogram(self.parallelogram_base, ctx)
        mu = self.mu if mu is None else mu
        if mu is None:
            raise ConfigError("this command requires a single mu "
                              "(mu_grid alone is not enough)")
        try:
            return BetheProblem(self.m, self.z, mu, ctx, cell)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def tolerance(self, name) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def subset_list(self) -> list:
        if self.subsets == "all":
            return list(itertools.combinations(range(2 * self.m), self.m))
        return list(self.subsets)

    def echo(self) -> dict:
        raw = dataclasses.asdict(self)
        raw["subsets"] = ("all" if self.subsets == "all"
                          else [list(s) for s in self.subsets])
        return raw


# ---------------------------------------------------------------------------
# sampling and report plumbing
# ---------------------------------------------------------------------------


def sample_cell_points(ctx, base, count, seed, margin=LATTICE_MARGIN, avoid=()):
    """Seeded low-discrepancy points in the cell, a lattice-margin away from
    the lattice and from every point in `avoid` (mod the lattice)."""
    rng = np.random.default_rng(seed)
    off = rng.random(2)
    out = []
    k = 0
    while len(out) < count and k < 500 * count:
        k += 1
        a = (off[0] + k * GOLDEN1) % 1.0
        b = (off[1] + k * GOLDEN2) % 1.0
        x = complex(base) + a + b * ctx.tau
        if lattice_distance(x, ctx) <= margin:
            continue
        if any(lattice_distance(x - p, ctx) <= margin for p in avoid):
            continue
        out.append(x)
    if len(out) < count:
        raise ArithmeticError("could not sample %d admissible points" % count)
    return out


def _relerr(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _check(name, measured, tolerance):
    return {
        "name": name,
        "status": "pass" if measured <= tolerance else "fail",
        "measured": float(measured),
        "tolerance": float(tolerance),
    }


def _encode(value):
    """JSON-ready form: complex as [re, im], numpy scalars as floats."""
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.complexfloating,)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _render(report, as_json):
    if as_json:
        return json.dumps(_encode(report), sort_keys=True, indent=2) + "\n"
    lines = ["%s | command %s | seed %d"
             % (report["schema"], report["command"], report["seed"])]
    for check in report["checks"]:
        lines.append("check %-26s %s  (measured %.3e, tolerance %.3e)"
                     % (check["name"] + ":", check["status"].upper(),
                        check["measured"], check["tolerance"]))
    for warning in report["warnings"]:
        lines.append("warning: %s" % warning)
    failed = [c["name"] for c in report["checks"] if c["status"] == "fail"]
    lines.append("result: %s (%d checks, %d warnings)"
                 % ("FAIL" if failed else "PASS",
                    len(report["checks"]), len(report["warnings"])))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def cmd_identities(cfg: ExperimentConfig) -> dict:
    ctx = cfg.torus()
    base = cfg.parallelogram_base
    pts = sample_cell_points(ctx, base, 100, cfg.seed)
    xs, ws = pts[:50], pts[50:]
    checks = []

    checks.append(_check("theta_prime_origin",
                         abs(theta_derivs(0.0, ctx, 1)[1] - 1.0),
                         cfg.tolerance("theta_prime_origin")))

    worst = 0.0
    for x in xs[:10]:
        lhs = 4j * math.pi * theta1_dtau(x, ctx)
        rhs = theta1_derivs(x, ctx, 2)[2]
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    checks.append(_check("heat_equation", worst, cfg.tolerance("heat_equation")))

    worst = 0.0
    for x in xs:
        val = theta(x, ctx)
        for k, l in SHIFTS:
            mult = (-1) ** (k + l) * np.exp(-1j * math.pi * l * l * ctx.tau
                                            - 2j * math.pi * l * x)
            worst = max(worst, _relerr(theta(x + k + l * ctx.tau, ctx), mult * val))
    checks.append(_check("theta_quasi_periodicity", worst,
                         cfg.tolerance("theta_quasi_periodicity")))

    worst = 0.0
    counted = 0
    for x, w in zip(xs, ws):
        if min(lattice_distance(u, ctx) for u in (x + w, x - w)) < 1e-3:
            continue
        counted += 1
        sig = sigma(x, w, ctx)
        ph = phi(x, w, ctx)
        sig_wx = sigma(w, -x, ctx)
        for k, l in SHIFTS:
            worst = max(
                worst,
                _relerr(rho(x + k + l * ctx.tau, ctx),
                        rho(x, ctx) - 2j * math.pi * l),
                _relerr(rho_prime(x + k + l * ctx.tau, ctx), rho_prime(x, ctx)),
                _relerr(eta(x + k + l * ctx.tau, ctx),
                        eta(x, ctx) - 4j * math.pi * l * rho(x, ctx)
                        + (2j * math.pi * l) ** 2),
                _relerr(sigma(x + k + l * ctx.tau, w, ctx),
                        np.exp(-2j * math.pi * l * w) * sig),
                _relerr(sigma(x, w + k + l * ctx.tau, ctx),
                        np.exp(-2j * math.pi * l * x) * sig),
                _relerr(phi(x + k + l * ctx.tau, w, ctx),
                        np.exp(2j * math.pi * l * w) * ph),
                _relerr(phi(x, w + k + l * ctx.tau, ctx),
                        np.exp(2j * math.pi * l * x)
                        * (ph + 2j * math.pi * l * sig_wx)),
            )
    warnings = []
    if counted < 30:
        warnings.append("kernel quasi-periodicity sampled only %d point pairs"
                        % counted)
    checks.append(_check("kernel_quasi_periodicity", worst,
                         cfg.tolerance("kernel_quasi_periodicity")))

    z1, z2 = complex(base) + 0.05 - 0.11j, complex(base) + 0.44 + 0.31j
    worst = 0.0
    counted = 0
    for x, w in zip(xs, ws):
        if min(lattice_distance(u, ctx) for u in
               (x - z1, x - z2, w, w - (z1 - z2), z1 - z2)) < LATTICE_MARGIN:
            continue
        counted += 1
        lhs = (sigma(x - z1, w, ctx) * sigma(x - z2, -w, ctx)
               / sigma(z1 - z2, -w, ctx) + rho(x - z2, ctx) - rho(x - z1, ctx))
        rhs = rho(w, ctx) - rho(w - (z1 - z2), ctx)
        worst = max(worst, _relerr(lhs, rhs))
    if counted < 20:
        warnings.append("cross identity sampled only %d point pairs" % counted)
    checks.append(_check("sigma_cross_identity", worst,
                         cfg.tolerance("sigma_cross_identity")))

    worst = 0.0
    for x, w in zip(xs, ws):
        if min(lattice_distance(u, ctx) for u in (x + w, x - w)) < 1e-3:
            continue
        worst = max(worst, _relerr(sigma(x, w, ctx) * sigma(x, -w, ctx),
                                   rho_prime(w, ctx) - rho_prime(x, ctx)))
    checks.append(_check("sigma_product_identity", worst,
                         cfg.tolerance("sigma_product_identity")))

    return {"checks": checks, "warnings": warnings}


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(cfg: ExperimentConfig) -> dict:
    prob = cfg.problem()
    checks, warnings, records = [], [], []
    worst = 0.0
    for subset in cfg.subset_list():
        record = {"subset": list(subset)}
        try:
            seed_roots = seed_asymptotic(prob, subset)
        except SeedTooCoarseError as exc:
            record.update(status="no_convergence", reason=str(exc))
            warnings.append("subset %s: %s" % (subset, exc))
            records.append(record)
            continue
        try:
            sol = normalize_solution(
                solve_bae(prob, seed_roots, subset_tag=subset))
        except CoalescedRootsError as exc:
            record.update(status="no_convergence", reason=str(exc))
            warnings.append("subset %s: %s" % (subset, exc))
            records.append(record)
            continue
        record.update(
            status="converged" if sol.converged else "no_convergence",
            t=list(sol.t), mu_effective=sol.mu, residual=sol.residual)
        records.append(record)
        if sol.converged:
            worst = max(worst, sol.residual)
        else:
            warnings.append("subset %s did not converge (residual %.3e)"
                            % (subset, sol.residual))
    checks.append(_check("bae_residual", worst, cfg.tolerance("bae_residual")))
    return {"checks": checks, "warnings": warnings, "solutions": records}


# ---------------------------------------------------------------------------
# fiber
# ---------------------------------------------------------------------------


def _point_record(point):
    return {
        "subset_tag": list(point.subset_tag),
        "partner_tag": list(point.partner_tag),
        "wr_residual": point.wr_residual,
        "f_label": point.f.mu,
        "f_roots": list(point.f.roots),
        "g_label": point.g.mu,
        "g_roots": list(point.g.roots),
    }


def _enumerate_outcome(prob):
    """(report, failed subsets) whether or not the fiber completed."""
    try:
        return enumerate_fiber(prob), []
    except IncompleteFiberError as exc:
        return exc.partial, list(exc.failed)


def cmd_fiber(cfg: ExperimentConfig) -> dict:
    checks, warnings = [], []
    out = {"checks": checks, "warnings": warnings}
    if cfg.mu_grid is not None:
        mags = [abs(complex(mu).imag) for mu in cfg.mu_grid]
        if mags != sorted(mags, reverse=True):
            raise ConfigError("mu_grid must be sorted by |Im mu| descending")
        rows = []
        mu_min = None
        scanning = True
        for mu in cfg.mu_grid:
            report, failed = _enumerate_outcome(cfg.problem(mu))
            complete = (not failed and not report.warnings
                        and report.count == report.expected)
            rows.append({"mu": complex(mu), "abs_mu": abs(complex(mu)),
                         "count": report.count, "expected": report.expected,
                         "complete": complete})
            for subset, why in failed:
                warnings.append("mu %s subset %s failed: %s" % (mu, subset, why))
            if scanning and complete:
                mu_min = abs(complex(mu).imag)
            elif not complete:
                scanning = False
        out["fiber"] = {"scan": rows, "mu_min_estimate": mu_min}
        checks.append(_check("mu_min_found", 0.0 if mu_min is not None else 1.0,
                             cfg.tolerance("mu_min_found")))
        return out

    report, failed = _enumerate_outcome(cfg.problem())
    for subset, why in failed:
        warnings.append("subset %s failed: %s" % (subset, why))
    warnings.extend(report.warnings)
    out["fiber"] = {
        "count": report.count,
        "expected": report.expected,
        "pairing": [[list(a), list(b)] for a, b in report.pairing],
        "points": [_point_record(p) for p in report.points],
        "mu_min_estimate": report.mu_min_estimate,
    }
    checks.append(_check("fiber_count", float(report.expected - report.count),
                         cfg.tolerance("fiber_count")))
    worst = max((p.wr_residual for p in report.points), default=0.0)
    checks.append(_check("wr_certificate", worst, cfg.tolerance("wr_certificate")))
    return out


def _fiber_csv(report_section):
    """Plot-ready (|mu|, count) table for a grid scan, or the single row."""
    lines = ["abs_mu,count"]
    if "scan" in report_section:
        for row in report_section["scan"]:
            lines.append("%.17g,%d" % (row["abs_mu"], row["count"]))
    else:
        lines.append(",%d" % report_section["count"])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# eigen
# ---------------------------------------------------------------------------


def cmd_eigen(cfg: ExperimentConfig) -> dict:
    prob = cfg.problem()
    ctx = prob.ctx
    sp = zero_weight_space(prob.n)
    lam_pts = sample_cell_points(ctx, cfg.parallelogram_base, 10, cfg.seed)
    x_pts = sample_cell_points(ctx, cfg.parallelogram_base, 10, cfg.seed + 1,
                               avoid=prob.z)
    worst = {name: 0.0 for name in
             ("eigen_relation", "eigen_sum_rule", "eigenvalue_sum", "s2_routes",
              "s2_eigen_b2", "b2_periodicity", "kernel_membership", "weyl_ratio")}
    warnings, ratio_table = [], []

    for subset in cfg.subset_list():
        try:
            sol = solve_bae(prob, seed_asymptotic(prob, subset),
                            subset_tag=subset)
            if not sol.converged:
                raise SolveError("no convergence (residual %.3e)" % sol.residual)
            par = analytic_involution(sol)
        except (SeedTooCoarseError, CoalescedRootsError, SolveError,
                InvolutionMismatchError, ValueError) as exc:
            warnings.append("subset %s skipped: %s" % (subset, exc))
            continue

        try:
            eigenvalues = kzb_eigenvalues(sol)
        except ArithmeticError as exc:
            warnings.append("subset %s: %s" % (subset, exc))
            worst["eigenvalue_sum"] = max(worst["eigenvalue_sum"], 1.0)
            continue
        worst["eigenvalue_sum"] = max(worst["eigenvalue_sum"],
                                      abs(sum(eigenvalues.e)))
        expected = (eigenvalues.e0,) + eigenvalues.e

        F = psi_triple(sol)
        F_par = psi_triple(par)
        lifted = weyl_on_function(F, sp)
        ratios = []
        for lam in lam_pts:
            value = F(lam)[0]
            vnorm = np.linalg.norm(value)
            outs = [apply_kzb(a, F, lam, prob.z, ctx)
                    for a in range(prob.n + 1)]
            for a, out in enumerate(outs):
                rel = np.linalg.norm(out - expected[a] * value) / vnorm
                worst["eigen_relation"] = max(worst["eigen_relation"], rel)
            total = np.sum(outs[1:], axis=0)
            worst["eigen_sum_rule"] = max(worst["eigen_sum_rule"],
                                          np.linalg.norm(total) / vnorm)
            ratio = lifted(lam)[0] / F_par(lam)[0]
            ratios.append(ratio)
            ratio_table.append({
                "subset": list(subset),
                "lambda": lam,
                "ratio": complex(np.mean(ratio)),
                "component_spread": float(np.max(np.abs(ratio - np.mean(ratio)))),
            })
        arr = np.concatenate(ratios)
        mean = arr.mean()
        worst["weyl_ratio"] = max(worst["weyl_ratio"],
                                  float(np.max(np.abs(arr - mean)) / abs(mean)))

        wr = wronskian(sol.poly(), par.poly())
        for x, lam in zip(x_pts, lam_pts):
            value = F(lam)[0]
            vnorm = np.linalg.norm(value)
            via_kzb = s2_via_kzb(x, F, lam, prob.z, ctx)
            via_det = apply_rst_n2(x, F, lam, prob.z, ctx)
            worst["s2_routes"] = max(
                worst["s2_routes"],
                np.linalg.norm(via_kzb - via_det)
                / max(1.0, np.linalg.norm(via_kzb)))
            b2 = fundamental_b2(x, sol)
            worst["s2_eigen_b2"] = max(
                worst["s2_eigen_b2"],
                np.linalg.norm(via_kzb - b2 * value) / vnorm)
            scale = max(1.0, abs(b2))
            worst["b2_periodicity"] = max(
                worst["b2_periodicity"],
                abs(fundamental_b2(x + 1, sol) - b2) / scale,
                abs(fundamental_b2(x + ctx.tau, sol) - b2) / scale)
            wd = wr.derivs(x, 2)
            for poly in (sol.poly(), par.poly()):
                pd = poly.derivs(x, 2)
                v = pd[1] / pd[0] - 0.5 * wd[1] / wd[0]
                vp = (pd[2] / pd[0] - (pd[1] / pd[0]) ** 2
                      - 0.5 * (wd[2] / wd[0] - (wd[1] / wd[0]) ** 2))
                worst["kernel_membership"] = max(
                    worst["kernel_membership"], abs(vp + v * v + b2) / scale)

    checks = [_check(name, worst[name], cfg.tolerance(name)) for name in worst]
    return {"checks": checks, "warnings": warnings, "ratio_table": ratio_table}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


COMMANDS = {
    "identities": cmd_identities,
    "solve": cmd_solve,
    "fiber": cmd_fiber,
    "eigen": cmd_eigen,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellbethe",
        description="Verification driver for the elliptic Bethe package.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help="run the %s suite" % name)
        p.add_argument("--config", help="path to a JSON experiment config")
        p.add_argument("--json", action="store_true",
                       help="emit the report as JSON on stdout")
        p.add_argument("--csv", help="write a plot-ready CSV table (fiber)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--strict", action="store_true",
                       help="treat warnings as failures (exit 1)")
        p.add_argument("--mu-grid",
                       help="comma-separated mu values, e.g. '8i,6i,4i,2i'")
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock timings (breaks byte "
                            "determinism between runs)")
    return parser


def load_config(args) -> ExperimentConfig:
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise ConfigError("cannot read config: %s" % exc) from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config is not valid JSON: %s" % exc) from None
    else:
        raw = {}
    cfg = ExperimentConfig.from_dict(raw)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.mu_grid:
        grid = tuple(_parse_mu_token(t) for t in args.mu_grid.split(","))
        cfg = dataclasses.replace(cfg, mu_grid=grid)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = load_config(args)
        body = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "seed": cfg.seed,
        "config": cfg.echo(),
        "warnings": [],
    }
    report.update(body)
    if args.timings:
        report["timings"] = {"total_s": time.perf_counter() - started}
    if args.csv and "fiber" in report:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(_fiber_csv(report["fiber"]))
    sys.stdout.write(_render(report, args.json))
    failed = any(c["status"] == "fail" for c in report["checks"])
    if failed:
        return 1
    if args.strict and report["warnings"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
