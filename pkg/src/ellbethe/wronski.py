"""Fiber enumeration for the elliptic Wronski map at large |Im mu|.

A fiber point over h = e^{-2 pi i mu x} prod_a theta(x - z_a) is a pair
(f, g) of degree-m theta-polynomials with Wr(f, g) proportional to h,
presented in the normal form f = prod theta(x - t_j) (label 0) and
g = e^{2 pi i (-mu + k) x} prod theta(x - s_j) with integer k.  Fiber
points are found by solving the Bethe equations from the asymptotic
seed of each m-element site subset and pairing each solution with its
analytic-involution partner; for |Im mu| above an instance-dependent
threshold this yields all C(2m, m) points, pairwise distinct, with
complementary subset tags inside each involution pair.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass

from .bethe import (
    BetheProblem,
    BetheSolution,
    InvolutionMismatchError,
    SeedTooCoarseError,
    analytic_involution,
    bae_residual,
    seed_asymptotic,
    solve_bae,
)
from .elliptic import PoleError, lattice_distance, reduce_argument
from .thetapoly import (
    ResidueViolationError,
    SolveError,
    ThetaPoly,
    wronskian,
)

TWOPI_I = 2j * math.pi

RESIDUAL_GATE = 1e-10      # max BAE residual for an accepted solution
WR_RESIDUAL_GATE = 1e-9    # max relative sampling residual of Wr(f,g) vs h
DEDUP_TOL = 1e-6           # below this normal-form distance, same point


class IncompleteFiberError(ArithmeticError):
    """Some subset seed failed to produce a certified fiber point."""

    code = "incomplete_fiber"

    def __init__(self, partial, failed):
        self.partial = partial
        self.failed = tuple(failed)
        names = ", ".join("%s (%s)" % (tag, why) for tag, why in self.failed)
        super().__init__("fiber enumeration incomplete; failed subsets: " + names)


@dataclass(frozen=True)
class FiberPoint:
    """One labeled point of the Wronski fiber, with its certificates."""

    f: ThetaPoly
    g: ThetaPoly
    subset_tag: tuple
    partner_tag: tuple
    wr_residual: float
    solution: BetheSolution
    partner: BetheSolution


@dataclass(frozen=True)
class FiberReport:
    problem: BetheProblem
    points: tuple
    count: int
    expected: int
    pairing: tuple
    mu_min_estimate: float = None
    warnings: tuple = ()


def _sample_points(problem, avoid, count=8):
    """Low-discrepancy cell points keeping clear of the given lattice orbits."""
    cell = problem.cell
    ctx = problem.ctx
    g1 = (math.sqrt(5.0) - 1.0) / 2.0
    g2 = math.sqrt(2.0) - 1.0
    out = []
    k = 0
    while len(out) < count and k < 40 * count:
        k += 1
        a = (0.5 + k * g1) % 1.0
        b = (0.37 + k * g2) % 1.0
        x = cell.base + a + b * ctx.tau
        if min(lattice_distance(x - p, ctx) for p in avoid) > 1e-3:
            out.append(x)
    if len(out) < count:
        raise ArithmeticError("could not place sample points away from roots")
    return out


def wr_certificate(f: ThetaPoly, g: ThetaPoly, problem: BetheProblem) -> float:
    """Relative sampling residual of Wr(f, g) against e^{-2 pi i mu x}
    prod_a theta(x - z_a); pointwise-relative, so the mu-envelope spanning
    many decades across the cell does not mask errors."""
    target = ThetaPoly(1.0, -problem.mu, problem.z, problem.ctx)
    wr = wronskian(f, g)
    avoid = tuple(f.roots) + tuple(g.roots) + tuple(problem.z)
    xs = _sample_points(problem, avoid)
    ratio = None
    worst = 0.0
    for x in xs:
        a = wr.eval(x)
        b = target.eval(x)
        if ratio is None:
            ratio = a / b
            continue
        err = abs(a - ratio * b) / max(abs(a), abs(ratio * b))
        worst = max(worst, err)
    return worst


def _normal_form_distance(sol_a: BetheSolution, sol_b: BetheSolution) -> float:
    """Max lattice-reduced coordinate distance between sorted root tuples."""
    key = lambda c: (round(c.real, 9), round(c.imag, 9))
    ra = sorted(sol_a.t, key=key)
    rb = sorted(sol_b.t, key=key)
    ctx = sol_a.problem.ctx
    return max(lattice_distance(a - b, ctx) for a, b in zip(ra, rb))


def _present_near_sites(sol: BetheSolution) -> BetheSolution:
    """Move each root to its lattice representative nearest a site.

    The (root + l*tau, mu - 2l) moves preserve the underlying section, so
    this only changes the presentation; in the asymptotic regime it lands
    every partner root next to its site and the g-label at exactly -mu.
    """
    problem = sol.problem
    roots = []
    mu = sol.mu
    for s in sol.t:
        site = min(problem.z, key=lambda z: lattice_distance(s - z, problem.ctx))
        x0, move = reduce_argument(s - site, problem.ctx)
        roots.append(site + x0)
        mu += 2 * move.l
    res = max(abs(v) for v in bae_residual(roots, problem, mu))
    return dataclasses.replace(sol, t=tuple(roots), mu=mu, residual=float(res))


def _point_for_subset(problem, subset):
    """Solve, certify, and package one subset's fiber point.

    The solution is used raw (not cell-normalized): f = prod theta(x - t_j)
    has label exactly 0 only for root representatives satisfying the Bethe
    equations at mu itself, and lattice-reducing a root would silently turn
    the pair into a different section (caught by the Wr certificate).
    """
    # Bethe-equation terms grow like |2 pi mu|, so the convergence floor in
    # double precision does too; keep the demand proportionate (and always
    # far below RESIDUAL_GATE at desk scale).
    tol = max(1e-12, 2e-14 * abs(TWOPI_I * problem.mu))
    sol = solve_bae(problem, seed_asymptotic(problem, subset),
                    tol=tol, subset_tag=tuple(subset))
    if not sol.converged or sol.residual > RESIDUAL_GATE:
        raise SolveError("no convergence (residual %.2e)" % sol.residual)
    par = _present_near_sites(analytic_involution(sol))
    f = ThetaPoly(1.0, 0.0, sol.t, problem.ctx)
    g = ThetaPoly(1.0, (par.mu - sol.mu) / 2.0, par.t, problem.ctx)
    for a, b in itertools.combinations(tuple(sol.t) + tuple(par.t) + tuple(problem.z), 2):
        if lattice_distance(a - b, problem.ctx) < 1e-6:
            raise SolveError("fiber roots collide with each other or a site")
    residual = wr_certificate(f, g, problem)
    if residual > WR_RESIDUAL_GATE:
        raise ResidueViolationError(
            "Wr(f,g) fails the target-shape certificate (%.2e)" % residual)
    return FiberPoint(f, g, tuple(subset), par.subset_tag, residual, sol, par)


def enumerate_fiber(problem: BetheProblem, subsets=None) -> FiberReport:
    """Enumerate the labeled fiber over e^{-2 pi i mu x} prod theta(x - z_a).

    One Bethe solve per m-element site subset; duplicates (below-threshold
    mu can merge basins, and repeated subsets are allowed in an explicit
    `subsets` list) are collapsed by normal-form comparison.  Raises
    IncompleteFiberError, carrying the partial report and the failing
    subsets, if any subset fails to converge or to certify.
    """
    if subsets is None:
        subsets = itertools.combinations(range(problem.n), problem.m)
    failures = []
    points = []
    warnings = []
    for subset in subsets:
        try:
            point = _point_for_subset(problem, subset)
        except (SolveError, SeedTooCoarseError, ResidueViolationError,
                InvolutionMismatchError, PoleError, ArithmeticError) as exc:
            failures.append((subset, exc.__class__.__name__))
            continue
        if any(_normal_form_distance(point.solution, q.solution) < DEDUP_TOL
               for q in points):
            continue
        expected_partner = tuple(sorted(set(range(problem.n)) - set(subset)))
        if point.partner_tag != expected_partner:
            warnings.append(
                "subset %s pairs with %s, not its complement (below-threshold mu?)"
                % (subset, point.partner_tag))
        points.append(point)
    pairing = tuple(sorted({tuple(sorted((p.subset_tag, p.partner_tag)))
                            for p in points}))
    report = FiberReport(
        problem=problem,
        points=tuple(points),
        count=len(points),
        expected=math.comb(problem.n, problem.m),
        pairing=pairing,
        warnings=tuple(warnings),
    )
    if failures:
        raise IncompleteFiberError(report, failures)
    return report


def estimate_mu_min(problem: BetheProblem, mu_grid) -> float:
    """Smallest |Im mu| on the grid with a complete, certified fiber.

    The grid must be sorted by |Im mu| descending; scanning stops at the
    first failure.  Returns None when even the largest grid value fails.
    """
    grid = list(mu_grid)
    mags = [abs(complex(mu).imag) for mu in grid]
    if mags != sorted(mags, reverse=True):
        raise ValueError("mu_grid must be sorted by |Im mu| descending")
    best = None
    for mu in grid:
        candidate = dataclasses.replace(problem, mu=mu)
        try:
            report = enumerate_fiber(candidate)
        except IncompleteFiberError:
            break
        if report.count != report.expected or report.warnings:
            break
        best = abs(complex(mu).imag)
    return best


def count_ratios(problem: BetheProblem) -> int:
    """Number of fiber points in the k = 0 normal form F = g/f, i.e. with
    g carrying label exactly -mu (then F' is proportional to
    e^{-2 pi i mu x} prod theta(x - z_a) / prod theta(x - t_j)^2)."""
    report = enumerate_fiber(problem)
    count = 0
    for point in report.points:
        k = point.g.mu + problem.mu
        if abs(k) < 1e-8:
            count += 1
    return count


def asymptotic_deviation(point: FiberPoint) -> float:
    """max_j |(t_j - z_{i_j}) 2 pi i mu - 1|, pairing each root to the
    nearest tagged site; O(1/|mu|) at a fiber point (first-order law)."""
    problem = point.solution.problem
    mu = point.solution.mu
    out = 0.0
    for t in point.solution.t:
        dev = min(abs((t - problem.z[a]) * TWOPI_I * mu - 1.0)
                  for a in point.subset_tag)
        out = max(out, dev)
    return out


def partner_asymptotic_deviation(point: FiberPoint) -> float:
    """Mirrored law for the involution partner: s_j = z_{a} - 1/(2 pi i mu)
    + O(mu^-2) over the partner's own tag, using the partner parameter."""
    problem = point.solution.problem
    nu = point.partner.mu
    out = 0.0
    for s in point.partner.t:
        dev = min(abs((s - problem.z[a]) * TWOPI_I * nu - 1.0)
                  for a in point.partner_tag)
        out = max(out, dev)
    return out
