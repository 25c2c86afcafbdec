"""Bethe-ansatz equations on the torus and their master function.

For n = 2m sites z_1..z_n (each carrying the two-dimensional irreducible) and
a twist parameter mu, the master function of the weight-zero subspace is

    Phi(t; z, tau, mu) = (pi i / 2) mu^2 tau + 2 pi i mu (sum t_i - (1/2) sum z_s)
                         + 2 sum_{i<j} ln theta(t_i - t_j)
                         - sum_{i,s} ln theta(t_i - z_s)
                         + (1/2) sum_{s<r} ln theta(z_s - z_r),

with m Bethe roots t.  Its critical-point equations are the Bethe-ansatz
equations

    F_j(t) = 2 pi i mu + 2 sum_{k != j} rho(t_j - t_k) - sum_s rho(t_j - z_s) = 0.

Solutions are equivalent under t_j -> t_j + 1 and under the simultaneous move
(t_j -> t_j + tau, mu -> mu - 2); `normalize_solution` reduces the roots into
a fundamental cell while shifting mu accordingly.

`analytic_involution` maps a solution (mu, t) to its Wronskian partner
(-mu + 2d, s): the theta polynomial g with Wr(f, g) = prod theta(x - z_s),
f = e^{pi i mu x} prod theta(x - t_j), has roots s that again solve the
Bethe equations, for a parameter that is -mu mod 2Z.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .elliptic import Torus, eta, lattice_distance, rho, rho_prime, theta_derivs
from .thetapoly import (
    FundamentalParallelogram,
    ThetaPoly,
    _residues_over_f_squared,
    solve_wronskian,
)

TWOPI_I = 2j * math.pi


class SeedTooCoarseError(ValueError):
    """Asymptotic seed displacement exceeds half the minimal site separation."""

    code = "seed_too_coarse"


class CoalescedRootsError(ArithmeticError):
    """Two Bethe roots (or a root and a site) collided during the solve."""

    code = "coalesced_roots"


class InvolutionMismatchError(ArithmeticError):
    """Wronskian partner does not satisfy the Bethe equations as expected."""

    code = "involution_mismatch"


@dataclass(frozen=True)
class BetheProblem:
    """n = 2m sites, twist mu, and the cell used for normal forms.

    Sites must be pairwise distinct mod the lattice (separation > 1e-6) and
    lie in the half-open fundamental cell.
    """

    m: int
    z: tuple
    mu: complex
    ctx: Torus
    cell: FundamentalParallelogram = None

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "mu", complex(self.mu))
        if self.cell is None:
            object.__setattr__(self, "cell", FundamentalParallelogram(0.0, self.ctx))
        if len(self.z) != 2 * self.m:
            raise ValueError("need exactly 2m = %d sites, got %d" % (2 * self.m, len(self.z)))
        for i in range(len(self.z)):
            if not self.cell.contains(self.z[i]):
                raise ValueError("site %d = %r outside the fundamental cell" % (i, self.z[i]))
            for j in range(i + 1, len(self.z)):
                if lattice_distance(self.z[i] - self.z[j], self.ctx) <= 1e-6:
                    raise ValueError("sites %d and %d coincide mod the lattice" % (i, j))

    @property
    def n(self) -> int:
        return 2 * self.m

    def min_site_separation(self) -> float:
        return min(lattice_distance(self.z[i] - self.z[j], self.ctx)
                   for i in range(self.n) for j in range(i + 1, self.n))


@dataclass(frozen=True)
class BetheSolution:
    """Bethe roots t with the parameter mu they actually satisfy.

    `mu` starts equal to problem.mu but changes by even integers under the
    normalization moves, so it is carried explicitly.  `subset_tag` records
    which sites the roots were seeded at / are nearest to, when known.
    """

    problem: BetheProblem
    t: tuple
    mu: complex
    residual: float
    converged: bool
    subset_tag: tuple = None

    def poly(self, scale: complex = 1.0) -> ThetaPoly:
        """The associated theta polynomial f = e^{pi i mu x} prod theta(x - t_j).

        Note the half: the ThetaPoly label is mu/2.  This is what makes the
        residues of W/f^2 vanish exactly at the Bethe equations (the residue
        condition at a root reads sum_s rho(t_j - z_s) = 2 pi i (2 label)
        + 2 sum_k rho(t_j - t_k)), and it is why lattice moves shift the label
        by sum l_j but the Bethe parameter by 2 sum l_j.
        """
        return ThetaPoly(scale, self.mu / 2.0, self.t, self.problem.ctx)


# ---------------------------------------------------------------------------
# master function and Bethe equations
# ---------------------------------------------------------------------------


def master_phi(t, problem: BetheProblem) -> complex:
    """Phi(t); uses principal logarithms, so only defined mod 2 pi i.

    Derivatives (master_dz, master_dtau, bae_residual) are single-valued and
    are what the eigenvalue formulas consume.
    """
    z, mu, ctx, tau = problem.z, problem.mu, problem.ctx, problem.ctx.tau
    t = [complex(v) for v in t]
    val = 0.5j * math.pi * mu * mu * tau + TWOPI_I * mu * (sum(t) - 0.5 * sum(z))
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            val += 2.0 * cmath.log(theta_derivs(t[i] - t[j], ctx, 0)[0])
    for ti in t:
        for zs in z:
            val -= cmath.log(theta_derivs(ti - zs, ctx, 0)[0])
    for s in range(len(z)):
        for r in range(s + 1, len(z)):
            val += 0.5 * cmath.log(theta_derivs(z[s] - z[r], ctx, 0)[0])
    return val


def master_dz(t, problem: BetheProblem) -> np.ndarray:
    """Gradient (dPhi/dz_1, ..., dPhi/dz_n); these are the Hamiltonian eigenvalues."""
    z, mu, ctx = problem.z, problem.mu, problem.ctx
    out = np.zeros(problem.n, dtype=complex)
    for a in range(problem.n):
        val = -1j * math.pi * mu
        for ti in t:
            val -= rho(z[a] - ti, ctx)
        for r in range(problem.n):
            if r != a:
                val += 0.5 * rho(z[a] - z[r], ctx)
        out[a] = val
    return out


def master_dtau(t, problem: BetheProblem) -> complex:
    """dPhi/dtau, via 4 pi i d/dtau ln theta(u) = eta(u) - eta(0)."""
    z, mu, ctx = problem.z, problem.mu, problem.ctx
    eta0 = theta_derivs(0.0, ctx, 3)[3]
    acc = 0j
    t = [complex(v) for v in t]
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            acc += 2.0 * (eta(t[i] - t[j], ctx) - eta0)
    for ti in t:
        for zs in z:
            acc -= eta(ti - zs, ctx) - eta0
    for s in range(len(z)):
        for r in range(s + 1, len(z)):
            acc += 0.5 * (eta(z[s] - z[r], ctx) - eta0)
    return 0.5j * math.pi * mu * mu + acc / (4j * math.pi)


def bae_residual(t, problem: BetheProblem, mu: complex = None) -> np.ndarray:
    """Vector of Bethe equation values F_j(t) (zero at a solution)."""
    z, ctx = problem.z, problem.ctx
    if mu is None:
        mu = problem.mu
    t = [complex(v) for v in t]
    out = np.zeros(len(t), dtype=complex)
    for j, tj in enumerate(t):
        val = TWOPI_I * mu
        for k, tk in enumerate(t):
            if k != j:
                val += 2.0 * rho(tj - tk, ctx)
        for zs in z:
            val -= rho(tj - zs, ctx)
        out[j] = val
    return out


def bae_jacobian(t, problem: BetheProblem) -> np.ndarray:
    """dF_j/dt_l; mu does not enter."""
    z, ctx = problem.z, problem.ctx
    t = [complex(v) for v in t]
    m = len(t)
    jac = np.zeros((m, m), dtype=complex)
    for j, tj in enumerate(t):
        diag = 0j
        for k, tk in enumerate(t):
            if k != j:
                rp = rho_prime(tj - tk, ctx)
                diag += 2.0 * rp
                jac[j, k] = -2.0 * rp
        for zs in z:
            diag -= rho_prime(tj - zs, ctx)
        jac[j, j] = diag
    return jac


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------


def seed_asymptotic(problem: BetheProblem, subset) -> tuple:
    """Seed roots t_j = z_{i_j} + 1/(2 pi i mu) for a size-m site subset.

    For large Im mu each Bethe root sits this close to its site; the seed is
    rejected if the displacement exceeds half the minimal site separation.
    """
    subset = tuple(subset)
    if len(subset) != problem.m or len(set(subset)) != problem.m:
        raise ValueError("subset must pick m distinct sites")
    shift = 1.0 / (TWOPI_I * problem.mu)
    if abs(shift) > 0.5 * problem.min_site_separation():
        raise SeedTooCoarseError(
            "seed displacement %.3g exceeds half the minimal site separation %.3g"
            % (abs(shift), 0.5 * problem.min_site_separation()))
    return tuple(problem.z[i] + shift for i in subset)


def _guarded_residual(t, problem, mu):
    """Residual norm, or inf when an evaluation lands on a pole."""
    try:
        return float(np.max(np.abs(bae_residual(t, problem, mu))))
    except ArithmeticError:
        return math.inf


def solve_bae(problem: BetheProblem, seed, mu: complex = None, *,
              tol: float = 1e-12, max_iter: int = 50,
              subset_tag: tuple = None) -> BetheSolution:
    """Damped Newton iteration for the Bethe equations.

    Backtracks the Newton step by halves (up to 20 times) until the residual
    satisfies an Armijo-type decrease; returns the best iterate with
    converged=False if tol is not reached within max_iter iterations.

    Raises
    ------
    CoalescedRootsError
        If roots collide with each other or a site (separation < 1e-8).
    """
    if mu is None:
        mu = problem.mu
    t = np.array([complex(v) for v in seed])
    best_t, best_res = t.copy(), _guarded_residual(t, problem, mu)
    for _ in range(max_iter):
        res = bae_residual(t, problem, mu)
        norm = float(np.max(np.abs(res)))
        if norm < best_res:
            best_t, best_res = t.copy(), norm
        if norm < tol:
            _check_separation(t, problem)
            return BetheSolution(problem, tuple(t), mu, norm, True, subset_tag)
        jac = bae_jacobian(t, problem)
        step = np.linalg.solve(jac, -res)
        lam = 1.0
        for _ in range(20):
            cand = t + lam * step
            cand_norm = _guarded_residual(cand, problem, mu)
            if cand_norm <= (1.0 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            break  # no productive step length: stop with best iterate
        t = t + lam * step
    _check_separation(best_t, problem)
    final = _guarded_residual(best_t, problem, mu)
    return BetheSolution(problem, tuple(best_t), mu, final, final < tol, subset_tag)


def _check_separation(t, problem):
    ctx = problem.ctx
    t = [complex(v) for v in t]
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            if lattice_distance(t[i] - t[j], ctx) < 1e-8:
                raise CoalescedRootsError("Bethe roots %d and %d coalesced" % (i, j))
        for s, zs in enumerate(problem.z):
            if lattice_distance(t[i] - zs, ctx) < 1e-8:
                raise CoalescedRootsError("Bethe root %d hit site %d" % (i, s))


# ---------------------------------------------------------------------------
# normal forms and the involution
# ---------------------------------------------------------------------------


def translate_root(sol: BetheSolution, j: int, k: int, l: int) -> BetheSolution:
    """Equivalence move t_j -> t_j + k + l tau, mu -> mu - 2l."""
    t = list(sol.t)
    t[j] = t[j] + k + l * sol.problem.ctx.tau
    new_mu = sol.mu - 2 * l
    res = float(np.max(np.abs(bae_residual(t, sol.problem, new_mu))))
    return replace(sol, t=tuple(t), mu=new_mu, residual=res)


def normalize_solution(sol: BetheSolution) -> BetheSolution:
    """Reduce all roots into the problem cell; mu shifts by +2 sum l_j."""
    cell = sol.problem.cell
    t = []
    mu = sol.mu
    for v in sol.t:
        red, (k, l) = cell.reduce(v)
        t.append(red)
        mu += 2 * l
    res = float(np.max(np.abs(bae_residual(t, sol.problem, mu))))
    return replace(sol, t=tuple(t), mu=mu, residual=res)


def site_wronskian(problem: BetheProblem, scale: complex = 1.0) -> ThetaPoly:
    """The fixed Wronskian target W(x) = prod_s theta(x - z_s), label 0."""
    return ThetaPoly(scale, 0.0, problem.z, problem.ctx)


def wronskian_residues(sol: BetheSolution) -> list[float]:
    """|residue| of W/f^2 at each Bethe root, relative to the local scale.

    All vanish at a true solution.  The normalization (max of |W/f^2| on the
    quadrature circle times its radius) matters: the raw integrand varies by
    many orders of magnitude across the cell through the e^{pi i mu x}^2
    envelope of f^2, so only the scale-relative residue is meaningful.
    """
    f = sol.poly()
    return [abs(res) / scale for (res, scale) in
            _residues_over_f_squared(f, site_wronskian(sol.problem))]


def nearest_site_tag(roots, problem: BetheProblem) -> tuple:
    """Indices of the sites nearest (mod lattice) to each root, sorted."""
    tags = []
    for t in roots:
        dists = [lattice_distance(t - zs, problem.ctx) for zs in problem.z]
        tags.append(int(np.argmin(dists)))
    return tuple(sorted(tags))


def analytic_involution(sol: BetheSolution) -> BetheSolution:
    """Wronskian partner of a Bethe solution.

    Solves Wr(f, g) = prod theta(x - z_s) for g, reads off the partner roots s,
    and determines the partner parameter nu from the partner's own Bethe
    equations; nu must equal -mu + 2d for an integer d (to 1e-8), and the full
    partner residual is re-verified.

    Raises
    ------
    ValueError
        If mu is within 1e-8 of an integer (the pairing degenerates).
    InvolutionMismatchError
        If no integer d fits or the partner residual exceeds 1e-8.
    """
    problem = sol.problem
    mu = sol.mu
    if abs(mu - round(mu.real)) < 1e-8:
        raise ValueError("involution undefined for integer mu (got %r)" % (mu,))
    result = solve_wronskian(sol.poly(), site_wronskian(problem), problem.cell)
    s = result.g.roots
    # each Bethe equation determines nu; average for robustness
    nu_vals = []
    for j, sj in enumerate(s):
        acc = 0j
        for k, sk in enumerate(s):
            if k != j:
                acc += 2.0 * rho(sj - sk, problem.ctx)
        for zs in problem.z:
            acc -= rho(sj - zs, problem.ctx)
        nu_vals.append(-acc / TWOPI_I)
    nu_exact = sum(nu_vals) / len(nu_vals)
    d = (nu_exact + mu) / 2.0
    d_int = round(d.real)
    if abs(d - d_int) > 1e-8:
        raise InvolutionMismatchError(
            "partner parameter %r is not -mu + 2d for integer d" % (nu_exact,))
    nu = -mu + 2 * d_int
    res = float(np.max(np.abs(bae_residual(s, problem, nu))))
    if res > 1e-8:
        raise InvolutionMismatchError("partner residual %.3e exceeds 1e-8" % res)
    return BetheSolution(problem, s, nu, res, True,
                         nearest_site_tag(s, problem))
