"""Zero-weight linear algebra and the KZB operator family for sl2.

The space is V = (C^2)^(tensor n) with n = 2m sites, each factor the
two-dimensional module on which e11 + e22 acts by zero, so per site

    e11 = diag(1/2, -1/2) = -e22,   e12 = [[0,1],[0,0]],   e21 = e12^T,

with v1 (weight +1) and v2 (weight -1) the standard basis.  The
zero-weight subspace V[0] has dimension C(n, m) and is spanned by the
vectors v_I, indexed by m-element subsets I of {0..n-1} (0-based site
labels): v_I carries v2 exactly at the positions in I.

Operators act on coefficient vectors in the subset basis.  They are
assembled from Kronecker products on the full 2^n-dimensional space and
restricted to V[0]; intermediate products that leave the zero-weight
subspace (as in the column-determinant expansion) are taken in the full
space before restricting.

Functions of the dynamical variable lambda (= lambda_1 - lambda_2 after
the sl2 reduction d/d lambda_1 -> d/d lambda, d/d lambda_2 -> -d/d
lambda) are passed to the operators as callables returning the triple
(value, d/d lambda, d^2/d lambda^2) of coefficient vectors, so the
operator layer is independent of how the function is represented.
"""

from __future__ import annotations

import cmath
import dataclasses
import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bethe import BetheProblem, BetheSolution, master_dtau, master_dz
from .elliptic import (
    Torus,
    eta,
    phi,
    rho,
    rho_prime,
    sigma,
    sigma_dw,
    sigma_dw2,
)

TWOPI_I = 2j * math.pi

E11 = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
E22 = -E11
E12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
E21 = E12.T.copy()
HW = E11 - E22  # diag(1, -1), the sl2 Cartan generator per site

# c2 = e11 e22 - e12 e21 + e11 acts on each C^2 factor by this scalar
C2_SCALAR = -0.75


class ZeroWeightSpace:
    """Subset basis of V[0] in (C^2)^(tensor n), with cached site operators."""

    def __init__(self, n_sites: int):
        if n_sites <= 0 or n_sites % 2 != 0:
            raise ValueError("need a positive even number of sites, got %d" % n_sites)
        self.n_sites = n_sites
        self.m = n_sites // 2
        self.subsets = tuple(itertools.combinations(range(n_sites), self.m))
        self.dim = len(self.subsets)
        self.full_dim = 2 ** n_sites
        self._index = {I: k for k, I in enumerate(self.subsets)}
        # full-space coordinate of v_I: site 0 is the leftmost tensor factor
        self._embed = np.array(
            [sum(1 << (n_sites - 1 - i) for i in I) for I in self.subsets]
        )
        self._site_full = [
            {name: self._kron_one(mat, s) for name, mat in
             (("e11", E11), ("e22", E22), ("e12", E12), ("e21", E21), ("hw", HW))}
            for s in range(n_sites)
        ]
        self.e11_total = sum(ops["e11"] for ops in self._site_full)
        self.e22_total = sum(ops["e22"] for ops in self._site_full)
        # restricted blocks used by the KZB operators
        self.hw_site = [self.restrict(ops["hw"]) for ops in self._site_full]
        self.omega0 = [[self.restrict(self._pair(s, "e11", p, "e11")
                                      + self._pair(s, "e22", p, "e22"))
                        for p in range(n_sites)] for s in range(n_sites)]
        self.lower_raise = [[self.restrict(self._pair(s, "e12", p, "e21"))
                             for p in range(n_sites)] for s in range(n_sites)]
        self.raise_lower = [[self.restrict(self._pair(s, "e21", p, "e12"))
                             for p in range(n_sites)] for s in range(n_sites)]

    def _kron_one(self, mat: np.ndarray, site: int) -> np.ndarray:
        out = np.eye(1, dtype=complex)
        for s in range(self.n_sites):
            out = np.kron(out, mat if s == site else np.eye(2, dtype=complex))
        return out

    def _pair(self, s: int, name_s: str, p: int, name_p: str) -> np.ndarray:
        return self._site_full[s][name_s] @ self._site_full[p][name_p]

    def site_full(self, name: str, site: int) -> np.ndarray:
        """Full-space matrix of a one-site generator ('e11', 'e12', ...)."""
        return self._site_full[site][name]

    def index(self, subset) -> int:
        return self._index[tuple(sorted(subset))]

    def complement(self, subset) -> tuple:
        return tuple(sorted(set(range(self.n_sites)) - set(subset)))

    def restrict(self, full_op: np.ndarray) -> np.ndarray:
        return full_op[np.ix_(self._embed, self._embed)]

    def embed(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros(self.full_dim, dtype=complex)
        out[self._embed] = coeffs
        return out

    def project(self, full_vec: np.ndarray) -> np.ndarray:
        return full_vec[self._embed]


@functools.lru_cache(maxsize=None)
def zero_weight_space(n_sites: int) -> ZeroWeightSpace:
    return ZeroWeightSpace(n_sites)


@dataclass(frozen=True)
class KzbEigenvalues:
    """Eigenvalue tuple (E0 for H_0; E[a] for H_{a+1}) of a Bethe solution."""

    e0: complex
    e: tuple

    def __post_init__(self):
        total = abs(sum(self.e))
        if total > 1e-8:
            raise ArithmeticError(
                "KZB eigenvalues must sum to zero (got |sum| = %.3e)" % total)


def kzb_eigenvalues(sol: BetheSolution) -> KzbEigenvalues:
    """Eigenvalues of H_0, ..., H_n on the eigenfunction of a solution."""
    prob = sol.problem
    if sol.mu != prob.mu:
        prob = dataclasses.replace(prob, mu=sol.mu)
    return KzbEigenvalues(master_dtau(sol.t, prob), tuple(master_dz(sol.t, prob)))


# ---------------------------------------------------------------------------
# the Bethe eigenfunction Psi
# ---------------------------------------------------------------------------


def _sigma_stack(x: complex, lam: complex, ctx: Torus) -> tuple:
    """(g, g', g'') for g(lambda) = sigma(x, -lambda), quotient-rule forms."""
    return (
        sigma(x, -lam, ctx),
        -sigma_dw(x, -lam, ctx),
        sigma_dw2(x, -lam, ctx),
    )


def _product_triple(factors) -> tuple:
    """Leibniz fold of (value, d1, d2) triples of scalar factors."""
    p0, p1, p2 = 1.0 + 0j, 0j, 0j
    for g0, g1, g2 in factors:
        p2 = p2 * g0 + 2.0 * p1 * g1 + p0 * g2
        p1 = p1 * g0 + p0 * g1
        p0 = p0 * g0
    return p0, p1, p2


def psi_derivs(lam: complex, sol: BetheSolution) -> tuple:
    """(Psi, dPsi/dlambda, d2Psi/dlambda2) at lambda, in the subset basis.

    Psi = e^{pi i mu lambda} sum_I W_I v_I with
    W_I = Sym_t prod_j sigma(t_j - z_{i_j}, -lambda); the symmetrization is
    the plain sum over the m! orderings of the roots.
    """
    prob = sol.problem
    sp = zero_weight_space(prob.n)
    ctx = prob.ctx
    m = prob.m
    stacks = [[_sigma_stack(sol.t[j] - prob.z[s], lam, ctx)
               for s in range(prob.n)] for j in range(m)]
    w = np.zeros((3, sp.dim), dtype=complex)
    for idx, subset in enumerate(sp.subsets):
        for perm in itertools.permutations(range(m)):
            term = _product_triple(stacks[perm[j]][subset[j]] for j in range(m))
            w[:, idx] += term
    c = 1j * math.pi * sol.mu
    envelope = cmath.exp(c * lam)
    value = envelope * w[0]
    d1 = envelope * (c * w[0] + w[1])
    d2 = envelope * (c * c * w[0] + 2.0 * c * w[1] + w[2])
    return value, d1, d2


def psi(lam: complex, sol: BetheSolution) -> np.ndarray:
    """The V[0]-valued eigenfunction Psi at lambda (coefficient vector)."""
    return psi_derivs(lam, sol)[0]


def psi_triple(sol: BetheSolution):
    """Psi as a callback triple, the form the operator layer consumes."""
    return lambda lam: psi_derivs(lam, sol)


# ---------------------------------------------------------------------------
# KZB operators
# ---------------------------------------------------------------------------


def apply_kzb(a: int, F, lam: complex, z, ctx: Torus) -> np.ndarray:
    """Apply the KZB operator H_a (a = 0 is the tau-direction operator).

    F is a callable lam -> (value, d1, d2) of subset-basis coefficient
    vectors.  For a >= 1 the operator attached to site a-1 (0-based) is

        H_s = -hw^(s) d/dlambda + sum_{p != s} [ rho(z_s - z_p) Omega0^(s,p)
              + sigma(z_s - z_p, -lambda) e12^(s) e21^(p)
              + sigma(z_s - z_p, +lambda) e21^(s) e12^(p) ],

    and H_0 = (1/2 pi i) d^2/dlambda^2 + (1/4 pi i) sum_{s,p} [
    (1/2) eta(z_s - z_p) Omega0^(s,p) - phi(lambda, z_s - z_p) e12^(s) e21^(p)
    - phi(-lambda, z_s - z_p) e21^(s) e12^(p) ], where the diagonal s = p
    terms take the removable values eta(0) and phi(+-lambda, 0) = -rho'(lambda).
    """
    n = len(z)
    sp = zero_weight_space(n)
    value, d1, d2 = F(lam)
    if a == 0:
        acc = 2.0 * np.asarray(d2, dtype=complex)
        for s in range(n):
            for p in range(n):
                d = z[s] - z[p] if s != p else 0.0
                acc += 0.5 * eta(d, ctx) * (sp.omega0[s][p] @ value)
                acc -= phi(lam, d, ctx) * (sp.lower_raise[s][p] @ value)
                acc -= phi(-lam, d, ctx) * (sp.raise_lower[s][p] @ value)
        return acc / (4j * math.pi)
    s = a - 1
    acc = -(sp.hw_site[s] @ np.asarray(d1, dtype=complex))
    for p in range(n):
        if p == s:
            continue
        d = z[s] - z[p]
        acc += rho(d, ctx) * (sp.omega0[s][p] @ value)
        acc += sigma(d, -lam, ctx) * (sp.lower_raise[s][p] @ value)
        acc += sigma(d, lam, ctx) * (sp.raise_lower[s][p] @ value)
    return acc


def s2_via_kzb(x: complex, F, lam: complex, z, ctx: Torus) -> np.ndarray:
    """S2(x) F via the KZB combination

    S2(x) = -2 pi i H_0 - sum_s [ H_s rho(x - z_s) + c2^(s) rho'(x - z_s) ]

    with c2^(s) the scalar -3/4 on each two-dimensional factor.
    """
    out = -TWOPI_I * apply_kzb(0, F, lam, z, ctx)
    value = F(lam)[0]
    for s in range(len(z)):
        out -= rho(x - z[s], ctx) * apply_kzb(s + 1, F, lam, z, ctx)
        out -= C2_SCALAR * rho_prime(x - z[s], ctx) * value
    return out


# ---------------------------------------------------------------------------
# the column-determinant route to S2 (N = 2)
# ---------------------------------------------------------------------------


def _l_matrices(x: complex, lam: complex, z, sp: ZeroWeightSpace, ctx: Torus):
    """Full-space matrices L11, L22, L12, L21, dL22/dx at (x, lambda)."""
    n = len(z)
    l11 = rho(lam, ctx) * sp.e22_total
    l22 = -rho(lam, ctx) * sp.e11_total
    l12 = np.zeros((sp.full_dim, sp.full_dim), dtype=complex)
    l21 = np.zeros_like(l12)
    dx22 = np.zeros_like(l12)
    for k in range(n):
        l11 = l11 + rho(x - z[k], ctx) * sp.site_full("e11", k)
        l22 = l22 + rho(x - z[k], ctx) * sp.site_full("e22", k)
        dx22 = dx22 + rho_prime(x - z[k], ctx) * sp.site_full("e22", k)
        l12 = l12 + sigma(x - z[k], -lam, ctx) * sp.site_full("e21", k)
        l21 = l21 + sigma(x - z[k], lam, ctx) * sp.site_full("e12", k)
    return l11, l22, l12, l21, dx22


def apply_rst_n2(x: complex, F, lam: complex, z, ctx: Torus) -> np.ndarray:
    """S2(x) F from the N = 2 column determinant
    cdet(delta ∂_x - delta ∂_{lambda_j} + L) = D11 D22 - D21 D12.

    Expanded once analytically for x-independent F (so D F = S2(x) F):

        D F = -F'' + (L11 - L22) F'
              + [dL22/dx + rho'(lambda) e11_total + L11 L22 - L21 L12] F.

    The product L21 L12 passes through the weight -2 subspace, so all
    products are taken in the full tensor space before restricting.
    """
    n = len(z)
    sp = zero_weight_space(n)
    value, d1, d2 = F(lam)
    l11, l22, l12, l21, dx22 = _l_matrices(x, lam, z, sp, ctx)
    fv = sp.embed(np.asarray(value, dtype=complex))
    fd1 = sp.embed(np.asarray(d1, dtype=complex))
    out = (l11 - l22) @ fd1
    out += (dx22 + rho_prime(lam, ctx) * sp.e11_total) @ fv
    out += l11 @ (l22 @ fv) - l21 @ (l12 @ fv)
    return sp.project(out) - np.asarray(d2, dtype=complex)


def rst_s1_residual(x: complex, F, lam: complex, z, ctx: Torus) -> float:
    """Norm of S1(x) F = (L11 + L22) F - (∂_{lambda_1} + ∂_{lambda_2}) F.

    S1 vanishes identically on zero-weight functions of lambda_12; the
    derivative part cancels by the sl2 reduction, so this evaluates the
    matrix part alone.
    """
    sp = zero_weight_space(len(z))
    value = np.asarray(F(lam)[0], dtype=complex)
    l11, l22 = _l_matrices(x, lam, z, sp, ctx)[:2]
    out = sp.project((l11 + l22) @ sp.embed(value))
    return float(np.linalg.norm(out))


# ---------------------------------------------------------------------------
# the fundamental second-order operator of an eigenfunction
# ---------------------------------------------------------------------------


def fundamental_b2(x: complex, sol: BetheSolution) -> complex:
    """B2(x) with d^2/dx^2 + B2(x) the fundamental operator of Psi.

    B2 = -w' - w^2 for w = (ln u)' = pi i mu + sum_j rho(x - t_j)
    - (1/2) sum_s rho(x - z_s).
    """
    prob = sol.problem
    ctx = prob.ctx
    w = 1j * math.pi * sol.mu
    wp = 0j
    for tj in sol.t:
        w += rho(x - tj, ctx)
        wp += rho_prime(x - tj, ctx)
    for zs in prob.z:
        w -= 0.5 * rho(x - zs, ctx)
        wp -= 0.5 * rho_prime(x - zs, ctx)
    return -wp - w * w


# ---------------------------------------------------------------------------
# Weyl involution
# ---------------------------------------------------------------------------


def weyl_involution(coeffs: np.ndarray, space: ZeroWeightSpace) -> np.ndarray:
    """The nontrivial sl2 Weyl element on V[0].

    Per factor s v1 = v2, s v2 = -v1, so s v_I = (-1)^m v_{complement(I)}
    on the zero-weight basis.
    """
    out = np.zeros_like(np.asarray(coeffs, dtype=complex))
    sign = -1.0 if space.m % 2 else 1.0
    for idx, subset in enumerate(space.subsets):
        out[space.index(space.complement(subset))] = sign * coeffs[idx]
    return out


def weyl_on_function(F, space: ZeroWeightSpace):
    """(sF)(lambda) = s . F(-lambda), as a callback triple."""

    def transformed(lam):
        value, d1, d2 = F(-lam)
        return (
            weyl_involution(value, space),
            -weyl_involution(d1, space),
            weyl_involution(d2, space),
        )

    return transformed
