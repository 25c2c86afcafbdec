"""Tests of the zero-weight space, the eigenfunction Psi, and the KZB family."""

import cmath
import math

import numpy as np
import pytest

from ellbethe.elliptic import PoleError, Torus, theta
from ellbethe.bethe import (
    BetheProblem,
    analytic_involution,
    seed_asymptotic,
    solve_bae,
)
from ellbethe.thetapoly import wronskian
from ellbethe.repspace import (
    KzbEigenvalues,
    apply_kzb,
    apply_rst_n2,
    fundamental_b2,
    kzb_eigenvalues,
    psi,
    psi_derivs,
    psi_triple,
    rst_s1_residual,
    s2_via_kzb,
    weyl_involution,
    weyl_on_function,
    zero_weight_space,
)

CTX = Torus(1j)
Z4 = (0.13, 0.41 + 0.12j, 0.55 + 0.31j, 0.77 + 0.05j)
LAM = 0.31 + 0.17j


def solve_subset(prob, subset):
    return solve_bae(prob, seed_asymptotic(prob, subset), subset_tag=tuple(subset))


def fixture_solution(m=2, mu=10j, subset=None):
    z = Z4 if m == 2 else Z4[:2]
    subset = tuple(range(m)) if subset is None else subset
    return solve_subset(BetheProblem(m, z, mu, CTX), subset)


def random_test_function(space, seed=5):
    """A smooth V[0]-valued function with analytic derivative triple."""
    rng = np.random.default_rng(seed)
    c0 = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
    c1 = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)

    def F(lam):
        e = cmath.exp(0.3 * lam)
        return (
            c0 * e + c1 * cmath.cos(lam),
            0.3 * c0 * e - c1 * cmath.sin(lam),
            0.09 * c0 * e - c1 * cmath.cos(lam),
        )

    return F


def fd_triple(G, h):
    """Wrap a vector-valued callable into a 5-point-stencil derivative triple."""

    def trip(lam):
        gm2, gm1, g0, gp1, gp2 = (G(lam + k * h) for k in (-2, -1, 0, 1, 2))
        d1 = (-gp2 + 8 * gp1 - 8 * gm1 + gm2) / (12 * h)
        d2 = (-gp2 + 16 * gp1 - 30 * g0 + 16 * gm1 - gm2) / (12 * h * h)
        return g0, d1, d2

    return trip


class TestZeroWeightSpace:
    def test_dimensions(self):
        for m in (1, 2, 3):
            sp = zero_weight_space(2 * m)
            assert sp.dim == math.comb(2 * m, m)
            assert len(sp.subsets) == sp.dim

    def test_odd_site_count_rejected(self):
        with pytest.raises(ValueError):
            zero_weight_space(3)

    def test_basis_is_zero_weight(self):
        sp = zero_weight_space(4)
        weight = sp.restrict(sp.e11_total - sp.e22_total)
        assert np.max(np.abs(weight)) == 0.0

    def test_embed_project_round_trip(self):
        sp = zero_weight_space(4)
        rng = np.random.default_rng(0)
        v = rng.standard_normal(sp.dim) + 1j * rng.standard_normal(sp.dim)
        assert np.array_equal(sp.project(sp.embed(v)), v)

    def test_omega0_diagonal_is_half_identity(self):
        sp = zero_weight_space(4)
        for s in range(4):
            assert np.max(np.abs(sp.omega0[s][s] - 0.5 * np.eye(sp.dim))) == 0.0

    def test_index_and_complement(self):
        sp = zero_weight_space(4)
        assert sp.complement((0, 1)) == (2, 3)
        assert sp.index((1, 0)) == sp.index((0, 1))


class TestPsi:
    def test_m1_single_term(self):
        """For m=1 and I={0}, W_I is the single factor sigma(t - z_0, -lam)."""
        from ellbethe.elliptic import sigma

        sol = fixture_solution(m=1)
        sp = zero_weight_space(2)
        val = psi(LAM, sol)
        expect = cmath.exp(1j * math.pi * sol.mu * LAM) * sigma(
            sol.t[0] - sol.problem.z[0], -LAM, CTX)
        assert abs(val[sp.index((0,))] - expect) < 1e-12 * abs(expect)

    def test_derivatives_vs_fd(self):
        """Each derivative is checked relative to its own norm (the envelope
        makes |Psi''| ~ (pi mu)^2 |Psi|, so relative-to-value would just
        measure finite-difference truncation)."""
        sol = fixture_solution()
        val, d1, d2 = psi_derivs(LAM, sol)
        h = 1e-6
        fd1 = (psi(LAM + h, sol) - psi(LAM - h, sol)) / (2 * h)
        assert np.max(np.abs(d1 - fd1)) / np.linalg.norm(d1) < 1e-7
        h = 1e-5
        fd2 = (psi(LAM + h, sol) - 2 * val + psi(LAM - h, sol)) / h ** 2
        assert np.max(np.abs(d2 - fd2)) / np.linalg.norm(d2) < 1e-7

    def test_periodicity(self):
        """Psi(lam + 1) = e^{pi i mu} Psi(lam)."""
        sol = fixture_solution()
        lhs = psi(LAM + 1.0, sol)
        rhs = cmath.exp(1j * math.pi * sol.mu) * psi(LAM, sol)
        assert np.max(np.abs(lhs - rhs)) / np.linalg.norm(rhs) < 1e-12

    def test_lattice_pole(self):
        sol = fixture_solution()
        with pytest.raises(PoleError):
            psi(0.0, sol)
        with pytest.raises(PoleError):
            psi(1.0 + CTX.tau, sol)

    def test_asymptotic_limit(self):
        """Normalized by prod theta(t_j - z_{i_j}) and the exponential envelope,
        the eigenfunction tends to the basis vector of its own subset tag, with
        all other components decaying like 1/mu."""
        sp = zero_weight_space(4)
        tag = (0, 2)
        idx = sp.index(tag)
        prev = None
        for mu in (10j, 40j, 160j):
            sol = solve_subset(BetheProblem(2, Z4, mu, CTX), tag)
            scale = 1.0
            for j, s in enumerate(tag):
                scale *= theta(sol.t[j] - Z4[s], CTX)
            w0 = psi(LAM, sol) * scale * cmath.exp(-1j * math.pi * sol.mu * LAM)
            off = max(abs(w0[k]) for k in range(sp.dim) if k != idx)
            assert abs(w0[idx] - 1.0) < 12.0 / abs(mu)
            assert off < 12.0 / abs(mu)
            if prev is not None:
                assert off < prev / 2.0  # decays at least linearly in mu
            prev = off


class TestKzbOperators:
    def test_eigen_relations(self):
        """H_a Psi = (dPhi/dz_a) Psi and H_0 Psi = (dPhi/dtau) Psi."""
        rng = np.random.default_rng(2)
        for m in (1, 2):
            z = Z4 if m == 2 else Z4[:2]
            for mu in (6j, 10j):
                sol = solve_subset(BetheProblem(m, z, mu, CTX), tuple(range(m)))
                F = psi_triple(sol)
                ev = kzb_eigenvalues(sol)
                for _ in range(3):
                    lam = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3))
                    v = F(lam)[0]
                    nv = np.linalg.norm(v)
                    out = apply_kzb(0, F, lam, z, CTX)
                    assert np.linalg.norm(out - ev.e0 * v) / nv < 1e-8
                    for a in range(1, 2 * m + 1):
                        out = apply_kzb(a, F, lam, z, CTX)
                        assert np.linalg.norm(out - ev.e[a - 1] * v) / nv < 1e-8

    def test_sum_rule(self):
        """sum_s H_s = 0 on arbitrary zero-weight functions."""
        sp = zero_weight_space(4)
        F = random_test_function(sp)
        for lam in (LAM, 0.62 - 0.21j):
            total = sum(apply_kzb(s + 1, F, lam, Z4, CTX) for s in range(4))
            assert np.linalg.norm(total) < 1e-9 * np.linalg.norm(F(lam)[0])

    def test_eigenvalue_sum_constraint(self):
        ev = kzb_eigenvalues(fixture_solution())
        assert abs(sum(ev.e)) < 1e-8

    def test_eigenvalue_sum_violation_rejected(self):
        with pytest.raises(ArithmeticError):
            KzbEigenvalues(0.0, (1.0 + 0j, 2.0 + 0j))

    def test_commutators(self):
        """|[H_a, H_b] F| / |F| < 1e-7 (finite-difference outer derivatives)."""
        sp = zero_weight_space(4)
        F = random_test_function(sp)
        scale = np.linalg.norm(F(LAM)[0])
        for a in range(5):
            for b in range(a + 1, 5):
                ga = lambda l, a=a: apply_kzb(a, F, l, Z4, CTX)
                gb = lambda l, b=b: apply_kzb(b, F, l, Z4, CTX)
                comm = (apply_kzb(a, fd_triple(gb, 1e-3), LAM, Z4, CTX)
                        - apply_kzb(b, fd_triple(ga, 1e-3), LAM, Z4, CTX))
                assert np.linalg.norm(comm) / scale < 1e-7


class TestS2:
    def test_kzb_equals_column_determinant(self):
        """The KZB combination and the N=2 column determinant agree."""
        sp = zero_weight_space(4)
        F = random_test_function(sp)
        rng = np.random.default_rng(9)
        for _ in range(20):
            x = complex(rng.uniform(0.05, 0.95), rng.uniform(-0.4, 0.4))
            lam = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3))
            a = s2_via_kzb(x, F, lam, Z4, CTX)
            b = apply_rst_n2(x, F, lam, Z4, CTX)
            assert np.linalg.norm(a - b) / max(1.0, np.linalg.norm(a)) < 1e-8

    def test_s1_vanishes(self):
        sp = zero_weight_space(4)
        F = random_test_function(sp)
        for x in (0.37 + 0.21j, 0.64 - 0.11j):
            assert rst_s1_residual(x, F, LAM, Z4, CTX) < 1e-9

    def test_double_periodicity(self):
        sp = zero_weight_space(4)
        F = random_test_function(sp)
        x = 0.33 + 0.21j
        base = s2_via_kzb(x, F, LAM, Z4, CTX)
        scale = np.linalg.norm(base)
        assert np.linalg.norm(s2_via_kzb(x + 1, F, LAM, Z4, CTX) - base) / scale < 1e-9
        assert np.linalg.norm(s2_via_kzb(x + CTX.tau, F, LAM, Z4, CTX) - base) / scale < 1e-9

    def test_eigen_relation_b2(self):
        """S2(x) Psi = B2(x) Psi at random (x, lam)."""
        sol = fixture_solution()
        F = psi_triple(sol)
        rng = np.random.default_rng(13)
        for _ in range(10):
            x = complex(rng.uniform(0.05, 0.95), rng.uniform(-0.4, 0.4))
            lam = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3))
            v = F(lam)[0]
            out = s2_via_kzb(x, F, lam, Z4, CTX)
            err = np.linalg.norm(out - fundamental_b2(x, sol) * v)
            assert err / np.linalg.norm(v) < 1e-8

    def test_commuting_family(self):
        """[S2(u), S2(v)] = 0, measured relative to the operator output norm
        (the finite-difference floor sits near 2e-7 relative to |F| but the
        outputs carry B2-sized coefficients ~74 |F| at this fixture)."""
        sp = zero_weight_space(4)
        F = random_test_function(sp)
        u, v = 0.37 + 0.21j, 0.71 - 0.13j
        gu = lambda l: s2_via_kzb(u, F, l, Z4, CTX)
        gv = lambda l: s2_via_kzb(v, F, l, Z4, CTX)
        comm = (s2_via_kzb(u, fd_triple(gv, 5e-4), LAM, Z4, CTX)
                - s2_via_kzb(v, fd_triple(gu, 5e-4), LAM, Z4, CTX))
        scale = max(np.linalg.norm(gu(LAM)), np.linalg.norm(gv(LAM)))
        assert np.linalg.norm(comm) / scale < 1e-7


class TestFundamentalB2:
    def test_double_periodicity(self):
        sol = fixture_solution()
        x = 0.29 + 0.14j
        base = fundamental_b2(x, sol)
        assert abs(fundamental_b2(x + 1, sol) - base) < 1e-9 * max(1, abs(base))
        assert abs(fundamental_b2(x + CTX.tau, sol) - base) < 1e-9 * max(1, abs(base))

    def test_kernel_membership(self):
        """(d^2/dx^2 + B2) u_i = 0 for u_1 = f/sqrt(Wr), u_2 = g/sqrt(Wr),
        checked in log-derivative form v' + v^2 + B2 = 0 with
        v = (ln u_i)' = p'/p - (1/2) Wr'/Wr, p in {f, g}."""
        sol = fixture_solution()
        par = analytic_involution(sol)
        f, g = sol.poly(), par.poly()
        wr = wronskian(f, g)
        rng = np.random.default_rng(21)
        for _ in range(10):
            x = complex(rng.uniform(0.05, 0.95), rng.uniform(-0.35, 0.35))
            b2 = fundamental_b2(x, sol)
            wd = wr.derivs(x, 2)
            for p in (f, g):
                pd = p.derivs(x, 2)
                v = pd[1] / pd[0] - 0.5 * wd[1] / wd[0]
                vp = (pd[2] / pd[0] - (pd[1] / pd[0]) ** 2
                      - 0.5 * (wd[2] / wd[0] - (wd[1] / wd[0]) ** 2))
                assert abs(vp + v * v + b2) / max(1.0, abs(b2)) < 1e-8

    def test_partner_shares_b2(self):
        sol = fixture_solution()
        par = analytic_involution(sol)
        for x in (0.37 + 0.21j, 0.64 - 0.11j):
            assert abs(fundamental_b2(x, sol) - fundamental_b2(x, par)) < 1e-9


class TestWeylInvolution:
    def test_involutive(self):
        sp = zero_weight_space(4)
        rng = np.random.default_rng(1)
        v = rng.standard_normal(sp.dim) + 1j * rng.standard_normal(sp.dim)
        assert np.array_equal(weyl_involution(weyl_involution(v, sp), sp), v)

    def test_maps_to_complement(self):
        sp = zero_weight_space(4)
        v = np.zeros(sp.dim, dtype=complex)
        v[sp.index((0, 1))] = 1.0
        out = weyl_involution(v, sp)
        assert out[sp.index((2, 3))] != 0.0
        assert np.count_nonzero(out) == 1

    def test_weyl_equals_analytic(self):
        """s(Psi(., mu, t)) is proportional to Psi(., -mu, s) with a constant
        componentwise ratio across lambda samples and basis indices."""
        sol = fixture_solution()
        par = analytic_involution(sol)
        sp = zero_weight_space(4)
        lifted = weyl_on_function(psi_triple(sol), sp)
        rng = np.random.default_rng(11)
        ratios = []
        for _ in range(10):
            lam = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3))
            ratios.append(lifted(lam)[0] / psi(lam, par))
        arr = np.array(ratios)
        mean = arr.mean()
        assert np.max(np.abs(arr - mean)) < 1e-8 * abs(mean)

    def test_weyl_on_function_derivatives(self):
        """The transformed triple matches finite differences of the
        transformed value."""
        sp = zero_weight_space(4)
        F = psi_triple(fixture_solution())
        G = weyl_on_function(F, sp)
        val, d1, d2 = G(LAM)
        h = 1e-6
        fd1 = (G(LAM + h)[0] - G(LAM - h)[0]) / (2 * h)
        assert np.max(np.abs(d1 - fd1)) / np.linalg.norm(d1) < 1e-7
        h = 1e-5
        fd2 = (G(LAM + h)[0] - 2 * val + G(LAM - h)[0]) / h ** 2
        assert np.max(np.abs(d2 - fd2)) / np.linalg.norm(d2) < 1e-7
