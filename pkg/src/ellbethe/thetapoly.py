"""Theta polynomials and the linear-algebra side of the Wronski map.

A theta polynomial of degree m is an entire function

    f(x) = c * e^{2 pi i mu x} * prod_{j=1}^{m} theta(x - t_j)

determined by its scale c, label mu and root multiset {t_j}.  It transforms as

    f(x + 1)   = A (-1)^m f(x),            A = e^{2 pi i mu},
    f(x + tau) = B (-1)^m e^{-pi i m tau - 2 pi i m x} f(x),
                                           B = e^{2 pi i mu tau + 2 pi i sum t_j},

and conversely every entire function with these two transformation laws is a
theta polynomial of degree m; the space T_{m,A,B} of such functions has
dimension m, with an explicit Fourier basis constructed below.

`solve_wronskian` inverts the Wronskian pairing: given f and a target h of
degree 2m with compatible multipliers, it finds the theta polynomial g with
f g' - f' g = h by collocation in the Fourier basis, provided h/f^2 has no
residues at the roots of f (the solvability obstruction).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import Torus, lattice_distance, theta, theta_derivs

TWOPI_I = 2j * math.pi

# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


class SolveError(Exception):
    """Wronskian inversion failed; `code` is a stable machine-readable tag."""

    code = "solve_error"


class ResidueViolationError(SolveError):
    """h/f^2 has a nonzero residue at a root of f: no entire solution exists."""

    code = "residue_violation"


class DegenerateMultipliersError(SolveError):
    """Target multipliers coincide with f's own: solution not unique."""

    code = "degenerate_multipliers"


class MultipleRootError(SolveError):
    """f has a (near-)multiple root; the residue test is unreliable there."""

    code = "multiple_root"


# ---------------------------------------------------------------------------
# theta polynomials
# ---------------------------------------------------------------------------


def _leibniz(a: list[complex], b: list[complex]) -> list[complex]:
    """Derivative stack of a product from the stacks of the factors."""
    n = min(len(a), len(b))
    return [sum(math.comb(r, j) * a[j] * b[r - j] for j in range(r + 1))
            for r in range(n)]


@dataclass(frozen=True)
class ThetaPoly:
    """c * e^{2 pi i mu x} * prod theta(x - t_j) on a fixed torus."""

    scale: complex
    mu: complex
    roots: tuple
    ctx: Torus

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))
        object.__setattr__(self, "mu", complex(self.mu))
        object.__setattr__(self, "roots", tuple(complex(t) for t in self.roots))

    @property
    def degree(self) -> int:
        return len(self.roots)

    @property
    def multipliers(self) -> tuple[complex, complex]:
        """(A, B) in the transformation laws above."""
        a = cmath.exp(TWOPI_I * self.mu)
        b = cmath.exp(TWOPI_I * self.mu * self.ctx.tau + TWOPI_I * sum(self.roots))
        return a, b

    def eval(self, x: complex) -> complex:
        val = self.scale * cmath.exp(TWOPI_I * self.mu * x)
        for t in self.roots:
            val *= theta(x - t, self.ctx)
        return val

    __call__ = eval

    def derivs(self, x: complex, order: int = 3) -> list[complex]:
        """[f, f', ..., f^(order)](x) by Leibniz over the factors."""
        e0 = self.scale * cmath.exp(TWOPI_I * self.mu * x)
        stack = [((TWOPI_I * self.mu) ** r) * e0 for r in range(order + 1)]
        for t in self.roots:
            stack = _leibniz(stack, theta_derivs(x - t, self.ctx, order))
        return stack


@dataclass(frozen=True)
class FundamentalParallelogram:
    """Half-open cell base + [0,1) + [0,1) tau."""

    base: complex
    ctx: Torus

    def coords(self, x: complex) -> tuple[float, float]:
        """Real coordinates (a, b) with x = base + a + b tau."""
        d = complex(x) - self.base
        b = d.imag / self.ctx.tau.imag
        a = d.real - b * self.ctx.tau.real
        return a, b

    def contains(self, x: complex) -> bool:
        a, b = self.coords(x)
        return 0.0 <= a < 1.0 and 0.0 <= b < 1.0

    def reduce(self, x: complex) -> tuple[complex, tuple[int, int]]:
        """x = reduced + k + l tau with reduced in the cell; returns (reduced, (k, l))."""
        a, b = self.coords(x)
        k, l = math.floor(a), math.floor(b)
        return complex(x) - k - l * self.ctx.tau, (k, l)


def canonical_coords(poly: ThetaPoly, cell: FundamentalParallelogram) -> ThetaPoly:
    """Equivalent theta polynomial with all roots reduced into the cell.

    Moving a root by -(k + l tau) multiplies each factor by
    (-1)^{k+l} e^{-pi i l^2 tau - 2 pi i l (x - t')} (t' the reduced root), so
    the label picks up sum l_j and the scale absorbs the constants; values are
    unchanged.  Roots are sorted by cell coordinates for a unique normal form.
    """
    new_roots = []
    mu = poly.mu
    scale = poly.scale
    for t in poly.roots:
        t2, (k, l) = cell.reduce(t)
        new_roots.append(t2)
        mu += l
        sign = -1.0 if (k + l) % 2 else 1.0
        scale *= sign * cmath.exp(-1j * math.pi * l * l * poly.ctx.tau - TWOPI_I * l * t2)
    new_roots.sort(key=lambda t: cell.coords(t))
    return ThetaPoly(scale, mu, tuple(new_roots), poly.ctx)


# ---------------------------------------------------------------------------
# Wronskian
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Wronskian:
    """Wr(f, g) = f g' - f' g, itself of theta-polynomial type.

    For deg f = deg g = m the Wronskian transforms with degree 2m and
    multipliers (A_f A_g, B_f B_g).
    """

    f: ThetaPoly
    g: ThetaPoly

    @property
    def degree(self) -> int:
        return self.f.degree + self.g.degree

    @property
    def multipliers(self) -> tuple[complex, complex]:
        af, bf = self.f.multipliers
        ag, bg = self.g.multipliers
        return af * ag, bf * bg

    def eval(self, x: complex) -> complex:
        df = self.f.derivs(x, 1)
        dg = self.g.derivs(x, 1)
        return df[0] * dg[1] - df[1] * dg[0]

    __call__ = eval

    def derivs(self, x: complex, order: int = 2) -> list[complex]:
        """[Wr, Wr', Wr''](x); Wr' = f g'' - f'' g, Wr'' = f g''' + f' g'' - f'' g' - f''' g."""
        if order > 2:
            raise ValueError("Wronskian derivatives available up to order 2")
        df = self.f.derivs(x, order + 1)
        dg = self.g.derivs(x, order + 1)
        out = [df[0] * dg[1] - df[1] * dg[0]]
        if order >= 1:
            out.append(df[0] * dg[2] - df[2] * dg[0])
        if order >= 2:
            out.append(df[0] * dg[3] + df[1] * dg[2] - df[2] * dg[1] - df[3] * dg[0])
        return out


def wronskian(f: ThetaPoly, g: ThetaPoly) -> Wronskian:
    if f.ctx.tau != g.ctx.tau:
        raise ValueError("Wronskian factors must share a torus")
    return Wronskian(f, g)


# ---------------------------------------------------------------------------
# Fourier basis of T_{m, A, B}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierTheta:
    """Finite Fourier sum e^{2 pi i nu0 x} * sum_n a_n e^{2 pi i n x}.

    The common envelope e^{2 pi i nu0 x} is kept factored out so that large
    imaginary labels do not overflow the per-term coefficients.
    """

    nu0: complex
    offsets: np.ndarray  # integer n
    coeffs: np.ndarray   # a_n

    def eval_many(self, xs: np.ndarray, order: int = 0) -> np.ndarray:
        xs = np.asarray(xs, dtype=complex)
        phases = np.exp(TWOPI_I * np.outer(xs, self.offsets))
        weights = self.coeffs * (TWOPI_I * (self.nu0 + self.offsets)) ** order
        return np.exp(TWOPI_I * self.nu0 * xs) * (phases @ weights)

    def eval(self, x: complex, order: int = 0) -> complex:
        return complex(self.eval_many(np.array([x]), order)[0])

    __call__ = eval


def fourier_basis(m: int, a_mult: complex, b_mult: complex, ctx: Torus) -> list[FourierTheta]:
    """Basis of the m-dimensional space T_{m, A, B}.

    Writing f = sum a_nu e^{2 pi i nu x}, the x+1 law forces nu in nu0 + Z with
    e^{2 pi i nu0} = A (-1)^m, and the x+tau law gives the m-step recursion
    a_{nu+m} = a_nu e^{2 pi i nu tau} e^{pi i m tau} (-1)^m / B.  Seeding
    a_{nu0+r} = 1 for r = 1..m yields m independent solutions with
    superexponentially decaying tails in both directions.
    """
    if m < 1:
        raise ValueError("m must be positive")
    tau = ctx.tau
    nu0 = cmath.log(a_mult * (-1) ** m) / TWOPI_I
    # log C with C = e^{2 pi i nu0 tau} (-1)^m q^{m/2} / B, all in log space
    log_c = (TWOPI_I * nu0 * tau + 1j * math.pi * m + 1j * math.pi * m * tau
             - cmath.log(b_mult))
    basis = []
    jmax = 40
    for r in range(1, m + 1):
        js = np.arange(-jmax, jmax + 1)
        # log a_{r+jm} = j log C + 2 pi i tau (r j + m j (j-1)/2)
        loga = js * log_c + TWOPI_I * tau * (r * js + m * js * (js - 1) / 2.0)
        # keep terms that can matter anywhere within ~1.5 cells of the origin
        n = r + js * m
        weight = loga.real + 2.0 * math.pi * np.abs(n) * 1.5 * tau.imag
        keep = weight >= weight.max() - 55.0
        coeffs = np.exp(loga[keep])
        if not np.all(np.isfinite(coeffs)):
            raise OverflowError("Fourier coefficients overflow for these multipliers")
        basis.append(FourierTheta(nu0, n[keep].astype(float), coeffs))
    return basis


# ---------------------------------------------------------------------------
# Wronskian inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveResult:
    """Outcome of solve_wronskian: the partner g plus diagnostics."""

    g: ThetaPoly
    residual: float
    condition: float
    coefficients: tuple = field(repr=False, default=())


def _golden_points(cell: FundamentalParallelogram, count: int, skip: int = 0) -> list[complex]:
    """Deterministic low-discrepancy points inside the cell."""
    g1 = (math.sqrt(5.0) - 1.0) / 2.0
    g2 = math.sqrt(2.0) - 1.0
    pts = []
    for i in range(skip, skip + count):
        a = (0.5 + (i + 1) * g1) % 1.0
        b = (0.5 + (i + 1) * g2) % 1.0
        pts.append(cell.base + a + b * cell.ctx.tau)
    return pts


def _residues_over_f_squared(f: ThetaPoly, h, nodes: int = 64) -> list[complex]:
    """Residues of h/f^2 at each root of f, by a small trapezoid circle."""
    seps = [1.0]
    roots = f.roots
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            seps.append(abs(roots[i] - roots[j]) / 2.0)
    radius = min(1e-2, min(seps))
    out = []
    for t in roots:
        acc = 0j
        scale = 0.0
        for k in range(nodes):
            w = cmath.exp(2j * math.pi * k / nodes)
            x = t + radius * w
            val = h.eval(x) / f.eval(x) ** 2
            acc += w * val
            scale = max(scale, abs(val))
        out.append((radius / nodes) * acc)
        out[-1] = (out[-1], max(1.0, scale * radius))  # (residue, local scale)
    return out


def solve_wronskian(f: ThetaPoly, h, cell: FundamentalParallelogram | None = None) -> SolveResult:
    """Find g with f g' - f' g = h, as a theta polynomial.

    Parameters
    ----------
    f : ThetaPoly
        Known factor, degree m.
    h : ThetaPoly or Wronskian
        Target, degree 2m; anything with eval/degree/multipliers works.
    cell : FundamentalParallelogram, optional
        Cell used for collocation points and root normalization; defaults to
        the cell based at -(1 + tau)/2 (centered at the origin).

    Raises
    ------
    MultipleRootError, DegenerateMultipliersError, ResidueViolationError
        Structural obstructions, detected before collocation.
    SolveError
        Verification of the computed g failed (should not happen for
        well-posed inputs).
    """
    ctx = f.ctx
    m = f.degree
    if h.degree != 2 * m:
        raise ValueError("target degree must be twice deg f (got %d vs %d)" % (h.degree, f.degree))
    if cell is None:
        cell = FundamentalParallelogram(-(1.0 + ctx.tau) / 2.0, ctx)

    # structural guards
    for i in range(m):
        for j in range(i + 1, m):
            if lattice_distance(f.roots[i] - f.roots[j], ctx) < 1e-8:
                raise MultipleRootError("roots %d and %d of f coincide" % (i, j))
    af, bf = f.multipliers
    ah, bh = h.multipliers
    a2, b2 = ah / af, bh / bf
    if (abs(a2 - af) <= 1e-10 * max(1.0, abs(af)) and
            abs(b2 - bf) <= 1e-10 * max(1.0, abs(bf))):
        raise DegenerateMultipliersError("target multipliers equal f's own")
    for (res, scale) in _residues_over_f_squared(f, h):
        if abs(res) > 1e-8 * scale:
            raise ResidueViolationError("residue %.3e at a root of f" % abs(res))

    # collocation in the Fourier basis of T_{m, A2, B2}
    basis = fourier_basis(m, a2, b2, ctx)
    xs = np.array(_golden_points(cell, 4 * m))
    bval = np.column_stack([b.eval_many(xs, 0) for b in basis])
    bder = np.column_stack([b.eval_many(xs, 1) for b in basis])
    fval = np.array([f.derivs(x, 1) for x in xs])
    mat = fval[:, [0]] * bder - fval[:, [1]] * bval
    rhs = np.array([h.eval(x) for x in xs])
    coef, _, _, sv = np.linalg.lstsq(mat, rhs, rcond=None)
    condition = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf

    def g_hat(x, order=0):
        return sum(c * b.eval(x, order) for c, b in zip(coef, basis))

    # verify on fresh points
    ys = np.array(_golden_points(cell, 4 * m + 2, skip=4 * m))
    hs = np.array([h.eval(y) for y in ys])
    scale = max(1.0, float(np.max(np.abs(hs))))
    residual = 0.0
    for y, hv in zip(ys, hs):
        df = f.derivs(y, 1)
        wr = df[0] * g_hat(y, 1) - df[1] * g_hat(y, 0)
        residual = max(residual, abs(wr - hv) / scale)
    if residual > 1e-9:
        raise SolveError("collocation residual %.3e exceeds 1e-9" % residual)

    g = _to_theta_poly(basis, coef, m, a2, b2, cell)
    # definitive consistency check: the reconstructed theta polynomial must
    # reproduce the collocation solution (catches missed/spurious roots)
    for y in ys[:5]:
        gv = g_hat(y)
        if abs(g.eval(y) - gv) > 1e-8 * max(1.0, abs(gv)):
            raise SolveError("root/label reconstruction does not match solution")
    return SolveResult(g, residual, condition, tuple(coef))


def _to_theta_poly(basis, coef, m, a2, b2, cell) -> ThetaPoly:
    """Convert sum_k coef_k basis_k into scale/label/roots form."""
    ctx = cell.ctx
    tau = ctx.tau
    # combined integer-offset coefficients
    all_n = sorted({int(n) for b in basis for n in b.offsets})
    index = {n: i for i, n in enumerate(all_n)}
    ctilde = np.zeros(len(all_n), dtype=complex)
    for c, b in zip(coef, basis):
        for n, a in zip(b.offsets, b.coeffs):
            ctilde[index[int(n)]] += c * a
    # trim tails too small to influence roots near the cell, then read the
    # remaining Fourier sum as a polynomial in z = e^{2 pi i x}
    mag = np.abs(ctilde)
    big = mag > 1e-14 * mag.max()
    lo, hi = int(np.argmax(big)), len(big) - 1 - int(np.argmax(big[::-1]))
    poly = ctilde[lo:hi + 1][::-1]  # np.roots wants highest degree first
    zroots = np.roots(poly)

    def g_fun(x, order=0):
        return sum(c * b.eval(x, order) for c, b in zip(coef, basis))

    # z only sees x mod 1: translate each candidate into the cell's tau-row,
    # polish with Newton on the actual Fourier sum, then reduce and dedup
    cand = []
    for z in zroots:
        if z == 0:
            continue
        x = cmath.log(z) / TWOPI_I
        x -= round((x - cell.base).imag / tau.imag - 0.5) * tau
        cand.append(x)
    roots = []
    for x in cand:
        step = math.inf
        for _ in range(8):
            v = g_fun(x, 0)
            d = g_fun(x, 1)
            if d == 0:
                break
            step = v / d
            x = x - step
            if abs(step) < 1e-13:
                break
        if abs(step) > 1e-9:
            continue
        x, _ = cell.reduce(x)
        if any(lattice_distance(x - r, ctx) < 1e-6 for r in roots):
            continue
        roots.append(x)
    if len(roots) != m:
        raise SolveError("expected %d roots in the cell, found %d" % (m, len(roots)))
    roots.sort(key=lambda t: cell.coords(t))

    # label: e^{2 pi i L} = A2 fixes L mod 1; |B2 e^{-2 pi i L0 tau - 2 pi i sum roots}|
    # = e^{2 pi k Im tau} fixes the integer part
    l0 = cmath.log(a2) / TWOPI_I
    w = b2 * cmath.exp(-TWOPI_I * l0 * tau - TWOPI_I * sum(roots))
    k = round(-math.log(abs(w)) / (2.0 * math.pi * tau.imag))
    label = l0 + k
    if abs(w * cmath.exp(-TWOPI_I * k * tau) - 1.0) > 1e-6:
        raise SolveError("multipliers inconsistent with recovered roots")

    # scale: match values at the best-conditioned probe point
    probe, best, ref_best = None, -1.0, 1.0
    for x in _golden_points(cell, 7, skip=13):
        ref = cmath.exp(TWOPI_I * label * x)
        for t in roots:
            ref *= theta(x - t, ctx)
        if abs(ref) > best:
            probe, best, ref_best = x, abs(ref), ref
    scale = g_fun(probe) / ref_best
    return ThetaPoly(scale, label, tuple(roots), ctx)
