"""Solving the Wronskian equation Wr(f, g) = h for g.

A theta-polynomial of degree m lives in a finite-dimensional space pinned
down by its two quasi-periodicity multipliers, so the first-order ODE
Wr(f, g) = h becomes a small linear system in a Fourier-type basis.  The
demo builds a random pair, recovers g from (f, Wr(f, g)), and shows the
residue obstruction that rejects inadmissible right-hand sides.

Run: python3 demos/wronskian_inversion.py
"""

import numpy as np

from ellbethe import (
    FundamentalParallelogram,
    ResidueViolationError,
    ThetaPoly,
    Torus,
    solve_wronskian,
    wronskian,
)


def random_poly(rng, m, ctx, cell):
    roots = tuple(cell.base + rng.uniform(0.1, 0.9) + rng.uniform(0.1, 0.9) * ctx.tau
                  for _ in range(m))
    mu = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return ThetaPoly(complex(rng.normal(), rng.normal()), mu, roots, ctx)


def main():
    ctx = Torus(1j)
    cell = FundamentalParallelogram(-(1.0 + ctx.tau) / 2.0, ctx)
    rng = np.random.default_rng(42)

    print("-- round trip: g from (f, Wr(f, g)) --")
    for m in (1, 2, 3):
        f = random_poly(rng, m, ctx, cell)
        g = random_poly(rng, m, ctx, cell)
        h = wronskian(f, g)
        result = solve_wronskian(f, h, cell)
        x = 0.21 + 0.13j
        err = abs(result.g.eval(x) - g.eval(x)) / max(1.0, abs(g.eval(x)))
        print("m = %d: value error %.2e, reported residual %.2e, "
              "condition %.1e" % (m, err, result.residual, result.condition))

    print("\n-- the residue obstruction --")
    print("Wr(f, g)/f^2 must have zero residues at the roots of f; a")
    print("generic degree-2m target violates this and is rejected:")
    f = random_poly(rng, 2, ctx, cell)
    bad = random_poly(rng, 4, ctx, cell)
    try:
        solve_wronskian(f, bad, cell)
    except ResidueViolationError as exc:
        print("  rejected: %s" % exc)

    print("\n-- the large-|Im mu| regime used by the fiber computations --")
    f = random_poly(rng, 2, ctx, cell)
    f = ThetaPoly(1.0, 10j, f.roots, ctx)
    g = random_poly(rng, 2, ctx, cell)
    g = ThetaPoly(1.0, -10j, g.roots, ctx)
    result = solve_wronskian(f, wronskian(f, g), cell)
    x = 0.21 + 0.13j
    err = abs(result.g.eval(x) - g.eval(x)) / max(1.0, abs(g.eval(x)))
    print("labels +-10i: value error %.2e, condition %.1e"
          % (err, result.condition))


if __name__ == "__main__":
    main()
