"""Desk-scale numerics for the dynamical elliptic Bethe algebra of sl2.

Layers, bottom to top:

- `elliptic`: normalized theta function and the quasi-periodic kernels
  (rho, sigma, phi, eta) on a torus context.
- `thetapoly`: theta-polynomials, their Wronskian, canonical coordinates,
  and the Wronskian-equation solver.
- `bethe`: elliptic Bethe-ansatz problems, the Newton solver, lattice
  moves, and the analytic involution.
- `repspace`: the zero weight space, the Bethe eigenfunction Psi, the KZB
  operators, the S2 routes, B2, and the Weyl involution.
- `wronski`: fiber enumeration of the elliptic Wronski map with pointwise
  Wronskian certificates and threshold scans.
- `cli`: the `ellbethe` command (identities | solve | fiber | eigen).
"""

from .bethe import (
    BetheProblem,
    BetheSolution,
    CoalescedRootsError,
    InvolutionMismatchError,
    SeedTooCoarseError,
    analytic_involution,
    bae_jacobian,
    bae_residual,
    normalize_solution,
    seed_asymptotic,
    solve_bae,
    translate_root,
    wronskian_residues,
)
from .elliptic import (
    LatticePoint,
    PoleError,
    RangeError,
    Torus,
    eta,
    lattice_distance,
    phi,
    reduce_argument,
    rho,
    rho_prime,
    rho_second,
    sigma,
    sigma_dw,
    sigma_dw2,
    theta,
    theta1,
    theta1_derivs,
    theta1_dtau,
    theta_derivs,
    theta_dtau,
)
from .repspace import (
    KzbEigenvalues,
    ZeroWeightSpace,
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
from .thetapoly import (
    DegenerateMultipliersError,
    FundamentalParallelogram,
    MultipleRootError,
    ResidueViolationError,
    SolveError,
    ThetaPoly,
    Wronskian,
    canonical_coords,
    fourier_basis,
    solve_wronskian,
    wronskian,
)
from .wronski import (
    FiberPoint,
    FiberReport,
    IncompleteFiberError,
    asymptotic_deviation,
    count_ratios,
    enumerate_fiber,
    estimate_mu_min,
    partner_asymptotic_deviation,
    wr_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "BetheProblem",
    "BetheSolution",
    "CoalescedRootsError",
    "DegenerateMultipliersError",
    "FiberPoint",
    "FiberReport",
    "FundamentalParallelogram",
    "IncompleteFiberError",
    "InvolutionMismatchError",
    "KzbEigenvalues",
    "LatticePoint",
    "MultipleRootError",
    "PoleError",
    "RangeError",
    "ResidueViolationError",
    "SeedTooCoarseError",
    "SolveError",
    "ThetaPoly",
    "Torus",
    "Wronskian",
    "ZeroWeightSpace",
    "analytic_involution",
    "apply_kzb",
    "apply_rst_n2",
    "asymptotic_deviation",
    "bae_jacobian",
    "bae_residual",
    "canonical_coords",
    "count_ratios",
    "enumerate_fiber",
    "estimate_mu_min",
    "eta",
    "fourier_basis",
    "fundamental_b2",
    "kzb_eigenvalues",
    "lattice_distance",
    "normalize_solution",
    "partner_asymptotic_deviation",
    "phi",
    "psi",
    "psi_derivs",
    "psi_triple",
    "reduce_argument",
    "rho",
    "rho_prime",
    "rho_second",
    "rst_s1_residual",
    "s2_via_kzb",
    "seed_asymptotic",
    "sigma",
    "sigma_dw",
    "sigma_dw2",
    "solve_bae",
    "solve_wronskian",
    "theta",
    "theta1",
    "theta1_derivs",
    "theta1_dtau",
    "theta_derivs",
    "theta_dtau",
    "translate_root",
    "weyl_involution",
    "weyl_on_function",
    "wr_certificate",
    "wronskian",
    "wronskian_residues",
    "zero_weight_space",
]
