"""Solver and estimator for perturbed mixed variational systems.

Three workflows on the unit square, all built around the same
saddle-point splitting of the perturbed fourth-order problem:

* forward: Galerkin solution of the coupled second-order system on an
  integrated-Haar basis, with an exact manufactured reference pair for
  convergence studies;
* stability: discrete inf-sup / coercivity constants, the perturbation
  condition, and a numerical check of the collage-type error bound;
* inverse: recovery of the bilinear-form coefficients from noisy
  sampled solutions by minimizing the collage distance.
"""

from .assembly import FormCoefficients, SaddleSystem, assemble_system
from .forward import (BasisExpansion, ErrorReport, MixedSolution,
                      convergence_table, error_norms, solve_forward)
from .inverse import (CollageCoefficientEstimator, CollageEstimate,
                      SampledField, TargetPair, collage_objective,
                      estimate_parameters, make_target, noise_sweep)
from .polynomials import (Polynomial1D, TensorPolynomial, laplacian,
                          manufactured_f, reference_psi0)
from .stability import (CollageCheck, StabilityReport, collage_check,
                        compute_constants, default_grams)

__version__ = "0.1.0"

__all__ = [
    "FormCoefficients",
    "SaddleSystem",
    "assemble_system",
    "BasisExpansion",
    "ErrorReport",
    "MixedSolution",
    "convergence_table",
    "error_norms",
    "solve_forward",
    "CollageCoefficientEstimator",
    "CollageEstimate",
    "SampledField",
    "TargetPair",
    "collage_objective",
    "estimate_parameters",
    "make_target",
    "noise_sweep",
    "Polynomial1D",
    "TensorPolynomial",
    "laplacian",
    "manufactured_f",
    "reference_psi0",
    "CollageCheck",
    "StabilityReport",
    "collage_check",
    "compute_constants",
    "default_grams",
    "__version__",
]
