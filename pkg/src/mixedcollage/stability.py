"""Discrete stability constants and the generalized collage inequality.

All norms live in the H^1_0 geometry: matrices are whitened with the
Cholesky factor of the basis Gram before singular values are taken, so
alpha, beta and the form norms are genuine operator norms on the
discrete spaces.  The perturbation condition ||c|| < 1/rho then yields
the computable collage factor rho / (1 - rho ||c||).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .assembly import SaddleSystem, stiff_2d
from .forward import MixedSolution
from .linalg import NotSPDError, cholesky_lower, smallest_singular_value

__all__ = [
    "StabilityReport",
    "CollageCheck",
    "ConditionViolatedError",
    "compute_constants",
    "collage_check",
    "default_grams",
    "family_constants",
]

KERNEL_RTOL = 1e-10


class ConditionViolatedError(RuntimeError):
    """The perturbation condition ||c|| < 1/rho does not hold."""


@dataclass(frozen=True)
class StabilityReport:
    """Discrete constants of one member of the bilinear-form family."""

    alpha: float
    beta: float
    norm_a: float
    norm_c: float
    rho: float
    condition_ok: bool
    collage_factor: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "normA": self.norm_a,
            "normC": self.norm_c,
            "rho": self.rho,
            "conditionOK": self.condition_ok,
            "collageFactor": self.collage_factor,
        }

    def to_json(self, **kwargs) -> str:
        # strict JSON has no Infinity literal; spell non-finite values out
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            return v

        return json.dumps({k: clean(v) for k, v in self.to_dict().items()},
                          **kwargs)


@dataclass(frozen=True)
class CollageCheck:
    """One evaluation of the stability bound for a guessed pair."""

    lhs: float
    rhs: float
    satisfied: bool


def default_grams(m: int):
    """H^1_0 Grams of E_m and F_m (both the exact Dirichlet Gram)."""
    S2 = stiff_2d(m)
    return S2, S2


def _whiten(L: np.ndarray, M: np.ndarray, R: np.ndarray) -> np.ndarray:
    """L^{-1} M R^{-T} for lower-triangular Cholesky factors L, R."""
    tmp = scipy.linalg.solve_triangular(L, M, lower=True, check_finite=False)
    return scipy.linalg.solve_triangular(R, tmp.T, lower=True,
                                         check_finite=False).T


def compute_constants(system: SaddleSystem, gram_e, gram_f) -> StabilityReport:
    """Stability constants alpha, beta, ||a||, ||c||, rho of one system.

    beta is the smallest singular value of the Gram-whitened b-matrix;
    alpha is the smallest singular value of the whitened a-matrix
    projected to the kernel of b (with the convention alpha = +inf,
    hence 1/alpha = 0, when the kernel is trivial).
    """
    LE = cholesky_lower(gram_e)
    LF = cholesky_lower(gram_f)
    # B[i, j] = b(e_j, f_i): whiten rows with the F Gram, columns with E
    B_w = _whiten(LF, system.B, LE)
    A_w = _whiten(LE, system.A, LE)
    C_w = _whiten(LF, system.C, LF)

    svals = np.linalg.svd(B_w, compute_uv=False)
    beta = float(svals[-1]) if svals.size else 0.0
    norm_a = float(np.linalg.svd(A_w, compute_uv=False)[0]) if A_w.size else 0.0
    norm_c = float(np.linalg.svd(C_w, compute_uv=False)[0]) if C_w.size else 0.0

    _, s, Vt = np.linalg.svd(B_w)
    cut = KERNEL_RTOL * (s[0] if s.size else 0.0)
    kernel = Vt[s <= cut].T if s.size else np.eye(B_w.shape[1])
    if kernel.shape[1] == 0:
        alpha = math.inf
    else:
        alpha = smallest_singular_value(kernel.T @ A_w @ kernel)

    inv_alpha = 0.0 if math.isinf(alpha) else 1.0 / alpha
    if beta <= 0.0:
        rho = math.inf
    else:
        grow = 1.0 + norm_a * inv_alpha
        rho = max(inv_alpha, grow / beta, norm_a * grow / beta**2)

    condition_ok = norm_c < 1.0 / rho if rho > 0 else True
    factor = rho / (1.0 - rho * norm_c) if condition_ok else math.nan
    return StabilityReport(alpha=alpha, beta=beta, norm_a=norm_a,
                           norm_c=norm_c, rho=rho,
                           condition_ok=condition_ok, collage_factor=factor)


def _gram_norm(L: np.ndarray, v: np.ndarray) -> float:
    return float(np.linalg.norm(L.T @ v))


def _dual_norm(L: np.ndarray, r: np.ndarray) -> float:
    y = scipy.linalg.solve_triangular(L, r, lower=True, check_finite=False)
    return float(np.linalg.norm(y))


def collage_check(system: SaddleSystem, sol: MixedSolution, guess,
                  report: StabilityReport, gram_e=None, gram_f=None) -> CollageCheck:
    """Verify the stability bound for a guessed coefficient pair.

    lhs is the max of the Gram-weighted distances of the guess to the
    true discrete solution; rhs is the collage factor times the sum of
    the dual norms of the two residual functionals of the guess.
    """
    if not report.condition_ok:
        raise ConditionViolatedError("perturbation condition ||c|| < 1/rho fails")
    if gram_e is None or gram_f is None:
        ge, gf = default_grams(system.m)
        gram_e = ge if gram_e is None else gram_e
        gram_f = gf if gram_f is None else gram_f
    LE = cholesky_lower(gram_e)
    LF = cholesky_lower(gram_f)

    w_hat = np.asarray(guess[0], dtype=float)
    psi_hat = np.asarray(guess[1], dtype=float)
    lhs = max(_gram_norm(LE, sol.w_coeffs - w_hat),
              _gram_norm(LF, sol.psi_coeffs - psi_hat))

    r1 = system.load_x - system.A @ w_hat - system.B.T @ psi_hat
    r2 = system.load_y - system.B @ w_hat - system.C @ psi_hat
    rhs = report.collage_factor * (_dual_norm(LE, r1) + _dual_norm(LF, r2))
    return CollageCheck(lhs=lhs, rhs=rhs, satisfied=lhs <= rhs * (1.0 + 1e-9))


def family_constants(systems, gram_e, gram_f):
    """Constants for an enumerated family plus the worst-case summary.

    Diagnostic counterpart of the supremum over the parameter family:
    returns the per-member reports and a dict with sup rho, inf beta and
    the family-wide perturbation margin.
    """
    reports = [compute_constants(s, gram_e, gram_f) for s in systems]
    sup_rho = max(r.rho for r in reports)
    summary = {
        "supRho": sup_rho,
        "infAlpha": min(r.alpha for r in reports),
        "infBeta": min(r.beta for r in reports),
        "supNormC": max(r.norm_c for r in reports),
        "familyConditionOK": all(r.condition_ok for r in reports)
        and max(r.norm_c for r in reports) < 1.0 / sup_rho,
    }
    return reports, summary
