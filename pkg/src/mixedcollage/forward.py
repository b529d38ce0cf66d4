"""Galerkin solve of the discrete perturbed mixed problem and error study.

The solution pair (w_m, psi_m) lives in the span of G0_1..G0_m.  Error
norms against the manufactured exact pair are computed with composite
Gauss panels aligned to every basis breakpoint, so the only numerical
error is the (tiny) quadrature remainder of the smooth exact fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .assembly import (FormCoefficients, SaddleSystem, assemble_system,
                       build_block, sigma_pairs)
from .basis import g0_values, haar_values, merged_breakpoints
from .polynomials import TensorPolynomial, laplacian, manufactured_f, reference_psi0
from .quadrature import composite_nodes

__all__ = [
    "MixedSolution",
    "ErrorReport",
    "BasisExpansion",
    "solve_forward",
    "block_residual",
    "error_norms",
    "convergence_table",
]

ERROR_QUAD_POINTS = 6


@dataclass
class MixedSolution:
    """Coefficient vectors of (w_m, psi_m) in the flat G0 ordering."""

    w_coeffs: np.ndarray
    psi_coeffs: np.ndarray
    m: int

    @property
    def w(self) -> "BasisExpansion":
        return BasisExpansion(self.w_coeffs)

    @property
    def psi(self) -> "BasisExpansion":
        return BasisExpansion(self.psi_coeffs)


@dataclass(frozen=True)
class ErrorReport:
    """L^2 and H^1_0 (Dirichlet seminorm) errors against the exact pair."""

    m: int
    psi_l2: float
    psi_h10: float
    w_l2: float
    w_h10: float

    def as_tuple(self):
        return (self.psi_l2, self.psi_h10, self.w_l2, self.w_h10)


class BasisExpansion:
    """Field sum_n coeffs[n] G0_{n+1}, evaluable on tensor grids.

    The flat coefficients are folded into a (m1d, m1d) matrix via the
    sigma pairing so that values on a grid are two matrix products.
    """

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        m = len(coeffs)
        pairs = sigma_pairs(m) if m else np.zeros((0, 2), dtype=int)
        m1d = int(pairs.max()) if m else 1
        C = np.zeros((m1d, m1d))
        for n in range(m):
            C[pairs[n, 0] - 1, pairs[n, 1] - 1] = coeffs[n]
        self.coeffs = coeffs
        self.coeff_matrix = C
        self.m1d = m1d

    def _value_table(self, ts) -> np.ndarray:
        return np.vstack([g0_values(k, ts) for k in range(1, self.m1d + 1)])

    def _deriv_table(self, ts) -> np.ndarray:
        return np.vstack([haar_values(k + 1, ts) for k in range(1, self.m1d + 1)])

    def eval_grid(self, xs, ys) -> np.ndarray:
        Vx = self._value_table(xs)
        Vy = self._value_table(ys)
        return Vx.T @ self.coeff_matrix @ Vy

    def grad_grid(self, xs, ys):
        Vx, Vy = self._value_table(xs), self._value_table(ys)
        Dx, Dy = self._deriv_table(xs), self._deriv_table(ys)
        return Dx.T @ self.coeff_matrix @ Vy, Vx.T @ self.coeff_matrix @ Dy

    def __call__(self, x, y):
        return float(self.eval_grid(np.atleast_1d(x), np.atleast_1d(y))[0, 0])


def solve_forward(m: int, coeffs: FormCoefficients,
                  f: TensorPolynomial) -> MixedSolution:
    """Unique Galerkin solution of the discrete perturbed system."""
    system = assemble_system(m, coeffs, f)
    return solve_system(system)


def solve_system(system: SaddleSystem) -> MixedSolution:
    block, rhs = build_block(system)
    z = linalg.solve_dense(block, rhs)
    return MixedSolution(w_coeffs=z[: system.m], psi_coeffs=z[system.m:],
                         m=system.m)


def block_residual(system: SaddleSystem, sol: MixedSolution) -> float:
    """Relative residual of the stacked block system."""
    block, rhs = build_block(system)
    z = np.concatenate([sol.w_coeffs, sol.psi_coeffs])
    denom = np.linalg.norm(block, np.inf) * np.linalg.norm(z, np.inf) \
        + np.linalg.norm(rhs, np.inf)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(block @ z - rhs, np.inf) / denom)


def _quad_grid(m1d: int, npoints: int, refine: int = 1):
    panels = merged_breakpoints(m1d)
    if refine > 1:
        fine = []
        for a, b in zip(panels[:-1], panels[1:]):
            fine.extend(np.linspace(a, b, refine + 1)[:-1])
        fine.append(panels[-1])
        panels = np.array(fine)
    return composite_nodes(panels, npoints)


def error_norms(sol: MixedSolution, psi0, w0,
                npoints: int = ERROR_QUAD_POINTS, refine: int = 1) -> ErrorReport:
    """Errors of (w_m, psi_m) against exact fields exposing eval_grid/grad_grid."""
    psi_m, w_m = sol.psi, sol.w
    nodes, weights = _quad_grid(max(psi_m.m1d, w_m.m1d), npoints, refine)
    W2 = np.outer(weights, weights)

    def pair_norms(approx, exact):
        diff = approx.eval_grid(nodes, nodes) - exact.eval_grid(nodes, nodes)
        l2 = np.sqrt(max(np.sum(W2 * diff**2), 0.0))
        adx, ady = approx.grad_grid(nodes, nodes)
        edx, edy = exact.grad_grid(nodes, nodes)
        h10 = np.sqrt(max(np.sum(W2 * ((adx - edx) ** 2 + (ady - edy) ** 2)), 0.0))
        return float(l2), float(h10)

    psi_l2, psi_h10 = pair_norms(psi_m, psi0)
    w_l2, w_h10 = pair_norms(w_m, w0)
    return ErrorReport(m=sol.m, psi_l2=psi_l2, psi_h10=psi_h10,
                       w_l2=w_l2, w_h10=w_h10)


def convergence_table(m_list, delta: float):
    """One ErrorReport per m for the fixed manufactured problem."""
    if not m_list:
        raise ValueError("m_list must be nonempty")
    psi0 = reference_psi0()
    w0 = -laplacian(psi0)
    f = manufactured_f(psi0, delta)
    coeffs = FormCoefficients(c1=1.0, c2=1.0, c3=delta)
    return [error_norms(solve_forward(m, coeffs, f), psi0, w0) for m in m_list]
