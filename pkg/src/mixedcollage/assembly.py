"""Assembly of the discrete perturbed saddle-point system on [0,1]^2.

The bilinear forms of the coupled second-order splitting of the
perturbed biharmonic problem are

    a(w, v)   = C2 * int w v          (mass coupling)
    b(v, psi) = -C1 * int grad v . grad psi
    c(psi, phi) = -C3 * int psi phi   (perturbation)

with loads x*(v) = 0 and y*(phi) = -int f phi.  All Gram blocks are
exact tensor products of the 1D blocks; only the f-load uses quadrature.
The direct problem corresponds to (C1, C2, C3) = (1, 1, delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import g0_breakpoints, g0_values, inner_products_1d, sigma
from .polynomials import Polynomial1D, TensorPolynomial
from .quadrature import composite_nodes

__all__ = [
    "FormCoefficients",
    "SaddleSystem",
    "sigma_pairs",
    "mass_2d",
    "stiff_2d",
    "assemble_forms",
    "assemble_loads",
    "assemble_system",
    "build_block",
    "load_component_1d",
]

LOAD_QUAD_POINTS = 6


@dataclass(frozen=True)
class FormCoefficients:
    """Coefficients (C1, C2, C3) of the parametrized bilinear-form family."""

    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.0

    def __post_init__(self):
        for v in (self.c1, self.c2, self.c3):
            if not math.isfinite(v):
                raise ValueError("form coefficients must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


@dataclass
class SaddleSystem:
    """Blocks of the 2m x 2m discrete system [[A, B^T], [B, C]]."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    load_x: np.ndarray
    load_y: np.ndarray
    m: int
    coeffs: FormCoefficients = field(default_factory=FormCoefficients)


def sigma_pairs(m: int) -> np.ndarray:
    """(p, q) = sigma(n) for n = 1..m, as an (m, 2) integer array."""
    return np.array([sigma(n) for n in range(1, m + 1)], dtype=int)


def _max_1d_index(m: int) -> int:
    return int(sigma_pairs(m).max())


def mass_2d(m: int) -> np.ndarray:
    """Exact 2D mass Gram of G0_1..G0_m (tensor product of 1D masses)."""
    pairs = sigma_pairs(m) - 1
    mass, _ = inner_products_1d(_max_1d_index(m))
    p, q = pairs[:, 0], pairs[:, 1]
    return mass[np.ix_(p, p)] * mass[np.ix_(q, q)]


def stiff_2d(m: int) -> np.ndarray:
    """Exact 2D Dirichlet Gram: S x M + M x S in each index pair."""
    pairs = sigma_pairs(m) - 1
    mass, stiff = inner_products_1d(_max_1d_index(m))
    p, q = pairs[:, 0], pairs[:, 1]
    return (stiff[np.ix_(p, p)] * mass[np.ix_(q, q)]
            + mass[np.ix_(p, p)] * stiff[np.ix_(q, q)])


def assemble_forms(m: int, coeffs: FormCoefficients) -> SaddleSystem:
    """Form matrices only; loads are zero until assemble_loads fills them."""
    if m < 1:
        raise ValueError("m must be positive")
    M2 = mass_2d(m)
    S2 = stiff_2d(m)
    return SaddleSystem(
        A=coeffs.c2 * M2,
        B=-coeffs.c1 * S2,
        C=-coeffs.c3 * M2,
        load_x=np.zeros(m),
        load_y=np.zeros(m),
        m=m,
        coeffs=coeffs,
    )


def load_component_1d(p: Polynomial1D, k: int,
                      npoints: int = LOAD_QUAD_POINTS) -> float:
    """int_0^1 p(t) g0_k(t) dt with panels aligned to the tent breakpoints."""
    nodes, weights = composite_nodes(g0_breakpoints(k), npoints)
    return float(weights @ (p(nodes) * g0_values(k, nodes)))


def assemble_loads(m: int, f: TensorPolynomial,
                   npoints: int = LOAD_QUAD_POINTS):
    """(load_x, load_y) with load_x = 0 and load_y[i] = -int f G0_{i+1}.

    The tensor structure of f reduces every 2D load entry to products of
    1D integrals, each exact for the default 6-point panels.
    """
    pairs = sigma_pairs(m)
    m1d = int(pairs.max())
    load_y = np.zeros(m)
    for p_poly, q_poly in f.terms:
        px = np.array([load_component_1d(p_poly, k, npoints) for k in range(1, m1d + 1)])
        qy = np.array([load_component_1d(q_poly, k, npoints) for k in range(1, m1d + 1)])
        load_y -= px[pairs[:, 0] - 1] * qy[pairs[:, 1] - 1]
    return np.zeros(m), load_y


def assemble_system(m: int, coeffs: FormCoefficients,
                    f: TensorPolynomial) -> SaddleSystem:
    """Forms plus loads in one step."""
    system = assemble_forms(m, coeffs)
    system.load_x, system.load_y = assemble_loads(m, f)
    return system


def build_block(system: SaddleSystem):
    """(2m x 2m block matrix, stacked rhs) acting on (w-coeffs, psi-coeffs)."""
    m = system.m
    for name, M in (("A", system.A), ("B", system.B), ("C", system.C)):
        if M.shape != (m, m):
            raise ValueError(f"block {name} has shape {M.shape}, expected {(m, m)}")
    if system.load_x.shape != (m,) or system.load_y.shape != (m,):
        raise ValueError("load vectors must have length m")
    block = np.block([[system.A, system.B.T], [system.B, system.C]])
    rhs = np.concatenate([system.load_x, system.load_y])
    return block, rhs
