"""Composite Gauss-Legendre quadrature, tensorized for the unit square.

Used only where exact piecewise integration is not available, i.e. for
load integrals of a smooth polynomial against the piecewise-linear basis
and for error norms of reconstructed solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureRule1D",
    "gauss_rule",
    "composite_nodes",
    "integrate_1d",
    "integrate_2d",
]

MAX_POINTS = 32


@dataclass(frozen=True)
class QuadratureRule1D:
    """Nodes and weights on the reference interval [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def gauss_rule(npoints: int) -> QuadratureRule1D:
    """Gauss-Legendre rule with npoints nodes, exact to degree 2n-1."""
    if not 1 <= npoints <= MAX_POINTS:
        raise ValueError(f"npoints must be in [1, {MAX_POINTS}]")
    nodes, weights = np.polynomial.legendre.leggauss(npoints)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule1D(nodes, weights)


def composite_nodes(breakpoints, npoints: int):
    """Nodes and weights of the composite rule on the panels of breakpoints."""
    bps = np.asarray(breakpoints, dtype=float)
    if bps.ndim != 1 or len(bps) < 2 or np.any(np.diff(bps) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    rule = gauss_rule(npoints)
    a, b = bps[:-1], bps[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b)[:, None] + half[:, None] * rule.nodes).ravel()
    weights = (half[:, None] * rule.weights).ravel()
    return nodes, weights


def integrate_1d(f, breakpoints, npoints: int = 6) -> float:
    """Composite Gauss-Legendre integral of f over the panel partition."""
    nodes, weights = composite_nodes(breakpoints, npoints)
    return float(weights @ np.asarray(f(nodes), dtype=float))


def integrate_2d(f, panels_x, panels_y, npoints: int = 6) -> float:
    """Tensor-product composite integral of f(x, y) over [0,1]^2.

    f must broadcast over meshgrid arrays.
    """
    nx, wx = composite_nodes(panels_x, npoints)
    ny, wy = composite_nodes(panels_y, npoints)
    X, Y = np.meshgrid(nx, ny, indexing="ij")
    vals = np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape)
    return float(wx @ vals @ wy)
