"""Integrated-Haar (Schauder) basis machinery on [0,1] and [0,1]^2.

The Haar system is taken L^2-orthonormal (level factor 2^{j/2}), so the
antiderivative family g0_k has derivative h_{k+1} and the 1D stiffness
Gram is exactly the identity.  Every g0_k is a piecewise-linear "tent"
with dyadic breakpoints, vanishing at 0 and 1; tensor products G0_n
through the pairing sigma give the 2D family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polynomials import Polynomial1D

__all__ = [
    "HaarIndex",
    "BasisFunction1D",
    "BasisFunction2D",
    "haar_eval",
    "g0_eval",
    "g0_function",
    "g0_values",
    "haar_values",
    "sigma",
    "sigma_inverse",
    "bivariate_eval",
    "inner_products_1d",
    "g0_breakpoints",
    "merged_breakpoints",
]


@dataclass(frozen=True)
class HaarIndex:
    """Flat Haar index k >= 1; k = 1 is the constant, k = 2^j + i + 1 else."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("Haar index must be positive")

    @property
    def level_shift(self):
        """(j, i) with k = 2^j + i + 1; None for the constant k = 1."""
        if self.k == 1:
            return None
        j = (self.k - 1).bit_length() - 1
        return j, self.k - 1 - 2**j


def _check_unit(t, name="t"):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return t


def haar_eval(k, t):
    """L^2-orthonormal Haar function h_k at t in [0,1].

    h_1 is the constant 1; for k = 2^j + i + 1 the value is +2^{j/2} on
    the left half of [i/2^j, (i+1)/2^j), -2^{j/2} on the right half.  At
    t = 1 the left limit is used (a measure-zero convention).
    """
    if isinstance(k, HaarIndex):
        k = k.k
    t = _check_unit(t)
    vals = haar_values(int(k), np.atleast_1d(t))
    return float(vals[0]) if np.isscalar(t) or t.shape == () else vals


def haar_values(k: int, ts: np.ndarray) -> np.ndarray:
    """Vectorized haar_eval without the domain check."""
    ts = np.asarray(ts, dtype=float)
    if k == 1:
        return np.ones_like(ts)
    j, i = HaarIndex(k).level_shift
    amp = 2.0 ** (j / 2.0)
    a = i / 2**j
    mid = (i + 0.5) / 2**j
    b = (i + 1) / 2**j
    # half-open subintervals; the global right endpoint keeps its left limit
    left = (ts >= a) & (ts < mid)
    right = (ts >= mid) & ((ts < b) | ((b == 1.0) & (ts == 1.0)))
    return amp * left - amp * right


@dataclass(frozen=True)
class BasisFunction1D:
    """Piecewise polynomial on [0,1] with dyadic breakpoints.

    pieces[i] applies on [breakpoints[i], breakpoints[i+1]] in the global
    coordinate.
    """

    breakpoints: tuple
    pieces: tuple

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0,
                      len(self.pieces) - 1)
        out = np.empty_like(t, dtype=float)
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = piece(t[mask])
        return float(out) if out.shape == () else out

    def derivative(self) -> "BasisFunction1D":
        return BasisFunction1D(self.breakpoints,
                               tuple(p.derivative() for p in self.pieces))


@lru_cache(maxsize=None)
def _g0_data(k: int):
    """(a, mid, b, amp) of the tent g0_k = integral of h_{k+1}."""
    if k < 1:
        raise ValueError("g0 index must be positive")
    j, i = HaarIndex(k + 1).level_shift
    amp = 2.0 ** (j / 2.0)
    return i / 2**j, (i + 0.5) / 2**j, (i + 1) / 2**j, amp


@lru_cache(maxsize=None)
def g0_function(k: int) -> BasisFunction1D:
    """g0_k as an explicit piecewise-linear BasisFunction1D."""
    a, mid, b, amp = _g0_data(k)
    bps = [0.0, a, mid, b, 1.0]
    pieces = [
        Polynomial1D([0.0]),
        Polynomial1D([-amp * a, amp]),      # amp*(t - a)
        Polynomial1D([amp * b, -amp]),      # amp*(b - t)
        Polynomial1D([0.0]),
    ]
    keep_bp, keep_pc = [bps[0]], []
    for left, right, pc in zip(bps[:-1], bps[1:], pieces):
        if right > left:
            keep_bp.append(right)
            keep_pc.append(pc)
    return BasisFunction1D(tuple(keep_bp), tuple(keep_pc))


def g0_eval(k: int, t):
    """g0_k(t) = g_{k+2}(t), the k-th H^1_0(0,1) Schauder element."""
    t = _check_unit(t)
    vals = g0_values(int(k), np.atleast_1d(t))
    return float(vals[0]) if np.isscalar(t) or t.shape == () else vals


def g0_values(k: int, ts) -> np.ndarray:
    """Vectorized g0_eval without the domain check (exact: tents are linear)."""
    a, mid, b, amp = _g0_data(k)
    peak = amp * (mid - a)
    return np.interp(np.asarray(ts, dtype=float),
                     [0.0, a, mid, b, 1.0], [0.0, 0.0, peak, 0.0, 0.0])


def g0_breakpoints(k: int) -> tuple:
    return g0_function(k).breakpoints


def merged_breakpoints(m1d: int) -> np.ndarray:
    """Union of breakpoints of g0_1..g0_m1d (a dyadic grid)."""
    pts = {0.0, 1.0}
    for k in range(1, m1d + 1):
        pts.update(g0_breakpoints(k))
    return np.array(sorted(pts))


def sigma(n: int):
    """Shell-by-shell bijection from positive integers onto the lattice.

    Enumerates {1..m}^2 with the first m^2 indices for every m, which
    makes the spanned 2D subspaces nested.
    """
    if n < 1:
        raise ValueError("sigma index must be positive")
    r = math.isqrt(n)
    if r * r == n:
        return r, r
    rem = n - r * r
    if rem <= r:
        return rem, r + 1
    return r + 1, rem - r


def sigma_inverse(p: int, q: int) -> int:
    """Flat index n with sigma(n) = (p, q)."""
    if p < 1 or q < 1:
        raise ValueError("lattice coordinates must be positive")
    if p == q:
        return p * p
    if p < q:
        return (q - 1) ** 2 + p
    return (p - 1) ** 2 + p - 1 + q


@dataclass(frozen=True)
class BasisFunction2D:
    """G0_n(s,t) = g0_p(s) g0_q(t) with (p, q) = sigma(n)."""

    n: int

    @property
    def pq(self):
        return sigma(self.n)

    @property
    def factors(self):
        p, q = self.pq
        return g0_function(p), g0_function(q)

    def __call__(self, s, t):
        p, q = self.pq
        return g0_values(p, np.asarray(s, float)) * g0_values(q, np.asarray(t, float))


def bivariate_eval(n: int, s, t):
    """G0_n(s, t) on the closed unit square."""
    s = _check_unit(s, "s")
    t = _check_unit(t, "t")
    p, q = sigma(n)
    out = g0_values(p, np.atleast_1d(s)) * g0_values(q, np.atleast_1d(t))
    scalar = (np.isscalar(s) or s.shape == ()) and (np.isscalar(t) or t.shape == ())
    return float(out[0]) if scalar else out


def _piecewise_product_integral(u: BasisFunction1D, v: BasisFunction1D) -> float:
    """Exact integral of u*v over [0,1] via merged breakpoints."""
    pts = np.array(sorted(set(u.breakpoints) | set(v.breakpoints)))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + b)
        pu = u.pieces[min(np.searchsorted(u.breakpoints, mid) - 1, len(u.pieces) - 1)]
        pv = v.pieces[min(np.searchsorted(v.breakpoints, mid) - 1, len(v.pieces) - 1)]
        total += (pu * pv).integrate(a, b)
    return total


@lru_cache(maxsize=None)
def inner_products_1d(m1d: int):
    """Exact 1D Gram blocks (Mass, Stiff) of g0_1..g0_m1d.

    Mass[p-1, q-1] = int g0_p g0_q; Stiff is the Gram of the derivatives
    and equals the identity for the orthonormal Haar convention.
    """
    if m1d < 1:
        raise ValueError("m1d must be positive")
    funcs = [g0_function(k) for k in range(1, m1d + 1)]
    derivs = [f.derivative() for f in funcs]
    mass = np.empty((m1d, m1d))
    stiff = np.empty((m1d, m1d))
    for i in range(m1d):
        for j in range(i + 1):
            mass[i, j] = mass[j, i] = _piecewise_product_integral(funcs[i], funcs[j])
            stiff[i, j] = stiff[j, i] = _piecewise_product_integral(derivs[i], derivs[j])
    mass.setflags(write=False)
    stiff.setflags(write=False)
    return mass, stiff
