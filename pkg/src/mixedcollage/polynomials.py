"""Exact bivariate polynomial algebra for manufactured solutions.

Coefficients are stored in ascending power order (index i holds the
coefficient of t**i), matching ``numpy.polynomial.polynomial``.
Differentiation is exact coefficient shifting, so manufactured loads
like f = biharmonic(psi0) + delta*psi0 carry no numerical error.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

__all__ = [
    "Polynomial1D",
    "TensorPolynomial",
    "poly_derivative",
    "laplacian",
    "manufactured_f",
    "reference_psi0",
]


def _canonical(coeffs) -> np.ndarray:
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        return np.zeros(1)
    return a[: nz[-1] + 1].copy()


class Polynomial1D:
    """Univariate real polynomial in canonical (trailing-nonzero) form."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = _canonical(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    def __call__(self, t):
        return npoly.polyval(t, self.coeffs)

    def derivative(self, order: int = 1) -> "Polynomial1D":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order > self.degree:
            return Polynomial1D([0.0])
        return Polynomial1D(npoly.polyder(self.coeffs, order))

    def antiderivative(self) -> "Polynomial1D":
        return Polynomial1D(npoly.polyint(self.coeffs))

    def integrate(self, a: float, b: float) -> float:
        anti = npoly.polyint(self.coeffs)
        return float(npoly.polyval(b, anti) - npoly.polyval(a, anti))

    def __add__(self, other: "Polynomial1D") -> "Polynomial1D":
        return Polynomial1D(npoly.polyadd(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, Polynomial1D):
            return Polynomial1D(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial1D(self.coeffs * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial1D":
        return Polynomial1D(-self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial1D({self.coeffs.tolist()})"


class TensorPolynomial:
    """Sum of separable terms p(x)*q(y) on the plane.

    The empty term list is the zero polynomial.  Evaluation, the
    Laplacian and scaling are all linear in the term list.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        cleaned = []
        for p, q in terms:
            if not isinstance(p, Polynomial1D):
                p = Polynomial1D(p)
            if not isinstance(q, Polynomial1D):
                q = Polynomial1D(q)
            if p.is_zero() or q.is_zero():
                continue
            cleaned.append((p, q))
        self.terms = tuple(cleaned)

    def __call__(self, x, y):
        out = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        for p, q in self.terms:
            out = out + p(x) * q(y)
        if out.shape == ():
            return float(out)
        return out

    def eval_grid(self, xs, ys) -> np.ndarray:
        """Values on the tensor grid xs x ys, shape (len(xs), len(ys))."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out = np.zeros((len(xs), len(ys)))
        for p, q in self.terms:
            out += np.outer(p(xs), q(ys))
        return out

    def grad_grid(self, xs, ys):
        """(d/dx, d/dy) values on the tensor grid xs x ys."""
        return self.partial(1, 0).eval_grid(xs, ys), self.partial(0, 1).eval_grid(xs, ys)

    def partial(self, order_x: int, order_y: int) -> "TensorPolynomial":
        return TensorPolynomial(
            [(p.derivative(order_x), q.derivative(order_y)) for p, q in self.terms]
        )

    def laplacian(self) -> "TensorPolynomial":
        return self.partial(2, 0) + self.partial(0, 2)

    def __add__(self, other: "TensorPolynomial") -> "TensorPolynomial":
        return TensorPolynomial(self.terms + other.terms)

    def __mul__(self, scalar) -> "TensorPolynomial":
        s = float(scalar)
        return TensorPolynomial([(p * s, q) for p, q in self.terms])

    __rmul__ = __mul__

    def __neg__(self) -> "TensorPolynomial":
        return self * -1.0

    def __repr__(self) -> str:
        return f"TensorPolynomial(<{len(self.terms)} terms>)"


ZERO = TensorPolynomial()


def poly_derivative(p: Polynomial1D, order: int) -> Polynomial1D:
    """order-th derivative of p, exact in the coefficients."""
    return p.derivative(order)


def laplacian(P: TensorPolynomial) -> TensorPolynomial:
    """P_xx + P_yy."""
    return P.laplacian()


def manufactured_f(psi0: TensorPolynomial, delta: float) -> TensorPolynomial:
    """Load with exact solution psi0: biharmonic(psi0) + delta*psi0."""
    return laplacian(laplacian(psi0)) + delta * psi0


def reference_psi0(scale: float = 1.0e3) -> TensorPolynomial:
    """The stream-function style exact solution scale*(x(x-1)y(y-1))**4.

    Expanded once into monomial coefficients; vanishes together with its
    Laplacian on the boundary of the unit square.
    """
    base = Polynomial1D([0.0, -1.0, 1.0])  # t^2 - t
    quartic = base * base * base * base
    return TensorPolynomial([(scale * quartic, quartic)])
