"""Collage-distance estimation of the bilinear-form coefficients.

Pipeline: sample the exact solution on an interior grid, add relative
noise, fit a tensor-product polynomial through the padded samples (zero
boundary ring), test the guessed system against a tensor hat-function
basis, and recover (C1, C2, C3) from the residual functionals.  Both
residuals are affine in the coefficients, so the squared-dual-norm
objective is a strictly convex quadratic solved by 3x3 normal
equations; the reported collage distance is the sum of the residual
dual norms at the minimizer.

Because the fitted targets are polynomials, every test-basis integral
is evaluated in closed form (monomial-against-hat load tables), so the
only error sources are the data themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as npoly
from sklearn.base import BaseEstimator

from .assembly import FormCoefficients
from .linalg import cholesky_lower
from .polynomials import (Polynomial1D, TensorPolynomial, laplacian,
                          manufactured_f, reference_psi0)

__all__ = [
    "SampledField",
    "TargetPair",
    "CollageEstimate",
    "SweepRow",
    "RankDeficiencyError",
    "fd_laplacian",
    "fd_laplacian_poly",
    "fit_polynomial",
    "fe_grams_1d",
    "fe_grams_2d",
    "fe_load_vector",
    "hat_value_loads",
    "hat_gradient_loads",
    "make_target",
    "target_from_samples",
    "collage_objective",
    "estimate_parameters",
    "noise_sweep",
    "CollageCoefficientEstimator",
]

W_MODES = ("analytic", "finite-difference")
NOISE_DISTS = ("uniform", "gaussian")
WEIGHTINGS = ("riesz", "euclidean")
DEFAULT_DELTA = 0.25


class RankDeficiencyError(RuntimeError):
    """The least-squares design is rank deficient (degenerate target)."""


@dataclass(frozen=True)
class SampledField:
    """Values on the interior grid ((i+1)h, (j+1)h), h = 1/(grid_n+1)."""

    grid_n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid_n, self.grid_n):
            raise ValueError("values must be a grid_n x grid_n array")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")

    @property
    def spacing(self) -> float:
        return 1.0 / (self.grid_n + 1)


@dataclass(frozen=True, eq=False)
class TargetPair:
    """Observed pair: fitted psi-variable and auxiliary-variable fields."""

    u_hat: TensorPolynomial
    w_hat: TensorPolynomial
    w_mode: str


@dataclass(frozen=True)
class CollageEstimate:
    """Recovered coefficients with the collage distance at the optimum."""

    c1: float
    c2: float
    c3: float
    collage_distance: float
    residual_split: tuple
    clipped: bool = False

    @property
    def coefficients(self) -> FormCoefficients:
        return FormCoefficients(self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class SweepRow:
    """Per-noise-level statistics over independent seeded trials."""

    noise_level: float
    trials: int
    mean_c1: float
    mean_c2: float
    mean_c3: float
    std_c1: float
    std_c2: float
    std_c3: float
    mean_distance: float


def fd_laplacian(values: np.ndarray, h: float) -> np.ndarray:
    """5-point Laplacian of interior samples with zero Dirichlet ghosts."""
    n = values.shape[0]
    padded = np.zeros((n + 2, n + 2))
    padded[1:-1, 1:-1] = values
    return (padded[2:, 1:-1] + padded[:-2, 1:-1]
            + padded[1:-1, 2:] + padded[1:-1, :-2]
            - 4.0 * padded[1:-1, 1:-1]) / h**2


def _shifted(p: Polynomial1D, s: float) -> np.ndarray:
    """Coefficients of t -> p(t + s) (Taylor shift, exact in the degree)."""
    shifted = np.polynomial.Polynomial(p.coeffs)(
        np.polynomial.Polynomial([s, 1.0]))
    return shifted.coef


def _second_difference(p: Polynomial1D, step: float) -> Polynomial1D:
    """(p(t+h) + p(t-h) - 2 p(t)) / h^2 as a polynomial."""
    plus = np.polynomial.Polynomial(_shifted(p, step))
    minus = np.polynomial.Polynomial(_shifted(p, -step))
    center = np.polynomial.Polynomial(p.coeffs)
    return Polynomial1D((plus + minus - 2.0 * center).coef / step**2)


def fd_laplacian_poly(field: TensorPolynomial, step: float) -> TensorPolynomial:
    """5-point finite-difference Laplacian of a polynomial field.

    Argument shifts of a polynomial are again polynomials, so the
    discrete stencil applied to the fitted field is exact: the result
    equals the Laplacian up to the usual O(step^2) truncation term.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    terms = []
    for p, q in field.terms:
        terms.append((_second_difference(p, step), q))
        terms.append((p, _second_difference(q, step)))
    return TensorPolynomial(terms)


def fit_polynomial(samples: SampledField, degree: int = None) -> TensorPolynomial:
    """Tensor-product polynomial least-squares fit of the padded samples.

    The samples are extended by the homogeneous boundary ring and fitted
    per axis with degree grid_n - 1 by default, the degree the interior
    grid can support.  Fitting (rather than interpolating at full
    degree) keeps the derivative noise amplification of the recovered
    field moderate; a field whose per-axis degree does not exceed the
    fit degree is reproduced exactly from clean samples.
    """
    n = samples.grid_n
    if degree is None:
        degree = n - 1
    if not 0 < degree <= n + 1:
        raise ValueError("degree must be in 1..grid_n+1")
    nodes = np.linspace(0.0, 1.0, n + 2)
    padded = np.zeros((n + 2, n + 2))
    padded[1:-1, 1:-1] = samples.values
    # separable least squares: fit columns along x, then rows along y
    cx = npoly.polyfit(nodes, padded, degree)
    coeff = npoly.polyfit(nodes, cx.T, degree).T
    terms = []
    for a in range(degree + 1):
        mono = np.zeros(a + 1)
        mono[a] = 1.0
        terms.append((Polynomial1D(mono), Polynomial1D(coeff[a])))
    return TensorPolynomial(terms)


def target_from_samples(u_samples: SampledField, w_samples=None,
                        w_mode: str = "analytic", degree: int = None,
                        fd_step: float = None) -> TargetPair:
    """Fit sampled fields into a TargetPair.

    In finite-difference mode the auxiliary field is obtained by
    applying the 5-point Laplacian stencil to the fitted (possibly
    noisy) u field, mirroring the loss of accuracy of numerically
    differentiated observations; the default step is the square of the
    sample spacing.
    """
    if w_mode not in W_MODES:
        raise ValueError(f"w_mode must be one of {W_MODES}")
    u_hat = fit_polynomial(u_samples, degree)
    if w_mode == "finite-difference":
        if fd_step is None:
            fd_step = u_samples.spacing**2
        w_hat = -fd_laplacian_poly(u_hat, fd_step)
    else:
        if w_samples is None:
            raise ValueError("analytic mode requires explicit w samples")
        w_hat = fit_polynomial(w_samples, degree)
    return TargetPair(u_hat=u_hat, w_hat=w_hat, w_mode=w_mode)


def make_target(psi0: TensorPolynomial, grid_n: int, noise_level: float,
                seed, w_mode: str = "analytic",
                noise_dist: str = "uniform", degree: int = None,
                fd_step: float = None) -> TargetPair:
    """Noisy sampled target built from the exact solution psi0."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if noise_level < 0:
        raise ValueError("noise_level must be nonnegative")
    if w_mode not in W_MODES:
        raise ValueError(f"w_mode must be one of {W_MODES}")
    if noise_dist not in NOISE_DISTS:
        raise ValueError(f"noise_dist must be one of {NOISE_DISTS}")

    rng = np.random.default_rng(seed)

    def perturb(values):
        if noise_level == 0.0:
            return values
        if noise_dist == "uniform":
            eps = rng.uniform(-1.0, 1.0, size=values.shape)
        else:
            eps = rng.standard_normal(values.shape)
        return values * (1.0 + noise_level * eps)

    xs = np.arange(1, grid_n + 1) / (grid_n + 1)
    u = SampledField(grid_n, perturb(psi0.eval_grid(xs, xs)))
    if w_mode == "analytic":
        w0 = -laplacian(psi0)
        w = SampledField(grid_n, perturb(w0.eval_grid(xs, xs)))
        return target_from_samples(u, w, w_mode, degree=degree)
    return target_from_samples(u, None, w_mode, degree=degree,
                               fd_step=fd_step)


@lru_cache(maxsize=None)
def fe_grams_1d(n_interior: int):
    """(mass, stiffness) of the 1D hat basis with n_interior nodes."""
    if n_interior < 1:
        raise ValueError("need at least one interior node")
    h = 1.0 / (n_interior + 1)
    main = np.ones(n_interior)
    off = np.ones(n_interior - 1)
    mass = h * (2.0 / 3.0 * np.diag(main) + 1.0 / 6.0 * (np.diag(off, 1) + np.diag(off, -1)))
    stiff = (2.0 * np.diag(main) - np.diag(off, 1) - np.diag(off, -1)) / h
    mass.setflags(write=False)
    stiff.setflags(write=False)
    return mass, stiff


@lru_cache(maxsize=None)
def fe_grams_2d(n_interior: int):
    """(mass, Dirichlet) Grams of the tensor hat basis on the unit square."""
    m1, s1 = fe_grams_1d(n_interior)
    mass = np.kron(m1, m1)
    stiff = np.kron(s1, m1) + np.kron(m1, s1)
    mass.setflags(write=False)
    stiff.setflags(write=False)
    return mass, stiff


@lru_cache(maxsize=None)
def _monomial_hat_loads(n_interior: int, max_deg: int):
    """Exact integrals of monomials against the hat basis.

    Returns (value_table, deriv_table), each (n_interior, max_deg+1):
    value_table[i, a] = int t^a hat_{i+1}(t) dt and
    deriv_table[i, a] = int t^a hat_{i+1}'(t) dt, both in closed form
    via monomial antiderivatives on the two support cells.
    """
    h = 1.0 / (n_interior + 1)
    grid = np.linspace(0.0, 1.0, n_interior + 2)
    a = np.arange(max_deg + 1)
    # P[k, a] = grid[k]^(a+1)/(a+1), Q[k, a] = grid[k]^(a+2)/(a+2)
    P = grid[:, None] ** (a + 1) / (a + 1)
    Q = grid[:, None] ** (a + 2) / (a + 2)
    dP = np.diff(P, axis=0)           # cell increments of the antiderivative
    dQ = np.diff(Q, axis=0)
    left = grid[:-1]
    right = grid[1:]
    # rising and falling flank contributions per cell
    rise = (dQ - left[:, None] * dP) / h
    fall = (right[:, None] * dP - dQ) / h
    value = rise[:-1] + fall[1:]
    deriv = (dP[:-1] - dP[1:]) / h
    value.setflags(write=False)
    deriv.setflags(write=False)
    return value, deriv


def _load_1d(table: np.ndarray, p: Polynomial1D) -> np.ndarray:
    c = p.coeffs
    if len(c) > table.shape[1]:
        raise ValueError("monomial load table too small for this degree")
    return table[:, : len(c)] @ c


def _max_degree(field: TensorPolynomial) -> int:
    return max((max(len(p.coeffs), len(q.coeffs)) - 1
                for p, q in field.terms), default=0)


def hat_value_loads(field: TensorPolynomial, n_interior: int) -> np.ndarray:
    """int field phi_i over the tensor hat basis, flattened x-major."""
    value, _ = _monomial_hat_loads(n_interior, max(_max_degree(field), 1))
    out = np.zeros(n_interior * n_interior)
    for p, q in field.terms:
        out += np.kron(_load_1d(value, p), _load_1d(value, q))
    return out


def hat_gradient_loads(field: TensorPolynomial, n_interior: int) -> np.ndarray:
    """int grad(field) . grad(phi_i), exactly, flattened x-major."""
    fx = field.partial(1, 0)
    fy = field.partial(0, 1)
    deg = max(_max_degree(field), 1)
    value, deriv = _monomial_hat_loads(n_interior, deg)
    out = np.zeros(n_interior * n_interior)
    for p, q in fx.terms:
        out += np.kron(_load_1d(deriv, p), _load_1d(value, q))
    for p, q in fy.terms:
        out += np.kron(_load_1d(value, p), _load_1d(deriv, q))
    return out


def fe_load_vector(f: TensorPolynomial, n_interior: int) -> np.ndarray:
    """int f phi_i over the tensor hat basis, flattened x-major."""
    return hat_value_loads(f, n_interior)


def _dual_norm_factory(n_interior: int, weighting: str):
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    if weighting == "euclidean":
        return lambda r: float(np.linalg.norm(r))
    _, S2 = fe_grams_2d(n_interior)
    L = cholesky_lower(S2)

    def dual(r):
        y = scipy.linalg.solve_triangular(L, r, lower=True, check_finite=False)
        return float(np.linalg.norm(y))

    return dual


def _residual_pieces(target: TargetPair, f: TensorPolynomial, n_interior: int):
    """Exact test-basis functionals the residuals are affine in."""
    return {
        "s_psi": hat_gradient_loads(target.u_hat, n_interior),
        "m_psi": hat_value_loads(target.u_hat, n_interior),
        "s_w": hat_gradient_loads(target.w_hat, n_interior),
        "m_w": hat_value_loads(target.w_hat, n_interior),
        "load_f": fe_load_vector(f, n_interior),
    }


def _residuals(pieces, c1, c2, c3):
    r1 = c1 * pieces["s_psi"] - c2 * pieces["m_w"]
    r2 = -pieces["load_f"] + c1 * pieces["s_w"] + c3 * pieces["m_psi"]
    return r1, r2


def collage_objective(target: TargetPair, coeffs: FormCoefficients,
                      f: TensorPolynomial, test_grid_n: int,
                      weighting: str = "riesz"):
    """(xi, r1, r2): collage distance and residual vectors of a candidate.

    r1 tests the coupling equation, r2 the load equation, both against
    the tensor hat basis; xi is the sum of the residual dual norms.
    """
    if test_grid_n < 2:
        raise ValueError("test_grid_n must be at least 2")
    pieces = _residual_pieces(target, f, test_grid_n)
    dual = _dual_norm_factory(test_grid_n, weighting)
    r1, r2 = _residuals(pieces, coeffs.c1, coeffs.c2, coeffs.c3)
    return dual(r1) + dual(r2), r1, r2


def estimate_parameters(target: TargetPair, f: TensorPolynomial,
                        test_grid_n: int, box=None,
                        weighting: str = "riesz") -> CollageEstimate:
    """Closed-form least-squares recovery of (C1, C2, C3).

    Minimizes the sum of squared residual dual norms, which is a strictly
    convex quadratic in the coefficients; the reported distance is the
    sum of dual norms at the minimizer.  If a box is supplied and the
    unconstrained minimizer leaves it, coordinates are clipped and the
    estimate is flagged.
    """
    if test_grid_n < 2:
        raise ValueError("test_grid_n must be at least 2")
    pieces = _residual_pieces(target, f, test_grid_n)

    # residual stack R(C) = R0 + sum_k C_k D_k over the two blocks
    zero = np.zeros_like(pieces["load_f"])
    D = [
        (pieces["s_psi"], pieces["s_w"]),
        (-pieces["m_w"], zero),
        (zero, pieces["m_psi"]),
    ]
    R0 = (zero, -pieces["load_f"])

    if weighting == "euclidean":
        def apply_inv(r):
            return r
    else:
        _, S2 = fe_grams_2d(test_grid_n)
        factor = scipy.linalg.cho_factor(S2, lower=True, check_finite=False)

        def apply_inv(r):
            return scipy.linalg.cho_solve(factor, r, check_finite=False)

    Dinv = [(apply_inv(d1), apply_inv(d2)) for d1, d2 in D]
    normal = np.array([[D[j][0] @ Dinv[k][0] + D[j][1] @ Dinv[k][1]
                        for k in range(3)] for j in range(3)])
    rhs = -np.array([D[j][0] @ apply_inv(R0[0]) + D[j][1] @ apply_inv(R0[1])
                     for j in range(3)])
    svals = np.linalg.svd(normal, compute_uv=False)
    if svals[-1] < 1e-12 * svals[0]:
        raise RankDeficiencyError("collage design matrix is rank deficient")
    c = np.linalg.solve(normal, rhs)

    clipped = False
    if box is not None:
        lo, hi = np.asarray(box, dtype=float)
        clipped_c = np.clip(c, lo, hi)
        clipped = bool(np.any(clipped_c != c))
        c = clipped_c

    dual = _dual_norm_factory(test_grid_n, weighting)
    r1, r2 = _residuals(pieces, *c)
    split = (dual(r1), dual(r2))
    return CollageEstimate(c1=float(c[0]), c2=float(c[1]), c3=float(c[2]),
                           collage_distance=split[0] + split[1],
                           residual_split=split, clipped=clipped)


def noise_sweep(levels, trials: int, seed: int, w_mode: str,
                grid_n: int = 9, test_grid_n: int = 9,
                delta: float = DEFAULT_DELTA, noise_dist: str = "uniform",
                weighting: str = "riesz", psi0: TensorPolynomial = None,
                degree: int = None, fd_step: float = None):
    """Estimation statistics over seeded trials for each noise level.

    Trial seeds are derived deterministically from (seed, level index,
    trial index), so identical calls reproduce identical rows.
    """
    levels = list(levels)
    if not levels:
        raise ValueError("levels must be nonempty")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if psi0 is None:
        psi0 = reference_psi0()
    f = manufactured_f(psi0, delta)

    rows = []
    for li, level in enumerate(levels):
        ests = []
        for ti in range(trials):
            target = make_target(psi0, grid_n, level, seed=[seed, li, ti],
                                 w_mode=w_mode, noise_dist=noise_dist,
                                 degree=degree, fd_step=fd_step)
            ests.append(estimate_parameters(target, f, test_grid_n,
                                            weighting=weighting))
        cs = np.array([[e.c1, e.c2, e.c3] for e in ests])
        dist = np.array([e.collage_distance for e in ests])
        rows.append(SweepRow(
            noise_level=float(level), trials=trials,
            mean_c1=float(cs[:, 0].mean()), mean_c2=float(cs[:, 1].mean()),
            mean_c3=float(cs[:, 2].mean()),
            std_c1=float(cs[:, 0].std()), std_c2=float(cs[:, 1].std()),
            std_c3=float(cs[:, 2].std()),
            mean_distance=float(dist.mean())))
    return rows


class CollageCoefficientEstimator(BaseEstimator):
    """Scikit-learn style wrapper around the collage parameter recovery.

    fit(X, y) consumes the interior sample grid of the observed
    psi-variable as X and, in analytic mode, the auxiliary-variable grid
    as y; in finite-difference mode y is ignored and the auxiliary field
    is differenced from the fitted X.  After fit the recovered
    coefficients are in coef_ (and c1_, c2_, c3_) with the collage
    distance in collage_distance_.
    """

    def __init__(self, test_grid_n: int = 9, w_mode: str = "analytic",
                 weighting: str = "riesz", delta: float = DEFAULT_DELTA,
                 box=None, forcing: TensorPolynomial = None,
                 degree: int = None, fd_step: float = None):
        self.test_grid_n = test_grid_n
        self.w_mode = w_mode
        self.weighting = weighting
        self.delta = delta
        self.box = box
        self.forcing = forcing
        self.degree = degree
        self.fd_step = fd_step

    def _forcing(self) -> TensorPolynomial:
        if self.forcing is not None:
            return self.forcing
        return manufactured_f(reference_psi0(), self.delta)

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError("X must be a square interior sample grid")
        u = SampledField(X.shape[0], X)
        w = None
        if self.w_mode == "analytic":
            if y is None:
                raise ValueError("analytic mode requires auxiliary samples y")
            w = SampledField(X.shape[0], np.asarray(y, dtype=float))
        target = target_from_samples(u, w, self.w_mode, degree=self.degree,
                                     fd_step=self.fd_step)
        est = estimate_parameters(target, self._forcing(), self.test_grid_n,
                                  box=self.box, weighting=self.weighting)
        self.estimate_ = est
        self.coef_ = np.array([est.c1, est.c2, est.c3])
        self.c1_, self.c2_, self.c3_ = self.coef_
        self.collage_distance_ = est.collage_distance
        return self

    def score(self, X=None, y=None) -> float:
        """Negative collage distance of the fitted estimate."""
        return -self.collage_distance_
