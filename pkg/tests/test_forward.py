"""Forward Galerkin solve: frozen errors, residuals, reconstruction."""

import numpy as np
import pytest

from mixedcollage.assembly import FormCoefficients, assemble_system
from mixedcollage.forward import (BasisExpansion, block_residual,
                                  convergence_table, error_norms,
                                  solve_forward, solve_system)
from mixedcollage.polynomials import manufactured_f

DELTA = 1.0 / 15.0

# frozen outputs of this pipeline (independently cross-checked against
# exact-quadrature norms); regression guard at tight tolerance
FROZEN_ERRORS = {
    9: (0.0013320650240203548, 0.014610422551315224,
        0.094128005775000273, 1.475141677181208),
    25: (0.00095373346979789168, 0.011640876364887712,
         0.070963485277943425, 1.2244514958824637),
}


@pytest.mark.parametrize("m", [9, 25])
def test_error_norms_frozen(psi0, w0, m):
    f = manufactured_f(psi0, DELTA)
    sol = solve_forward(m, FormCoefficients(1.0, 1.0, DELTA), f)
    report = error_norms(sol, psi0, w0)
    assert report.as_tuple() == pytest.approx(FROZEN_ERRORS[m], rel=1e-9)


def test_convergence_table_monotone():
    reports = convergence_table([9, 25], DELTA)
    for a, b in zip(reports[0].as_tuple(), reports[1].as_tuple()):
        assert b < a


@pytest.mark.parametrize("m", [1, 9, 25])
@pytest.mark.parametrize("delta", [0.0, DELTA, 0.25])
def test_block_residual_small(psi0, m, delta):
    f = manufactured_f(psi0, delta)
    system = assemble_system(m, FormCoefficients(1.0, 1.0, delta), f)
    sol = solve_system(system)
    assert block_residual(system, sol) <= 1e-10


def test_expansion_reconstructs_single_mode():
    coeffs = np.zeros(9)
    coeffs[1] = 2.0
    exp = BasisExpansion(coeffs)
    from mixedcollage.basis import bivariate_eval
    xs = np.linspace(0.05, 0.95, 7)
    expected = 2.0 * np.array([[bivariate_eval(2, x, y) for y in xs]
                               for x in xs])
    assert np.allclose(exp.eval_grid(xs, xs), expected, atol=1e-13)


def test_expansion_gradient_consistency(rng):
    coeffs = rng.normal(size=9)
    exp = BasisExpansion(coeffs)
    xs = np.linspace(0.11, 0.93, 5)  # off the dyadic breakpoints
    h = 1e-7
    gx, gy = exp.grad_grid(xs, xs)
    fdx = (exp.eval_grid(xs + h, xs) - exp.eval_grid(xs - h, xs)) / (2 * h)
    fdy = (exp.eval_grid(xs, xs + h) - exp.eval_grid(xs, xs - h)) / (2 * h)
    assert np.allclose(gx, fdx, atol=1e-5)
    assert np.allclose(gy, fdy, atol=1e-5)


def test_galerkin_orthogonality(psi0):
    # the discrete solution reproduces psi0's Galerkin projection data:
    # residual of the block system is zero against every basis function
    f = manufactured_f(psi0, DELTA)
    system = assemble_system(9, FormCoefficients(1.0, 1.0, DELTA), f)
    sol = solve_system(system)
    r1 = system.A @ sol.w_coeffs + system.B.T @ sol.psi_coeffs - system.load_x
    r2 = system.B @ sol.w_coeffs + system.C @ sol.psi_coeffs - system.load_y
    assert np.max(np.abs(r1)) < 1e-12
    assert np.max(np.abs(r2)) < 1e-12
