"""Saddle-system assembly: tensor Gram identities and frozen loads."""

import numpy as np
import pytest

from mixedcollage.assembly import (FormCoefficients, assemble_forms,
                                   assemble_loads, assemble_system,
                                   build_block, mass_2d, sigma_pairs,
                                   stiff_2d)
from mixedcollage.basis import bivariate_eval
from mixedcollage.polynomials import Polynomial1D, TensorPolynomial
from mixedcollage.quadrature import integrate_2d

DELTA = 0.25
CONST_ONE = TensorPolynomial([(Polynomial1D([1.0]), Polynomial1D([1.0]))])


def test_coefficients_reject_nonfinite():
    with pytest.raises(ValueError):
        FormCoefficients(c1=np.inf)


def test_single_mode_block_frozen():
    system = assemble_system(1, FormCoefficients(1.0, 1.0, DELTA), CONST_ONE)
    assert system.A[0, 0] == pytest.approx(1.0 / 144.0, abs=1e-15)
    assert system.B[0, 0] == pytest.approx(-1.0 / 6.0, abs=1e-15)
    assert system.C[0, 0] == pytest.approx(-DELTA / 144.0, abs=1e-15)
    assert system.load_x[0] == 0.0
    assert system.load_y[0] == pytest.approx(-1.0 / 16.0, abs=1e-12)


def test_mass_2d_matches_quadrature():
    M2 = mass_2d(5)
    panels = np.linspace(0.0, 1.0, 9)
    for i, j in [(0, 0), (1, 3), (2, 4)]:
        direct = integrate_2d(
            lambda x, y: bivariate_eval(i + 1, x, y) * bivariate_eval(j + 1, x, y),
            panels, panels, npoints=6)
        assert M2[i, j] == pytest.approx(direct, abs=1e-9)


def test_grams_are_spd():
    for m in (4, 9):
        for G in (mass_2d(m), stiff_2d(m)):
            assert np.allclose(G, G.T, atol=1e-14)
            assert np.min(np.linalg.eigvalsh(G)) > 0


def test_form_scaling_in_coefficients():
    base = assemble_forms(9, FormCoefficients(1.0, 1.0, 1.0))
    scaled = assemble_forms(9, FormCoefficients(2.0, 3.0, 0.5))
    assert np.allclose(scaled.B, 2.0 * base.B)
    assert np.allclose(scaled.A, 3.0 * base.A)
    assert np.allclose(scaled.C, 0.5 * base.C)


def test_loads_linear_in_f(psi0):
    _, l1 = assemble_loads(9, psi0)
    _, l2 = assemble_loads(9, psi0 * 2.0)
    assert np.allclose(l2, 2.0 * l1, rtol=1e-12)


def test_sigma_pairs_shape():
    pairs = sigma_pairs(9)
    assert pairs.shape == (9, 2)
    assert pairs.max() == 3


def test_build_block_symmetry_structure():
    system = assemble_system(9, FormCoefficients(1.0, 1.0, DELTA), CONST_ONE)
    block, rhs = build_block(system)
    assert block.shape == (18, 18)
    assert rhs.shape == (18,)
    assert np.allclose(block[:9, 9:], system.B.T)
    assert np.allclose(block, block.T, atol=1e-14)


def test_build_block_validates_shapes():
    system = assemble_system(4, FormCoefficients(), CONST_ONE)
    system.load_y = np.zeros(3)
    with pytest.raises(ValueError):
        build_block(system)


def test_assemble_rejects_nonpositive_m():
    with pytest.raises(ValueError):
        assemble_forms(0, FormCoefficients())
