"""Discrete stability constants and the collage-type inequality."""

import math

import numpy as np
import pytest

from mixedcollage.assembly import FormCoefficients, assemble_system
from mixedcollage.forward import solve_system
from mixedcollage.polynomials import manufactured_f
from mixedcollage.stability import (ConditionViolatedError, collage_check,
                                    compute_constants, default_grams,
                                    family_constants)


def make_case(m, delta, psi0):
    f = manufactured_f(psi0, delta)
    system = assemble_system(m, FormCoefficients(1.0, 1.0, delta), f)
    ge, gf = default_grams(m)
    return system, ge, gf


@pytest.mark.parametrize("m", [9, 25])
@pytest.mark.parametrize("delta", [0.0, 1.0 / 15.0, 0.25])
def test_whitened_infsup_is_one(psi0, m, delta):
    system, ge, gf = make_case(m, delta, psi0)
    report = compute_constants(system, ge, gf)
    assert report.beta == pytest.approx(1.0, abs=1e-9)
    assert math.isinf(report.alpha)  # trivial kernel convention
    assert report.rho == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("delta", [1.0 / 15.0, 0.25])
def test_perturbation_norm_bounded(psi0, delta):
    system, ge, gf = make_case(9, delta, psi0)
    report = compute_constants(system, ge, gf)
    assert report.norm_c <= delta / (2 * math.pi**2) + 1e-3
    assert report.condition_ok
    assert report.collage_factor >= report.rho


def test_zero_perturbation_norm(psi0):
    system, ge, gf = make_case(9, 0.0, psi0)
    report = compute_constants(system, ge, gf)
    assert report.norm_c == pytest.approx(0.0, abs=1e-14)
    assert report.condition_ok


def test_rho_invariants(psi0):
    system, ge, gf = make_case(25, 0.25, psi0)
    r = compute_constants(system, ge, gf)
    inv_alpha = 0.0 if math.isinf(r.alpha) else 1.0 / r.alpha
    grow = 1.0 + r.norm_a * inv_alpha
    candidates = (inv_alpha, grow / r.beta, r.norm_a * grow / r.beta**2)
    assert r.rho == pytest.approx(max(candidates), rel=1e-12)


def test_rho_grows_when_infsup_shrinks(psi0):
    system, ge, gf = make_case(9, 0.25, psi0)
    before = compute_constants(system, ge, gf)
    system.B = 0.5 * system.B
    after = compute_constants(system, ge, gf)
    assert after.beta == pytest.approx(0.5 * before.beta, rel=1e-12)
    assert after.rho >= before.rho


def test_constants_invariant_under_basis_reordering(psi0, rng):
    system, ge, gf = make_case(9, 0.25, psi0)
    base = compute_constants(system, ge, gf)
    perm = rng.permutation(9)
    P = np.eye(9)[perm]
    system.A = P @ system.A @ P.T
    system.B = P @ system.B @ P.T
    system.C = P @ system.C @ P.T
    shuffled = compute_constants(system, P @ ge @ P.T, P @ gf @ P.T)
    assert shuffled.beta == pytest.approx(base.beta, abs=1e-9)
    assert shuffled.norm_a == pytest.approx(base.norm_a, abs=1e-9)
    assert shuffled.norm_c == pytest.approx(base.norm_c, abs=1e-9)
    assert shuffled.rho == pytest.approx(base.rho, abs=1e-9)


@pytest.mark.parametrize("m", [9, 25])
def test_collage_inequality_random_guesses(psi0, m):
    system, ge, gf = make_case(m, 0.25, psi0)
    report = compute_constants(system, ge, gf)
    sol = solve_system(system)
    local = np.random.default_rng(m)
    for _ in range(100):
        guess = (sol.w_coeffs + local.normal(0, 0.2, m),
                 sol.psi_coeffs + local.normal(0, 0.2, m))
        assert collage_check(system, sol, guess, report, ge, gf).satisfied


def test_collage_check_exact_guess(psi0):
    system, ge, gf = make_case(9, 0.25, psi0)
    report = compute_constants(system, ge, gf)
    sol = solve_system(system)
    chk = collage_check(system, sol, (sol.w_coeffs, sol.psi_coeffs),
                        report, ge, gf)
    assert chk.lhs == pytest.approx(0.0, abs=1e-12)
    assert chk.satisfied


def test_collage_check_zero_guess(psi0):
    system, ge, gf = make_case(9, 0.25, psi0)
    report = compute_constants(system, ge, gf)
    sol = solve_system(system)
    chk = collage_check(system, sol, (np.zeros(9), np.zeros(9)),
                        report, ge, gf)
    assert chk.lhs > 0
    assert chk.satisfied


def test_collage_check_requires_condition(psi0):
    system, ge, gf = make_case(9, 0.25, psi0)
    report = compute_constants(system, ge, gf)
    import dataclasses
    bad = dataclasses.replace(report, condition_ok=False)
    sol = solve_system(system)
    with pytest.raises(ConditionViolatedError):
        collage_check(system, sol, (sol.w_coeffs, sol.psi_coeffs), bad, ge, gf)


def test_family_summary(psi0):
    ge, gf = default_grams(9)
    systems = [assemble_system(9, FormCoefficients(1.0, 1.0, d),
                               manufactured_f(psi0, d))
               for d in (0.0, 0.25)]
    reports, summary = family_constants(systems, ge, gf)
    assert len(reports) == 2
    assert summary["familyConditionOK"]
    assert summary["supNormC"] == pytest.approx(reports[1].norm_c, rel=1e-12)


def test_report_json_schema(psi0):
    system, ge, gf = make_case(9, 0.25, psi0)
    report = compute_constants(system, ge, gf)
    import json
    doc = json.loads(report.to_json())
    assert set(doc) == {"alpha", "beta", "normA", "normC", "rho",
                        "conditionOK", "collageFactor"}
