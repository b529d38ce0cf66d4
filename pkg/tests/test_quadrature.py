"""Gauss panel rules used wherever closed forms are unavailable."""

import numpy as np
import pytest

from mixedcollage.quadrature import (composite_nodes, gauss_rule,
                                     integrate_1d, integrate_2d)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
def test_gauss_rule_exact_to_design_degree(n):
    rule = gauss_rule(n)
    for deg in range(2 * n):
        # reference interval is [-1, 1]
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        approx = float(rule.weights @ rule.nodes**deg)
        assert approx == pytest.approx(exact, abs=1e-13)


def test_gauss_rule_rejects_bad_order():
    with pytest.raises(ValueError):
        gauss_rule(0)


def test_composite_nodes_partition_weights():
    nodes, weights = composite_nodes(np.array([0.0, 0.3, 1.0]), 4)
    assert weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(np.diff(nodes) > 0)


def test_integrate_1d_transcendental():
    val = integrate_1d(np.sin, np.linspace(0, np.pi, 9), 8)
    assert val == pytest.approx(2.0, abs=1e-12)


def test_integrate_2d_separable():
    val = integrate_2d(lambda x, y: x * y, np.linspace(0, 1, 5),
                       np.linspace(0, 1, 5), 4)
    assert val == pytest.approx(0.25, abs=1e-13)
