import json
import math

import numpy as np
import pytest

import qmw


def test_grid_and_basis():
    space = qmw.FockSpace(qmw.LatticeSpec(n=1, M=4, L=2 * math.pi), n_max=2)
    assert space.dim == 15 == qmw.basis_size(4, 2)
    np.testing.assert_allclose(space.momenta[:, 0], [-1.5, -0.5, 0.5, 1.5])
    np.testing.assert_allclose(space.energies, [1.5, 0.5, 0.5, 1.5])
    assert space.particle_numbers[0] == 0


def test_number_operator_is_diagonal_integers():
    space = qmw.FockSpace(qmw.LatticeSpec(n=2, M=4, L=4.0), n_max=2)
    n = qmw.operator(space, "N").toarray()
    assert np.allclose(n, np.diag(np.diag(n)))
    assert np.allclose(np.diag(n).real, space.particle_numbers)


def test_product_law():
    space = qmw.FockSpace(qmw.LatticeSpec(n=1, M=4, L=4.0), n_max=2)
    theta = [0.0, 0.1, -0.1, 0.0]
    a = qmw.operator(space, "X0")
    b = qmw.operator(space, "X1")
    lhs = (qmw.warp(space, a, theta) @ qmw.warp(space, b, theta)).toarray()
    rhs = qmw.warp(space, qmw.rieffel_product(space, a, b, theta), theta).toarray()
    assert np.abs(lhs - rhs).max() < 1e-12


def test_zero_theta_commutator_vanishes():
    space = qmw.FockSpace(qmw.LatticeSpec(n=1, M=8, L=8.0), n_max=2)
    c = qmw.deformed_commutator(space, qmw.operator(space, "X0"), qmw.operator(space, "X1"), [0.0] * 4)
    assert abs(c).max() < 1e-12


def test_bad_theta_rejected():
    space = qmw.FockSpace(qmw.LatticeSpec(n=1, M=4, L=4.0), n_max=1)
    with pytest.raises(ValueError, match="antisymmetry"):
        qmw.warp(space, qmw.operator(space, "N"), [0.0, 0.1, 0.1, 0.0])


def test_config_round_trip():
    canonical = qmw.parse_config("{}")
    assert json.loads(canonical)["M"] == 8
    assert qmw.config_hash(canonical) == qmw.config_hash("{}")
    with pytest.raises(ValueError, match="colour"):
        qmw.parse_config('{"colour": 1}')


def test_fit_order():
    assert qmw.fit_order([4e-2, 1e-2, 2.5e-3], [0.4, 0.2, 0.1]) == pytest.approx(2.0)


def test_exact_suite_passes():
    results = qmw.run_suites('{"M": 4, "L": 4}', ["exact"])
    assert results and all(r["pass"] for r in results)
