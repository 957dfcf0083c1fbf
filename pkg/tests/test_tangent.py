import math

import numpy as np
import pytest

from lindreach.linalg import apply_superop, dag, hermitize, trace_distance
from lindreach.lindblad import (
    JumpTerm,
    Lindbladian,
    apply,
    channel_superop,
)
from lindreach.tangent import (
    PathSample,
    central_differences,
    in_tangent_cone,
    lift,
    lift_path,
    linear_admissible,
    second_order_witness,
    support_projection,
)
from lindreach.hormander import haar_unitary

from conftest import random_complex, random_density, random_hermitian

X = np.array([[0, 1], [1, 0]], dtype=complex)
GROUND = np.diag([1.0, 0.0]).astype(complex)


def random_cone_element(rng, rho, d):
    """Tangent vector obtained by applying a random Lindbladian to rho."""
    L = Lindbladian(d, hamiltonian=random_hermitian(rng, d),
                    jumps=[JumpTerm(random_complex(rng, d), 0.5),
                           JumpTerm(random_complex(rng, d), 0.3)])
    return apply(L, rho)


def test_support_projection_interior():
    dec = support_projection(np.eye(3, dtype=complex) / 3)
    assert dec.rank == 3
    assert np.allclose(dec.f, np.eye(3))


def test_support_projection_pure():
    dec = support_projection(GROUND)
    assert dec.rank == 1
    assert np.allclose(dec.f, GROUND)
    assert np.allclose(dec.rho11, [[1.0]])


def test_support_projection_rank2():
    dec = support_projection(np.diag([0.7, 0.3, 0.0]).astype(complex))
    assert dec.rank == 2


def test_cone_boundary_examples():
    assert in_tangent_cone(GROUND, X)
    assert not in_tangent_cone(GROUND, np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        in_tangent_cone(GROUND, np.array([[0, 1], [0, 0]], dtype=complex))


def test_cone_interior_all_traceless(rng):
    rho = random_density(rng, 3)
    x = random_hermitian(rng, 3)
    x -= np.trace(x).real / 3 * np.eye(3)
    assert in_tangent_cone(rho, x)


def test_cone_closed_under_sums(rng):
    rho = random_density(rng, 4, rank=2)
    x1 = random_cone_element(rng, rho, 4)
    x2 = random_cone_element(rng, rho, 4)
    assert in_tangent_cone(rho, 0.7 * x1 + 1.3 * x2, 1e-8)


def test_cone_unitary_covariance(rng):
    rho = random_density(rng, 3, rank=2)
    x = random_cone_element(rng, rho, 3)
    U = haar_unitary(3, rng)
    assert in_tangent_cone(rho, x, 1e-8) == in_tangent_cone(
        U @ rho @ dag(U), U @ x @ dag(U), 1e-8)


def test_linear_admissible_examples():
    Z = np.diag([1.0, -1.0]).astype(complex)
    assert math.isclose(linear_admissible(np.eye(2) / 2, Z / 2), 1.0,
                        abs_tol=1e-9)
    assert linear_admissible(GROUND, X) is None
    assert linear_admissible(GROUND, np.zeros((2, 2))) == math.inf


def test_second_order_witness_nonconv():
    w = second_order_witness(GROUND, X)
    assert np.allclose(w["x2"], np.diag([-2.0, 2.0]), atol=1e-10)
    for eps in (0.05, 0.1, 0.2):
        M = GROUND + eps * X + eps ** 2 * w["x2"]
        assert abs(np.linalg.det(M).real - eps ** 2 * (1 - 4 * eps ** 2)) <= 1e-12


def test_second_order_witness_strict_perp_block(rng):
    rho = np.diag([0.6, 0.4, 0.0]).astype(complex)
    x = np.diag([-0.5, -0.5, 1.0]).astype(complex)  # x22 strictly positive
    w = second_order_witness(rho, x)
    assert np.max(np.abs(w["x2"])) <= 1e-12
    assert w["eps_max"] > 0


def test_second_order_witness_random_rank_deficient(rng):
    for _ in range(5):
        rho = random_density(rng, 4, rank=2)
        x = random_cone_element(rng, rho, 4)
        w = second_order_witness(rho, x, tol=1e-8)
        assert w["eps_max"] > 0


def test_lift_interior_replacer(rng):
    rho = random_density(rng, 3)
    x = random_hermitian(rng, 3)
    x -= np.trace(x).real / 3 * np.eye(3)
    cert = lift(rho, x)
    assert cert.residual <= 1e-10
    assert len(cert.lindbladian.jumps) > 0
    assert np.max(np.abs(cert.lindbladian.hamiltonian)) <= 1e-12


def test_lift_pure_state_hamiltonian_cross():
    cert = lift(GROUND, X)
    assert cert.residual <= 1e-12
    assert np.max(np.abs(apply(cert.lindbladian, GROUND) - X)) <= 1e-12


def test_lift_spectral_jumps():
    rho = np.diag([1.0, 0.0, 0.0]).astype(complex)
    x = np.diag([-1.0, 0.5, 0.5]).astype(complex)
    cert = lift(rho, x)
    assert cert.residual <= 1e-10
    assert cert.cp_margin >= -1e-9


def test_lift_round_trip(rng):
    for d in (2, 3, 4, 8):
        for i in range(8):
            rank = d if i % 2 == 0 else max(1, d // 2)
            rho = random_density(rng, d, rank)
            x = random_cone_element(rng, rho, d)
            cert = lift(rho, x, tol=1e-9)
            assert cert.residual <= 1e-8
            assert cert.cp_margin >= -1e-9


def test_lift_rejects_non_cone():
    with pytest.raises(ValueError):
        lift(GROUND, np.diag([1.0, -1.0]))


def test_central_differences_quadratic():
    ts = np.linspace(0, 1, 9)
    states = [np.diag([t ** 2, 1 - t ** 2]).astype(complex) for t in ts]
    derivs = central_differences(PathSample(ts, states))
    for t, d in zip(ts, derivs):
        assert np.max(np.abs(d - np.diag([2 * t, -2 * t]))) <= 1e-10


def test_lift_path_constant():
    ts = np.linspace(0, 1, 5)
    rho = np.diag([0.6, 0.4]).astype(complex)
    rep = lift_path(PathSample(ts, [rho] * 5))
    assert rep["reconstruction_error"] <= 1e-10
    for L in rep["generators"]:
        assert np.max(np.abs(apply(L, rho))) <= 1e-10


def test_lift_path_self_consistency(rng):
    rho0 = random_density(rng, 2)
    from lindreach.lindblad import replacer_lindbladian
    L = replacer_lindbladian(np.eye(2, dtype=complex) / 2)

    def run(gen, n):
        ts = np.linspace(0, 1, n)
        states = [hermitize(apply_superop(channel_superop(gen, t), rho0))
                  for t in ts]
        return lift_path(PathSample(ts, states))["reconstruction_error"]

    assert run(L, 64) <= 1e-3
    # error shrinks roughly like the step size for a generic generator
    Lr = Lindbladian(2, hamiltonian=random_hermitian(rng, 2),
                     jumps=[JumpTerm(random_complex(rng, 2), 0.3)])
    ratio = run(Lr, 32) / run(Lr, 64)
    assert 1.5 <= ratio <= 2.8


def test_lift_path_boundary_integrability():
    # lambda_min(t) = (1 - t) / 2 along a straight diagonal path
    ts = np.linspace(0, 0.99, 200)
    states = [np.diag([(1 + t) / 2, (1 - t) / 2]).astype(complex) for t in ts]
    rep = lift_path(PathSample(ts, states))
    exact = 2 * math.log(1 / (1 - 0.99))  # integral of 2/(1-t)
    assert abs(rep["integrability"]["int_inv_lambda"] - exact) / exact < 0.05
    exact_sqrt = (2 * math.sqrt(2)) * (1 - math.sqrt(1 - 0.99))
    assert abs(rep["integrability"]["int_inv_sqrt_lambda"] - exact_sqrt) / exact_sqrt < 0.05


def test_converse_lindblad_applications_in_cone(rng):
    for _ in range(30):
        d = int(rng.integers(2, 5))
        rho = random_density(rng, d, rank=int(rng.integers(1, d + 1)))
        x = random_cone_element(rng, rho, d)
        assert in_tangent_cone(rho, x, 1e-8)
