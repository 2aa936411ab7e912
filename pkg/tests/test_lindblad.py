import numpy as np
import pytest

import oracles
from ftdsim.channels import PAULI, SIGMA_MINUS, SIGMA_PLUS
from ftdsim.lindblad import (
    IntegrationError,
    LindbladGenerator,
    Trajectory,
    depolarizing_generator,
    integrate,
    is_unital_generator,
    lindblad_rhs,
    propagate_matrix,
    purity_derivative_at_pure,
    random_generator,
)
from ftdsim.states import basis_state, bell_state, haar_state
from ftdsim.tensor_algebra import DimensionError

Z1 = np.kron(PAULI["Z"], np.eye(2))


def test_generator_validation():
    with pytest.raises(ValueError):
        LindbladGenerator(np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionError):
        LindbladGenerator(np.zeros((4, 4)), (np.eye(2),))
    with pytest.raises(DimensionError):
        LindbladGenerator(np.zeros((4, 4)), (), (2, 3))


def test_rhs_examples():
    rho = bell_state().density()
    assert np.allclose(lindblad_rhs(LindbladGenerator(np.zeros((4, 4))), rho), 0)
    rng = np.random.default_rng(0)
    h = random_generator((2, 2), rng).hamiltonian
    m = rho.matrix
    assert np.allclose(lindblad_rhs(LindbladGenerator(h), rho), -1j * (h @ m - m @ h))
    got = lindblad_rhs(LindbladGenerator(np.zeros((4, 4)), (Z1,)), rho)
    assert np.allclose(got, Z1 @ m @ Z1 - m, atol=1e-15)
    with pytest.raises(DimensionError):
        lindblad_rhs(LindbladGenerator(np.zeros((2, 2))), rho)


def test_unital_generator_examples():
    z = np.zeros((4, 4))
    assert is_unital_generator(LindbladGenerator(z, (Z1,)))
    lower = np.kron(SIGMA_MINUS, np.eye(2))
    raise_ = np.kron(SIGMA_PLUS, np.eye(2))
    assert not is_unital_generator(LindbladGenerator(z, (lower,)))
    assert is_unital_generator(LindbladGenerator(z, (lower, raise_)))


def test_purity_derivative_examples():
    gen = LindbladGenerator(np.zeros((4, 4)), (Z1,), (2, 2))
    assert purity_derivative_at_pure(gen, basis_state(0, 0, (2, 2))) == pytest.approx(0, abs=1e-15)
    assert purity_derivative_at_pure(gen, bell_state()) == pytest.approx(-2, abs=1e-12)
    traj = integrate(gen, bell_state().density(), 1e-4, dt=1e-4)
    fd = (traj.states[-1].purity() - 1) / 1e-4
    assert fd == pytest.approx(-2, abs=1e-3)


def test_lemma_both_directions():
    rng = np.random.default_rng(3)
    for _ in range(10):
        dims = (2, 2)
        h = random_generator(dims, rng).hamiltonian
        scalars = LindbladGenerator(h, (0.4j * np.eye(4), -1.3 * np.eye(4)), dims)
        for _ in range(100):
            assert abs(purity_derivative_at_pure(scalars, haar_state(dims, rng))) <= 1e-12
        generic = random_generator(dims, rng, n_jumps=1)
        vals = [purity_derivative_at_pure(generic, haar_state(dims, rng)) for _ in range(100)]
        assert max(vals) <= 1e-12
        assert min(vals) < -1e-6


def test_integrate_examples():
    rho0 = bell_state().density()
    traj = integrate(LindbladGenerator(np.zeros((4, 4)), (), (2, 2)), rho0, 1.0, dt=0.1)
    assert all(np.allclose(s.matrix, rho0.matrix) for s in traj.states)
    traj = integrate(depolarizing_generator(), rho0, 2.0, dt=1e-3)
    for t, s in zip(traj.times[::100], traj.states[::100]):
        assert np.max(np.abs(s.matrix - oracles.depolarized_bell(t))) <= 1e-6
    rng = np.random.default_rng(1)
    gen = LindbladGenerator(random_generator((2, 2), rng).hamiltonian, (), (2, 2))
    p = integrate(gen, haar_state((2, 2), rng).density(), 5.0, dt=1e-3).purities()
    assert np.max(np.abs(p - 1)) <= 1e-8


def test_grid_and_argument_checks():
    rho0 = bell_state().density()
    traj = integrate(depolarizing_generator(), rho0, 0.35, dt=0.1)
    assert len(traj) == 5 and traj.times[-1] == pytest.approx(0.35)
    assert np.all(np.diff(traj.times) > 0)
    with pytest.raises(ValueError):
        integrate(depolarizing_generator(), rho0, 1.0, dt=2.0)
    with pytest.raises(ValueError):
        integrate(depolarizing_generator(), rho0, 0.0)
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [rho0, rho0])


def test_unstable_step_raises_with_step_number():
    with pytest.raises(IntegrationError) as info:
        integrate(depolarizing_generator(100.0), bell_state().density(), 1.0, dt=0.1)
    assert info.value.step >= 1
    assert "step" in str(info.value)


def test_semigroup_property():
    rng = np.random.default_rng(8)
    for dims in [(2, 2), (2, 3)]:
        gen = random_generator(dims, rng)
        rho0 = haar_state(dims, rng).density()
        whole = integrate(gen, rho0, 1.0, dt=1e-3).states[-1]
        half = integrate(gen, rho0, 0.4, dt=1e-3).states[-1]
        rest = integrate(gen, half, 0.6, dt=1e-3).states[-1]
        assert np.max(np.abs(whole.matrix - rest.matrix)) <= 1e-6


def test_propagator_matches_stepping():
    rng = np.random.default_rng(9)
    gen = random_generator((2, 2), rng)
    rho0 = haar_state((2, 2), rng).density()
    stepped = integrate(gen, rho0, 0.5, dt=1e-2).states[-1].matrix
    direct = (propagate_matrix(gen, 0.5, 1e-2) @ rho0.matrix.reshape(-1)).reshape(4, 4)
    assert np.allclose(stepped, direct, atol=1e-12)
