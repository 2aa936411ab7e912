import numpy as np
import pytest

import oracles
from ftdsim.channels import (
    CNOT,
    PAULI,
    BudgetExhausted,
    Channel,
    NotTracePreservingError,
    NoWitnessExists,
    UnitaryTag,
    amplitude_damping,
    apply,
    channel_from_superoperator,
    classify_product_preserving_unitary,
    constant_channel,
    depolarizing_channel,
    find_entangled_to_product_witness,
    is_pure_state_preserving,
    is_unital,
    one_sided_dephasing,
    random_unitary_mixture,
    swap_operator,
)
from ftdsim.states import bell_state, is_product, isotropic_mix, random_density
from ftdsim.tensor_algebra import DimensionError


def test_trace_preservation_checked():
    with pytest.raises(NotTracePreservingError):
        Channel((np.eye(2) * 0.9,))
    with pytest.raises(DimensionError):
        Channel((np.eye(2), np.eye(3)))


def test_apply_examples():
    rho = bell_state().density()
    assert np.allclose(apply(Channel.identity((2, 2)), rho).matrix, rho.matrix)
    got = apply(depolarizing_channel(0.3), rho).matrix
    assert np.allclose(got, isotropic_mix(rho, 0.3).matrix, atol=1e-12)
    z1 = np.kron(PAULI["Z"], np.eye(2))
    want = 0.7 * rho.matrix + 0.3 * z1 @ rho.matrix @ z1
    assert np.allclose(apply(one_sided_dephasing(0.3), rho).matrix, want, atol=1e-12)


def test_apply_keeps_states_valid():
    rng = np.random.default_rng(1)
    for k in range(1000):
        us = [oracles.haar_unitary(4, rng) for _ in range(1 + k % 3)]
        ch = random_unitary_mixture(us, rng.uniform(0.1, 1, size=len(us)), (2, 2))
        out = ch(random_density((2, 2), rng).matrix)
        assert abs(np.trace(out) - 1) <= 1e-10
        assert np.linalg.eigvalsh(out)[0] >= -1e-9


def test_superoperator_round_trip():
    rng = np.random.default_rng(2)
    ch = depolarizing_channel(0.4)
    back = channel_from_superoperator(ch.superoperator(), (2, 2))
    rho = random_density((2, 2), rng).matrix
    assert np.allclose(back(rho), ch(rho), atol=1e-12)


def test_unital_examples():
    assert is_unital(Channel.unitary(oracles.haar_unitary(4, np.random.default_rng(0))))
    assert is_unital(one_sided_dephasing(0.5))
    assert not is_unital(amplitude_damping(0.5))


def test_pure_state_preserving_examples():
    u = oracles.haar_unitary(4, np.random.default_rng(0))
    assert is_pure_state_preserving(Channel.unitary(u)).preserving
    res = is_pure_state_preserving(one_sided_dephasing(0.5))
    assert not res.preserving
    img = one_sided_dephasing(0.5)(np.outer(res.witness, res.witness.conj()))
    assert np.real(np.trace(img @ img)) < 1 - 1e-6
    assert is_pure_state_preserving(constant_channel([0, 1, 0, 0])).preserving
    with pytest.raises(ValueError):
        is_pure_state_preserving(Channel.identity((2, 2)), trials=0)


def test_swap_examples():
    s = swap_operator((2, 2))
    assert np.array_equal(s, oracles.swap_loops(2))
    assert np.array_equal(s @ np.array([0, 1, 0, 0]), [0, 0, 1, 0])
    assert np.array_equal(s @ s, np.eye(4))
    psi_m = bell_state("psi-").amplitudes
    assert np.allclose(s @ psi_m, -psi_m)
    with pytest.raises(DimensionError):
        swap_operator((2, 3))


def test_classify_examples():
    rng = np.random.default_rng(5)
    ua, ub = oracles.haar_unitary(2, rng), oracles.haar_unitary(3, rng)
    cls = classify_product_preserving_unitary(np.kron(ua, ub), (2, 3))
    assert cls.tag is UnitaryTag.LOCAL
    assert oracles.phase_residual(np.kron(*cls.factors), np.kron(ua, ub)) <= 1e-8
    assert classify_product_preserving_unitary(swap_operator((3, 3)), (3, 3)).tag is UnitaryTag.LOCAL_SWAP
    assert classify_product_preserving_unitary(CNOT, (2, 2)).tag is UnitaryTag.NOT_PRODUCT_PRESERVING
    # CNOT sends |+0> to a Bell state
    plus0 = np.kron([1, 1], [1, 0]) / np.sqrt(2)
    assert oracles.second_schmidt(CNOT @ plus0, 2, 2) > 0.7
    with pytest.raises(ValueError):
        classify_product_preserving_unitary(2 * np.eye(4), (2, 2))


def test_global_haar_on_4x4_never_local():
    rng = np.random.default_rng(6)
    for _ in range(200):
        assert classify_product_preserving_unitary(oracles.haar_unitary(4, rng), (2, 2)).tag is UnitaryTag.NOT_PRODUCT_PRESERVING


def test_witness_cnot():
    psi_e, psi_p = find_entangled_to_product_witness(CNOT, (2, 2))
    assert oracles.phase_residual(psi_e.amplitudes, oracles.phi_plus()) <= 1e-9
    assert oracles.phase_residual(psi_p.amplitudes, np.kron([1, 1], [1, 0]) / np.sqrt(2)) <= 1e-9


def test_witness_refused_for_local_and_swap():
    rng = np.random.default_rng(0)
    with pytest.raises(NoWitnessExists):
        find_entangled_to_product_witness(np.kron(oracles.haar_unitary(2, rng), oracles.haar_unitary(2, rng)), (2, 2))
    with pytest.raises(NoWitnessExists):
        find_entangled_to_product_witness(swap_operator((2, 2)), (2, 2))


def test_witness_properties_random():
    rng = np.random.default_rng(12)
    for dims in [(2, 2)] * 15 + [(2, 3)] * 10 + [(3, 3)] * 5:
        u = oracles.haar_unitary(dims[0] * dims[1], rng)
        psi_e, psi_p = find_entangled_to_product_witness(u, dims)
        assert is_product(psi_p) and not is_product(psi_e)
        assert oracles.phase_residual(u @ psi_e.amplitudes, psi_p.amplitudes) <= 1e-9


def test_budget_exhausted_reports_best():
    # a unitary that is barely non-local: every preimage is nearly product
    eps = 1e-7
    u = np.diag(np.exp(1j * np.array([0, 0, 0, eps])))
    with pytest.raises(BudgetExhausted) as info:
        find_entangled_to_product_witness(u, (2, 2), budget=20)
    assert info.value.tried >= 20
    assert info.value.best_gap <= 1e-4
