import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ftdsim.tensor_algebra import (
    BipartiteDims,
    DimensionError,
    hermitian_eig,
    hermitian_spectrum,
    is_psd,
    kron,
    partial_trace,
    partial_transpose,
    phase_distance,
)

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1.0, -1.0])

seeds = st.integers(0, 2**32 - 1)
dim_pairs = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)])


def rand_matrix(rng, r, c):
    return rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))


def rand_herm(rng, n):
    a = rand_matrix(rng, n, n)
    return a + a.conj().T


def rand_density(rng, n):
    g = rand_matrix(rng, n, n)
    m = g @ g.conj().T
    return m / np.trace(m)


def test_dims_validation():
    assert BipartiteDims(2, 3).total == 6
    with pytest.raises(DimensionError):
        BipartiteDims(1, 3)
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 3))


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(X, X) @ np.array([1, 0, 0, 0]), [0, 0, 0, 1])
    a = np.array([[2.0, 1.0], [0.0, 1.0]])
    b = np.arange(9.0).reshape(3, 3)
    k = kron(a, b)
    assert k.shape == (6, 6)
    assert np.array_equal(k[:3, :3], 2 * b)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_kron_matches_loops_and_algebra(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rand_matrix(rng, 2, 3), rand_matrix(rng, 3, 2), rand_matrix(rng, 2, 2)
    assert np.allclose(kron(a, b), oracles.kron_loops(a, b), atol=1e-12)
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    b2 = rand_matrix(rng, 3, 2)
    assert np.allclose(kron(a, b + 2j * b2), kron(a, b) + 2j * kron(a, b2), atol=1e-12)
    sa, sb = rand_matrix(rng, 3, 3), rand_matrix(rng, 2, 2)
    assert abs(np.trace(kron(sa, sb)) - np.trace(sa) * np.trace(sb)) <= 1e-10


def test_partial_trace_examples():
    v = oracles.phi_plus()
    assert np.allclose(partial_trace(np.outer(v, v.conj()), (2, 2), "B"), np.eye(2) / 2)
    assert np.allclose(partial_trace(np.eye(4) / 4, (2, 2), "A"), np.eye(2) / 2)


@settings(max_examples=60, deadline=None)
@given(seeds, dim_pairs)
def test_partial_trace_and_transpose_match_loops(seed, dims):
    rng = np.random.default_rng(seed)
    da, db = dims
    rho = rand_density(rng, da * db)
    assert np.allclose(partial_trace(rho, dims, "B"), oracles.ptrace_b_loops(rho, da, db), atol=1e-12)
    assert np.allclose(partial_trace(rho, dims, "A"), oracles.ptrace_a_loops(rho, da, db), atol=1e-12)
    assert np.allclose(partial_transpose(rho, dims), oracles.pt_loops(rho, da, db), atol=1e-12)
    assert np.allclose(partial_transpose(partial_transpose(rho, dims), dims), rho)
    ra, rb = rand_density(rng, da), rand_density(rng, db)
    assert np.allclose(partial_trace(kron(ra, rb), dims, "B"), ra, atol=1e-12)
    assert np.allclose(partial_transpose(kron(ra, rb), dims), kron(ra, rb.T), atol=1e-12)


def test_bell_pt_spectrum():
    v = oracles.phi_plus()
    w = hermitian_spectrum(partial_transpose(np.outer(v, v.conj()), (2, 2)))
    assert np.allclose(w, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_spectrum_examples():
    assert np.allclose(hermitian_spectrum(np.eye(4)), [1, 1, 1, 1])
    assert np.allclose(hermitian_spectrum(Z), [-1, 1])


@settings(max_examples=80, deadline=None)
@given(seeds, st.integers(1, 12))
def test_jacobi_against_lapack(seed, n):
    rng = np.random.default_rng(seed)
    h = rand_herm(rng, n)
    w, v = hermitian_eig(h)
    assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-10 * max(1.0, np.abs(w).max()))
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.allclose(h @ v, v * w, atol=1e-9 * max(1.0, np.abs(w).max()))


def test_jacobi_36_and_degenerate():
    rng = np.random.default_rng(3)
    h = rand_herm(rng, 36)
    assert np.allclose(hermitian_spectrum(h), np.linalg.eigvalsh(h), atol=1e-9)
    u = oracles.haar_unitary(6, rng)
    d = u @ np.diag([1, 1, 1, 2, 2, 3.0]) @ u.conj().T
    assert np.allclose(hermitian_spectrum(d), [1, 1, 1, 2, 2, 3], atol=1e-10)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


@settings(max_examples=50, deadline=None)
@given(seeds, dim_pairs)
def test_spectrum_sums_and_unitary_invariance(seed, dims):
    rng = np.random.default_rng(seed)
    n = dims[0] * dims[1]
    rho = rand_density(rng, n)
    assert abs(hermitian_spectrum(rho).sum() - 1) <= 1e-10
    assert abs(hermitian_spectrum(partial_transpose(rho, dims)).sum() - 1) <= 1e-10
    h = rand_herm(rng, n)
    u = oracles.haar_unitary(n, rng)
    assert np.allclose(hermitian_spectrum(u @ h @ u.conj().T), hermitian_spectrum(h), atol=1e-10)


def test_is_psd_and_phase_distance():
    assert is_psd(np.diag([0.0, 1.0]), 1e-9)
    assert not is_psd(np.diag([-1e-6, 1.0]), 1e-9)
    rng = np.random.default_rng(0)
    u = oracles.haar_unitary(3, rng)
    assert phase_distance(u, np.exp(0.7j) * u) <= 1e-12
    assert phase_distance(u, oracles.haar_unitary(3, rng)) > 1e-3
