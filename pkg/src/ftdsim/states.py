"""Pure and mixed bipartite states, Schmidt analysis, phase-family product test."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .tensor_algebra import (
    BipartiteDims,
    DimensionError,
    as_matrix,
    dagger,
    hermitian_spectrum,
    hermiticity_defect,
    is_psd,
)

NORM_TOL = 1e-10
STATE_TOL = 1e-9
SCHMIDT_TOL = 1e-8
POLY_TOL = 1e-9


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: BipartiteDims

    def __post_init__(self):
        dims = BipartiteDims.of(self.dims)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != dims.total:
            raise DimensionError(
                f"{amps.size} amplitudes do not match dims {dims.as_tuple()}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims) -> "PureState":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(amps / norm, dims)

    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``d_A x d_B`` so that ``psi = sum_jk C[j,k] |j>|k>``."""
        return self.amplitudes.reshape(self.dims.d_a, self.dims.d_b)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, np.conj(self.amplitudes))

    def density(self) -> "DensityOperator":
        return DensityOperator(self.projector(), self.dims)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    dims: BipartiteDims

    def __post_init__(self):
        dims = BipartiteDims.of(self.dims)
        m = as_matrix(self.matrix).copy()
        n = dims.total
        if m.shape != (n, n):
            raise DimensionError(f"matrix {m.shape} does not match dims {dims.as_tuple()}")
        defect = hermiticity_defect(m)
        if defect > STATE_TOL:
            raise InvalidStateError(f"density matrix not Hermitian (defect {defect:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"density matrix trace is {tr!r}")
        if not is_psd(0.5 * (m + dagger(m)), STATE_TOL):
            lmin = hermitian_spectrum(m)[0]
            raise InvalidStateError(f"density matrix has eigenvalue {lmin!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def maximally_mixed(dims) -> DensityOperator:
    dims = BipartiteDims.of(dims)
    return DensityOperator(np.eye(dims.total) / dims.total, dims)


def product_state(a, b) -> PureState:
    """``|a> (x) |b>`` from two local vectors (normalized on the way in)."""
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    return PureState.normalized(np.kron(a, b), (a.size, b.size))


def basis_state(j: int, k: int, dims) -> PureState:
    dims = BipartiteDims.of(dims)
    amps = np.zeros(dims.total, dtype=np.complex128)
    amps[j * dims.d_b + k] = 1.0
    return PureState(amps, dims)


_S = 1.0 / np.sqrt(2.0)
BELL_AMPLITUDES = {
    "phi+": np.array([_S, 0, 0, _S], dtype=np.complex128),
    "phi-": np.array([_S, 0, 0, -_S], dtype=np.complex128),
    "psi+": np.array([0, _S, _S, 0], dtype=np.complex128),
    "psi-": np.array([0, _S, -_S, 0], dtype=np.complex128),
}
BELL_NAMES = tuple(BELL_AMPLITUDES)


def bell_state(which: str = "phi+") -> PureState:
    """Two-qubit Bell vector: ``phi+/-`` = (|00> +/- |11>)/sqrt2, ``psi+/-`` = (|01> +/- |10>)/sqrt2."""
    key = which.lower().replace("φ", "phi").replace("ψ", "psi").replace("₊", "+").replace("₋", "-")
    try:
        return PureState(BELL_AMPLITUDES[key], (2, 2))
    except KeyError:
        raise ValueError(f"unknown Bell state {which!r}; choose from {BELL_NAMES}") from None


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns
    right_vectors: np.ndarray  # columns
    tol: float = field(default=SCHMIDT_TOL)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.coefficients > self.tol))

    def reconstruct(self) -> np.ndarray:
        """Coefficient matrix ``sum_i c_i u_i v_i^T``."""
        return (self.left_vectors * self.coefficients) @ self.right_vectors.T


def schmidt_decompose(psi: PureState, tol: float = SCHMIDT_TOL) -> SchmidtDecomposition:
    u, s, vh = np.linalg.svd(psi.coefficient_matrix(), full_matrices=False)
    return SchmidtDecomposition(s, u, vh.T, tol)


def is_product(psi: PureState, tol: float = SCHMIDT_TOL) -> bool:
    return schmidt_decompose(psi, tol).rank <= 1


def second_schmidt_coefficient(psi: PureState) -> float:
    s = np.linalg.svd(psi.coefficient_matrix(), compute_uv=False)
    return float(s[1]) if s.size > 1 else 0.0


def isotropic_mix(rho: DensityOperator, lam: float) -> DensityOperator:
    """``lam * I/(d_A d_B) + (1 - lam) * rho``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {lam!r}")
    n = rho.dims.total
    return DensityOperator(lam * np.eye(n) / n + (1.0 - lam) * rho.matrix, rho.dims)


def werner_state(p: float, which: str = "phi+") -> DensityOperator:
    """``p * |Bell><Bell| + (1 - p) * I/4``."""
    return isotropic_mix(bell_state(which).density(), 1.0 - p)


def _minor_polynomials(m_phi: np.ndarray, m_psi: np.ndarray) -> np.ndarray:
    """Coefficients (z^0, z^1, z^2) of every 2x2 minor of ``m_phi + z * m_psi``."""
    rows = list(combinations(range(m_phi.shape[0]), 2))
    cols = list(combinations(range(m_phi.shape[1]), 2))
    out = np.empty((len(rows) * len(cols), 3), dtype=np.complex128)
    n = 0
    for i, i2 in rows:
        for k, k2 in cols:
            a, b, c, d = m_phi[i, k], m_phi[i, k2], m_phi[i2, k], m_phi[i2, k2]
            pa, pb, pc, pd = m_psi[i, k], m_psi[i, k2], m_psi[i2, k], m_psi[i2, k2]
            out[n] = (a * d - b * c, a * pd + pa * d - b * pc - pb * c, pa * pd - pb * pc)
            n += 1
    return out


def phase_family_all_product(phi: PureState, psi: PureState, tol: float = POLY_TOL) -> bool:
    """True iff ``phi + z psi`` has Schmidt rank <= 1 for every unimodular ``z``.

    Every 2x2 minor of the reshaped coefficient matrix of ``phi + z psi`` is a
    polynomial of degree at most two in ``z``. A nonzero such polynomial has at
    most two roots, so the minors vanish on the whole unit circle exactly when
    all their coefficients do.
    """
    if phi.dims != psi.dims:
        raise DimensionError(f"dims differ: {phi.dims.as_tuple()} vs {psi.dims.as_tuple()}")
    m_phi = phi.coefficient_matrix() / np.linalg.norm(phi.amplitudes)
    m_psi = psi.coefficient_matrix() / np.linalg.norm(psi.amplitudes)
    coeffs = _minor_polynomials(m_phi, m_psi)
    return bool(np.all(np.abs(coeffs) <= tol))


def haar_state(dims, rng: np.random.Generator) -> PureState:
    dims = BipartiteDims.of(dims)
    v = rng.normal(size=dims.total) + 1j * rng.normal(size=dims.total)
    return PureState.normalized(v, dims)


def haar_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with the R-phase fix."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(dims, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state from a Ginibre matrix ``G G^dagger / Tr``."""
    dims = BipartiteDims.of(dims)
    n = dims.total
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    m = g @ dagger(g)
    return DensityOperator(m / np.trace(m).real, dims)
