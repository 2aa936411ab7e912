"""CPTP maps in Kraus form and the structural results about them.

Covers trace preservation / unitality / pure-state preservation checks,
the SWAP operator, factorization of product-preserving unitaries into a
local part (optionally followed by SWAP), recovery of the unitary behind a
unital pure-state-preserving channel, and the search for an entangled state
that a non-local unitary sends to a product state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .states import (
    SCHMIDT_TOL,
    DensityOperator,
    PureState,
    haar_vector,
    second_schmidt_coefficient,
)
from .tensor_algebra import (
    BipartiteDims,
    DimensionError,
    as_matrix,
    dagger,
    hermitian_eig,
    is_unitary,
    kron,
)

TP_TOL = 1e-9
UNITAL_TOL = 1e-9
UNITARY_TOL = 1e-9
PURITY_TOL = 1e-9
FACTOR_TOL = 1e-8
WITNESS_TOL = 1e-4
EIGGAP_TOL = 1e-6
RECONSTRUCT_TOL = 1e-8
DEFAULT_PURITY_TRIALS = 500

# ---------------------------------------------------------------- exceptions


class ChannelError(ValueError):
    pass


class NotTracePreservingError(ChannelError):
    pass


class NotUnitaryError(ChannelError):
    pass


class NotUnitalError(ChannelError):
    pass


class NotPurePreservingError(ChannelError):
    def __init__(self, message: str, witness: np.ndarray):
        super().__init__(message)
        self.witness = witness


class PhaseInconsistentError(ChannelError):
    pass


class NoWitnessExists(Exception):
    """The unitary is local or local-then-SWAP, so it keeps entangled states entangled."""

    def __init__(self, tag: "UnitaryTag"):
        super().__init__(f"unitary is {tag.value}; it maps no entangled state to a product state")
        self.tag = tag


class BudgetExhausted(Exception):
    def __init__(self, best_product: PureState, best_gap: float, tried: int):
        super().__init__(
            f"no witness after {tried} candidates; best second Schmidt coefficient {best_gap:.3g}"
        )
        self.best_product = best_product
        self.best_gap = best_gap
        self.tried = tried


# ---------------------------------------------------------------- channel


@dataclass(frozen=True, eq=False)
class Channel:
    """Kraus representation ``rho -> sum_i K_i rho K_i^dagger``.

    ``dims`` is optional; single-system channels leave it ``None``.
    """

    kraus: tuple
    dims: BipartiteDims | None = None

    def __post_init__(self):
        ops = tuple(as_matrix(k).copy() for k in self.kraus)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimensionError("Kraus operators must be square and of equal size")
            k.setflags(write=False)
        dims = None if self.dims is None else BipartiteDims.of(self.dims)
        if dims is not None and dims.total != d:
            raise DimensionError(f"Kraus size {d} does not match dims {dims.as_tuple()}")
        defect = float(np.max(np.abs(sum(dagger(k) @ k for k in ops) - np.eye(d))))
        if defect > TP_TOL:
            raise NotTracePreservingError(f"sum K^dagger K deviates from I by {defect:.3g}")
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, m: np.ndarray) -> np.ndarray:
        """Action on an arbitrary square matrix (no state validation)."""
        return sum(k @ m @ dagger(k) for k in self.kraus)

    @classmethod
    def unitary(cls, u, dims=None) -> "Channel":
        return cls((u,), dims)

    @classmethod
    def identity(cls, dims) -> "Channel":
        dims = BipartiteDims.of(dims)
        return cls((np.eye(dims.total),), dims)

    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major ``vec(rho)``: ``sum_i K_i (x) conj(K_i)``."""
        return sum(np.kron(k, np.conj(k)) for k in self.kraus)


def channel_from_superoperator(s: np.ndarray, dims=None, tol: float = 1e-12) -> Channel:
    """Kraus form from a superoperator on row-major ``vec``, via its Choi matrix."""
    d = int(round(np.sqrt(s.shape[0])))
    choi = s.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    w, v = hermitian_eig(0.5 * (choi + dagger(choi)), tol=1e-6)
    ops = [np.sqrt(wi) * v[:, i].reshape(d, d) for i, wi in enumerate(w) if wi > tol]
    ops = _renormalize_tp(ops)
    return Channel(tuple(ops), dims)


def _renormalize_tp(ops: list) -> list:
    # Integrator roundoff leaves sum K^dagger K = I + O(1e-12); fold it back.
    g = sum(dagger(k) @ k for k in ops)
    w, v = hermitian_eig(g)
    g_inv_sqrt = (v / np.sqrt(w)) @ dagger(v)
    return [k @ g_inv_sqrt for k in ops]


def apply(ch: Channel, rho: DensityOperator) -> DensityOperator:
    if ch.dim != rho.matrix.shape[0]:
        raise DimensionError(f"channel acts on dimension {ch.dim}, state has {rho.matrix.shape[0]}")
    out = ch(rho.matrix)
    return DensityOperator(0.5 * (out + dagger(out)), rho.dims)


def is_unital(ch: Channel, tol: float = UNITAL_TOL) -> bool:
    s = sum(k @ dagger(k) for k in ch.kraus)
    return float(np.max(np.abs(s - np.eye(ch.dim)))) <= tol


def effective_unitary(ch: Channel, tol: float = 1e-8) -> np.ndarray | None:
    """The unitary ``V`` if every Kraus operator is a multiple of one ``V``, else ``None``."""
    stack = np.array([k.reshape(-1) for k in ch.kraus])
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    if s.size > 1 and s[1] > tol * max(s[0], 1.0):
        return None
    v = vh[0].reshape(ch.dim, ch.dim)
    v = v * np.sqrt(ch.dim) / np.linalg.norm(v)
    if not is_unitary(v, 1e-7):
        return None
    return v


# ---------------------------------------------------------------- named channels

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.T.copy()
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


def two_qubit_paulis(include_identity: bool = True) -> list[np.ndarray]:
    names = "IXYZ"
    ops = [kron(PAULI[a], PAULI[b]) for a in names for b in names]
    return ops if include_identity else ops[1:]


def depolarizing_channel(q: float) -> Channel:
    """Two-qubit map ``rho -> (1 - q) rho + q I/4`` built from the 16 Paulis."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    paulis = two_qubit_paulis()
    w0 = 1.0 - 15.0 * q / 16.0
    ops = [np.sqrt(w0) * paulis[0]] + [np.sqrt(q / 16.0) * p for p in paulis[1:]]
    return Channel(tuple(ops), (2, 2))


def one_sided_dephasing(q: float) -> Channel:
    """Kraus ``{sqrt(1-q) I, sqrt(q) Z (x) I}`` on a qubit pair."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    i4 = np.eye(4)
    return Channel((np.sqrt(1.0 - q) * i4, np.sqrt(q) * kron(PAULI["Z"], PAULI["I"])), (2, 2))


def amplitude_damping(gamma: float) -> Channel:
    """Single-qubit decay ``|1> -> |0>`` with probability ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.array([[1, 0], [0, np.sqrt(1.0 - gamma)]], dtype=np.complex128)
    k1 = np.sqrt(gamma) * SIGMA_MINUS
    return Channel((k0, k1))


def constant_channel(phi0, dims=None) -> Channel:
    """``rho -> |phi0><phi0|`` with Kraus operators ``|phi0><k|``."""
    phi0 = np.asarray(phi0, dtype=np.complex128).reshape(-1)
    phi0 = phi0 / np.linalg.norm(phi0)
    d = phi0.size
    ops = tuple(np.outer(phi0, np.eye(d)[k]) for k in range(d))
    return Channel(ops, dims)


def random_unitary_mixture(unitaries: Sequence[np.ndarray], weights: Sequence[float], dims=None) -> Channel:
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    return Channel(tuple(np.sqrt(w) * u for w, u in zip(weights, unitaries)), dims)


# ---------------------------------------------------------------- purity


def _purity(m: np.ndarray) -> float:
    return float(np.real(np.vdot(m, m)))


def proof_probe_states(d: int) -> list[np.ndarray]:
    """Basis vectors ``|j>`` and the pair superpositions ``(|j> + |k>)/sqrt2``."""
    eye = np.eye(d, dtype=np.complex128)
    states = [eye[j] for j in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            states.append((eye[j] + eye[k]) / np.sqrt(2.0))
    return states


class PurityCheck(NamedTuple):
    preserving: bool
    witness: np.ndarray | None
    checked: int


def is_pure_state_preserving(
    ch: Channel,
    trials: int = DEFAULT_PURITY_TRIALS,
    seed: int = 0,
    tol: float = PURITY_TOL,
) -> PurityCheck:
    """Probabilistic test that every pure input has a pure image.

    Always checks the basis and pair-superposition states, then ``trials``
    Haar-random vectors. A ``True`` verdict is evidence, not proof; a
    ``False`` verdict carries the offending input vector.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    d = ch.dim
    candidates = proof_probe_states(d)
    checked = 0
    for psi in candidates + [haar_vector(d, rng) for _ in range(trials)]:
        checked += 1
        if _purity(ch(np.outer(psi, np.conj(psi)))) < 1.0 - tol:
            return PurityCheck(False, psi, checked)
    return PurityCheck(True, None, checked)


# ---------------------------------------------------------------- SWAP and product-preserving unitaries


def swap_operator(dims) -> np.ndarray:
    dims = BipartiteDims.of(dims)
    if dims.d_a != dims.d_b:
        raise DimensionError("SWAP needs equal local dimensions")
    d = dims.d_a
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for j in range(d):
        for k in range(d):
            s[k * d + j, j * d + k] = 1.0
    return s


class UnitaryTag(str, enum.Enum):
    LOCAL = "Local"
    LOCAL_SWAP = "LocalSwap"
    NOT_PRODUCT_PRESERVING = "NotProductPreserving"


@dataclass(frozen=True, eq=False)
class UnitaryClass:
    tag: UnitaryTag
    factors: tuple[np.ndarray, np.ndarray] | None = None
    reason: str = ""

    def reconstruct(self, dims) -> np.ndarray:
        if self.factors is None:
            raise ValueError("no factors for a non-product-preserving unitary")
        u = kron(*self.factors)
        if self.tag is UnitaryTag.LOCAL_SWAP:
            u = u @ swap_operator(dims)
        return u


def _factor(vec: np.ndarray, dims: BipartiteDims):
    """Split a vector into ``(a, b, s2)`` with ``vec ~ a (x) b``, ``|a| = 1`` and ``s2`` the second singular value."""
    m = vec.reshape(dims.d_a, dims.d_b)
    u, s, vh = np.linalg.svd(m)
    a = u[:, 0]
    b = s[0] * vh[0]
    return a, b, (float(s[1]) if s.size > 1 else 0.0)


def _local_factors(u: np.ndarray, dims: BipartiteDims):
    """Try ``u = U_A (x) U_B``; return the factors or the reason it fails.

    Follows the constructive argument: the images ``u|jk>`` must be
    ``e^{i theta_jk} psi_j (x) phi_k`` with orthonormal ``psi_j``, ``phi_k``
    and the additive phase law ``theta_jk = theta_j0 + theta_0k``.
    """
    da, db = dims.d_a, dims.d_b
    cols = u.T  # cols[j*db + k] = u|jk>
    a00, _, _ = _factor(cols[0], dims)
    # U_B|k> := (<a00| (x) I) u|0k>; U_A|j> := (I (x) <b0|) u|j0> with b0 = U_B|0>.
    u_b = np.stack([np.conj(a00) @ cols[k].reshape(da, db) for k in range(db)], axis=1)
    b0 = u_b[:, 0] / np.linalg.norm(u_b[:, 0])
    u_a = np.stack([cols[j * db].reshape(da, db) @ np.conj(b0) for j in range(da)], axis=1)
    if not (is_unitary(u_a, FACTOR_TOL) and is_unitary(u_b, FACTOR_TOL)):
        return None, "extracted local factors are not unitary"
    # phase law on every basis image: <psi_j phi_k| u |jk> must equal 1
    overlaps = np.einsum("aj,bk,abjk->jk", np.conj(u_a), np.conj(u_b),
                         u.reshape(da, db, da, db))
    if float(np.max(np.abs(overlaps - 1.0))) > FACTOR_TOL:
        return None, "phase law theta_jk = theta_j0 + theta_0k violated"
    if float(np.max(np.abs(u - kron(u_a, u_b)))) > FACTOR_TOL:
        return None, "residual of local reconstruction too large"
    return (u_a, u_b), ""


def _superposition_images_product(u: np.ndarray, dims: BipartiteDims) -> bool:
    da, db = dims.d_a, dims.d_b
    ea, eb = np.eye(da), np.eye(db)
    for j in range(da):
        for j2 in range(j + 1, da):
            for k in range(db):
                for k2 in range(k + 1, db):
                    v = np.kron(ea[j] + ea[j2], eb[k] + eb[k2]) / 2.0
                    if _factor(u @ v, dims)[2] > SCHMIDT_TOL:
                        return False
    return True


def classify_product_preserving_unitary(u, dims) -> UnitaryClass:
    """Decide whether ``u`` is local, local after SWAP, or neither, and extract factors.

    For ``LocalSwap`` the returned factors satisfy ``u = (U_A (x) U_B) S``.
    """
    u = as_matrix(u)
    dims = BipartiteDims.of(dims)
    if u.shape != (dims.total, dims.total):
        raise DimensionError(f"unitary shape {u.shape} does not match dims {dims.as_tuple()}")
    if not is_unitary(u, UNITARY_TOL):
        raise NotUnitaryError("input is not unitary within tolerance")

    def npp(reason: str) -> UnitaryClass:
        return UnitaryClass(UnitaryTag.NOT_PRODUCT_PRESERVING, None, reason)

    da, db = dims.d_a, dims.d_b
    cols = u.T
    factors = [_factor(cols[j * db + k], dims) for j in range(da) for k in range(db)]
    for idx, (_, _, s2) in enumerate(factors):
        if s2 > SCHMIDT_TOL:
            j, k = divmod(idx, db)
            return npp(f"image of |{j}{k}> is entangled (second Schmidt coefficient {s2:.3g})")
    if not _superposition_images_product(u, dims):
        return npp("image of a superposed product vector is entangled")

    # Branch from the pair (|00>, |10>): either the A factors are orthogonal
    # and the B factors parallel, or the other way round.
    a0, b0, _ = factors[0]
    a1, b1, _ = factors[db]
    b0n, b1n = b0 / np.linalg.norm(b0), b1 / np.linalg.norm(b1)
    ov_a = abs(np.vdot(a0, a1))
    ov_b = abs(np.vdot(b0n, b1n))
    if ov_a < 1e-6 and abs(ov_b - 1.0) < 1e-6:
        f, why = _local_factors(u, dims)
        if f is None:
            return npp(why)
        return UnitaryClass(UnitaryTag.LOCAL, f)
    if ov_b < 1e-6 and abs(ov_a - 1.0) < 1e-6:
        if da != db:
            return npp("factor images swap subsystems but d_A != d_B")
        s = swap_operator(dims)
        f, why = _local_factors(u @ s, dims)
        if f is None:
            return npp(why)
        return UnitaryClass(UnitaryTag.LOCAL_SWAP, f)
    return npp("basis images fit neither the local nor the SWAP branch")


# ---------------------------------------------------------------- unitary reconstruction


def reconstruct_unitary_from_channel(
    ch: Channel,
    verify_trials: int = 20,
    seed: int = 0,
) -> np.ndarray:
    """Recover ``V`` with ``ch(rho) = V rho V^dagger`` for a unital pure-state-preserving channel.

    Images of the basis projectors give orthonormal vectors ``psi_j``;
    images of ``(|0> + |j>)/sqrt2`` fix the relative phases ``z_j``.

    Raises
    ------
    NotUnitalError, NotPurePreservingError, PhaseInconsistentError
    """
    if not is_unital(ch):
        raise NotUnitalError("channel does not fix the maximally mixed state")
    d = ch.dim
    eye = np.eye(d, dtype=np.complex128)

    def pure_image(vec: np.ndarray) -> np.ndarray:
        img = ch(np.outer(vec, np.conj(vec)))
        w, v = hermitian_eig(0.5 * (img + dagger(img)), tol=1e-6)
        if w[-1] < 1.0 - EIGGAP_TOL:
            raise NotPurePreservingError(
                f"image has top eigenvalue {w[-1]:.6g} < 1", vec
            )
        return v[:, -1]

    psis = np.stack([pure_image(eye[j]) for j in range(d)], axis=1)
    if float(np.max(np.abs(dagger(psis) @ psis - eye))) > 1e-6:
        raise PhaseInconsistentError("basis images are not mutually orthogonal")

    z = np.ones(d, dtype=np.complex128)
    for j in range(1, d):
        chi = (eye[0] + eye[j]) / np.sqrt(2.0)
        pure_image(chi)
        img = ch(np.outer(chi, np.conj(chi)))
        zj = 2.0 * np.vdot(psis[:, j], img @ psis[:, 0])
        if abs(abs(zj) - 1.0) > 1e-6:
            raise PhaseInconsistentError(f"phase z_{j} has modulus {abs(zj):.6g}")
        z[j] = zj / abs(zj)
    v = psis * z

    rng = np.random.default_rng(seed)
    probes = proof_probe_states(d) + [haar_vector(d, rng) for _ in range(verify_trials)]
    for vec in probes:
        rho = np.outer(vec, np.conj(vec))
        img = ch(rho)
        if _purity(img) < 1.0 - PURITY_TOL:
            raise NotPurePreservingError("image of a probe state is mixed", vec)
        if float(np.max(np.abs(img - v @ rho @ dagger(v)))) > RECONSTRUCT_TOL:
            raise PhaseInconsistentError("reconstructed unitary does not reproduce the channel")
    return v


# ---------------------------------------------------------------- entangled -> product witness

_QUBIT_GRID = [
    np.array([1, 0], dtype=np.complex128),
    np.array([0, 1], dtype=np.complex128),
    np.array([1, 1], dtype=np.complex128) / np.sqrt(2),
    np.array([1, -1], dtype=np.complex128) / np.sqrt(2),
    np.array([1, 1j], dtype=np.complex128) / np.sqrt(2),
    np.array([1, -1j], dtype=np.complex128) / np.sqrt(2),
]


def local_grid(d: int) -> list[np.ndarray]:
    """Deterministic probe vectors: Pauli eigenstates for qubits, otherwise the
    computational basis followed by quadratic-phase Fourier bases
    ``(1/sqrt d) sum_j w^{a j^2 + b j} |j>``."""
    if d == 2:
        return list(_QUBIT_GRID)
    vecs = list(np.eye(d, dtype=np.complex128))
    j = np.arange(d)
    for a in range(d):
        for b in range(d):
            vecs.append(np.exp(2j * np.pi * (a * j * j + b * j) / d) / np.sqrt(d))
    return vecs


def find_entangled_to_product_witness(
    u,
    dims,
    budget: int = 2000,
    seed: int = 0,
    tol: float = WITNESS_TOL,
) -> tuple[PureState, PureState]:
    """Return ``(psi_E, psi_P)`` with ``psi_P`` product, ``psi_E`` entangled and ``u psi_E = psi_P``.

    The fixed local grid is scanned first and the candidate whose preimage is
    most entangled wins; Haar-random product vectors follow only if the grid
    yields nothing above ``tol``.

    Raises
    ------
    NoWitnessExists
        ``u`` is local or local after SWAP.
    BudgetExhausted
        No witness among ``budget`` random candidates.
    """
    u = as_matrix(u)
    dims = BipartiteDims.of(dims)
    cls = classify_product_preserving_unitary(u, dims)
    if cls.tag is not UnitaryTag.NOT_PRODUCT_PRESERVING:
        raise NoWitnessExists(cls.tag)
    u_inv = dagger(u)

    def preimage_gap(a, b):
        prod = np.kron(a, b)
        pre = u_inv @ prod
        return second_schmidt_coefficient(PureState.normalized(pre, dims)), prod, pre

    best = (-1.0, None, None)
    for a in local_grid(dims.d_a):
        for b in local_grid(dims.d_b):
            gap, prod, pre = preimage_gap(a, b)
            if gap > best[0] + 1e-12:
                best = (gap, prod, pre)
    tried = len(local_grid(dims.d_a)) * len(local_grid(dims.d_b))
    if best[0] <= tol:
        rng = np.random.default_rng(seed)
        for _ in range(budget):
            tried += 1
            gap, prod, pre = preimage_gap(haar_vector(dims.d_a, rng), haar_vector(dims.d_b, rng))
            if gap > best[0]:
                best = (gap, prod, pre)
            if gap > tol:
                break
    gap, prod, pre = best
    if gap <= tol:
        raise BudgetExhausted(PureState.normalized(prod, dims), gap, tried)
    return PureState.normalized(pre, dims), PureState.normalized(prod, dims)
