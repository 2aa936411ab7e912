"""Markovian (Lindblad) dynamics and fixed-step RK4 integration."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .states import DensityOperator, InvalidStateError, PureState
from .tensor_algebra import (
    BipartiteDims,
    DimensionError,
    as_matrix,
    dagger,
    hermiticity_defect,
    is_psd,
    kron,
)
from .channels import PAULI, SIGMA_MINUS, two_qubit_paulis

DEFAULT_DT = 1e-3
DRIFT_TOL = 1e-8
UNITAL_GEN_TOL = 1e-9


class IntegrationError(RuntimeError):
    """The integrated state left the set of density operators beyond tolerance."""

    def __init__(self, message: str, step: int, time: float, drift: float):
        super().__init__(f"{message} at step {step} (t={time:.6g}, drift={drift:.3g})")
        self.step = step
        self.time = time
        self.drift = drift


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    hamiltonian: np.ndarray
    jump_operators: tuple = ()
    dims: BipartiteDims | None = None

    def __post_init__(self):
        h = as_matrix(self.hamiltonian)
        n = h.shape[0]
        if h.shape != (n, n):
            raise DimensionError("Hamiltonian must be square")
        if hermiticity_defect(h) > 1e-9:
            raise ValueError("Hamiltonian is not Hermitian")
        jumps = tuple(as_matrix(a) for a in self.jump_operators)
        for a in jumps:
            if a.shape != (n, n):
                raise DimensionError("jump operators must match the Hamiltonian size")
        dims = None if self.dims is None else BipartiteDims.of(self.dims)
        if dims is not None and dims.total != n:
            raise DimensionError(f"size {n} does not match dims {dims.as_tuple()}")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jump_operators", jumps)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def superoperator(self) -> np.ndarray:
        """Generator as a matrix on row-major ``vec(rho)``, assembled column by column from the rhs."""
        n = self.dim
        cols = []
        for idx in range(n * n):
            e = np.zeros(n * n, dtype=np.complex128)
            e[idx] = 1.0
            cols.append(_rhs(self, e.reshape(n, n)).reshape(-1))
        return np.stack(cols, axis=1)

    def rk4_propagator(self, h: float) -> np.ndarray:
        """One classical RK4 step of size ``h`` as a matrix.

        For the linear autonomous equation ``x' = L x`` the four RK4 stages
        collapse to ``I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24``.
        """
        hl = h * self.superoperator
        eye = np.eye(hl.shape[0], dtype=np.complex128)
        acc = eye.copy()
        term = eye
        for k in range(1, 5):
            term = term @ hl / k
            acc = acc + term
        return acc


def _rhs(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    h = gen.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for a in gen.jump_operators:
        ad = dagger(a)
        ada = ad @ a
        out = out + a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada)
    return out


def lindblad_rhs(gen: LindbladGenerator, rho) -> np.ndarray:
    """``-i[H, rho] + sum_i (A_i rho A_i^dagger - {A_i^dagger A_i, rho}/2)``."""
    m = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    if m.shape != (gen.dim, gen.dim):
        raise DimensionError(f"state of shape {m.shape} does not match generator size {gen.dim}")
    return _rhs(gen, m)


def is_unital_generator(gen: LindbladGenerator, tol: float = UNITAL_GEN_TOL) -> bool:
    n = gen.dim
    acc = np.zeros((n, n), dtype=np.complex128)
    for a in gen.jump_operators:
        acc += a @ dagger(a) - dagger(a) @ a
    return float(np.max(np.abs(acc))) <= tol


def purity_derivative_at_pure(gen: LindbladGenerator, psi: PureState) -> float:
    """``d Tr(rho^2)/dt`` at ``rho = |psi><psi|``: ``2 sum_i (|<psi|A_i|psi>|^2 - ||A_i psi||^2)``.

    Never positive, by Cauchy-Schwarz.
    """
    v = psi.amplitudes
    total = 0.0
    for a in gen.jump_operators:
        av = a @ v
        total += abs(np.vdot(v, av)) ** 2 - np.real(np.vdot(av, av))
    return 2.0 * float(total)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple
    lambda_minus: np.ndarray | None = None
    negativity: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) != len(self.states):
            raise ValueError("times and states differ in length")
        if t.size and (t[0] != 0.0 or np.any(np.diff(t) <= 0)):
            raise ValueError("times must start at 0 and increase strictly")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    def traces(self) -> np.ndarray:
        return np.array([s.trace() for s in self.states])

    def purities(self) -> np.ndarray:
        return np.array([s.purity() for s in self.states])


def check_state(m: np.ndarray, step: int, time: float, tol: float = DRIFT_TOL) -> None:
    drift = abs(np.trace(m).real - 1.0)
    if drift > tol:
        raise IntegrationError("trace drift beyond tolerance", step, time, drift)
    if not is_psd(m, tol):
        lmin = float(np.linalg.eigvalsh(m)[0])
        raise IntegrationError("negative eigenvalue beyond tolerance", step, time, -lmin)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def steps_for(t: float, dt: float) -> int:
    """Number of equal RK4 steps covering ``[0, t]`` with step no larger than ``dt``."""
    return max(1, int(np.ceil(t / dt - 1e-9)))


def propagate_matrix(gen: LindbladGenerator, t: float, dt: float = DEFAULT_DT) -> np.ndarray:
    """RK4 superoperator for time ``t``: ``n`` equal steps of size ``t/n <= dt``."""
    if t == 0.0:
        return np.eye(gen.dim ** 2, dtype=np.complex128)
    n = steps_for(t, dt)
    return np.linalg.matrix_power(gen.rk4_propagator(t / n), n)


def integrate(
    gen: LindbladGenerator,
    rho0: DensityOperator,
    t_end: float,
    dt: float = DEFAULT_DT,
) -> Trajectory:
    """Fixed-step RK4 from ``rho0`` to ``t_end``, keeping every step.

    The step is ``t_end / n`` with ``n = ceil(t_end / dt)`` so that the grid
    ends exactly at ``t_end``. Each state is Hermitized but never
    renormalized; trace drift or negativity beyond ``DRIFT_TOL`` raises
    :class:`IntegrationError`.
    """
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    if not 0.0 < dt <= t_end:
        raise ValueError("dt must satisfy 0 < dt <= t_end")
    if rho0.matrix.shape != (gen.dim, gen.dim):
        raise DimensionError("initial state does not match the generator size")
    n = steps_for(t_end, dt)
    h = t_end / n
    prop = gen.rk4_propagator(h)
    dims = rho0.dims
    d = gen.dim
    vec = rho0.matrix.reshape(-1).astype(np.complex128)
    times = [0.0]
    states = [rho0]
    for step in range(1, n + 1):
        vec = prop @ vec
        m = _hermitize(vec.reshape(d, d))
        vec = m.reshape(-1)
        t = step * h
        check_state(m, step, t)
        times.append(t)
        states.append(_trusted_density(m, dims))
    return Trajectory(np.array(times), states)


def _trusted_density(m: np.ndarray, dims) -> DensityOperator:
    try:
        return DensityOperator(m, dims)
    except InvalidStateError as exc:  # pragma: no cover - check_state is stricter
        raise IntegrationError(str(exc), -1, float("nan"), float("nan")) from exc


# ---------------------------------------------------------------- model generators


def depolarizing_generator(rate: float = 1.0) -> LindbladGenerator:
    """Two-qubit isotropic contraction ``d rho/dt = rate (I/4 - rho)``; jumps ``sqrt(rate) P/4``."""
    jumps = [np.sqrt(rate) * p / 4.0 for p in two_qubit_paulis(include_identity=False)]
    return LindbladGenerator(np.zeros((4, 4)), tuple(jumps), (2, 2))


def amplitude_damping_generator(rate: float = 1.0) -> LindbladGenerator:
    """Independent decay on both qubits, jumps ``sqrt(rate) sigma_- (x) I`` and ``I (x) sqrt(rate) sigma_-``."""
    i2 = PAULI["I"]
    jumps = (np.sqrt(rate) * kron(SIGMA_MINUS, i2), np.sqrt(rate) * kron(i2, SIGMA_MINUS))
    return LindbladGenerator(np.zeros((4, 4)), jumps, (2, 2))


def dephasing_generator(rate: float = 1.0) -> LindbladGenerator:
    """One-sided dephasing, jump ``sqrt(rate) Z (x) I``; coherences decay as ``exp(-2 rate t)``."""
    return LindbladGenerator(
        np.zeros((4, 4)), (np.sqrt(rate) * kron(PAULI["Z"], PAULI["I"]),), (2, 2)
    )


def hamiltonian_generator(h, dims=None) -> LindbladGenerator:
    return LindbladGenerator(h, (), dims)


def random_generator(
    dims,
    rng: np.random.Generator,
    n_jumps: int = 2,
    scale: float = 0.5,
) -> LindbladGenerator:
    """Random Hamiltonian and Ginibre jumps, each rescaled to spectral norm ``scale``."""
    dims = BipartiteDims.of(dims)
    n = dims.total

    def ginibre():
        return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))

    def rescale(m):
        return scale * m / np.linalg.norm(m, 2)

    x = ginibre()
    h = rescale(0.5 * (x + dagger(x)))
    jumps = tuple(rescale(ginibre()) for _ in range(n_jumps))
    return LindbladGenerator(h, jumps, dims)
