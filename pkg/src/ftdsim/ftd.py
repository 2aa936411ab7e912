"""Finite time disentanglement: dynamics families, interval detection, witnesses.

A dynamics is a continuous family of channels ``t -> Lambda_t`` on a
bipartite system with ``Lambda_0`` the identity. Three concrete kinds are
provided (Lindblad semigroup, unitary family, generic channel family); all
expose the same evaluation layer so the detection and witness code does not
care which one it is handed.

Detection is sample based. A reported interval is a maximal run of
sampled times where the evolved state is not NPT-entangled, with both ends
refined by bisection. An interval that runs into the horizon is flagged
``open_ended``; that never certifies ``(a, infinity)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import (
    BudgetExhausted,
    Channel,
    NoWitnessExists,
    UnitaryTag,
    classify_product_preserving_unitary,
    find_entangled_to_product_witness,
    is_unital,
)
from .entanglement import (
    ENT_TOL,
    Classification,
    classify_separability,
    entanglement_mixing_threshold,
    min_pt_eigenvalue,
    negativity,
)
from .lindblad import (
    DEFAULT_DT,
    LindbladGenerator,
    Trajectory,
    check_state,
    propagate_matrix,
)
from .states import (
    DensityOperator,
    PureState,
    bell_state,
    haar_unitary,
    is_product,
    isotropic_mix,
    maximally_mixed,
    schmidt_decompose,
)
from .tensor_algebra import BipartiteDims, as_matrix, dagger, kron

IDENTITY_TOL = 1e-9
REFINE_TOL = 1e-6
DEFAULT_SAMPLES = 512
RANDOM_MAX_ENTANGLED = 50


class NotApplicable(Exception):
    """The requested witness construction does not apply at this time."""


class NotEntangledError(ValueError):
    pass


# ---------------------------------------------------------------- dynamics


class Dynamics:
    """Base class; subclasses implement :meth:`superoperator_at` and may override :meth:`channel_at`."""

    dims: BipartiteDims
    horizon: float
    kind: str = "abstract"

    def _check_time(self, t: float) -> None:
        if not 0.0 <= t <= self.horizon * (1 + 1e-12):
            raise ValueError(f"time {t!r} outside [0, {self.horizon}]")

    def superoperator_at(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def channel_at(self, t: float) -> Channel:
        self._check_time(t)
        from .channels import channel_from_superoperator

        return channel_from_superoperator(self.superoperator_at(t), self.dims)

    def evolve_matrix(self, rho: np.ndarray, t: float) -> np.ndarray:
        n = self.dims.total
        out = (self.superoperator_at(t) @ rho.reshape(-1)).reshape(n, n)
        return 0.5 * (out + dagger(out))

    def evolve(self, rho0: DensityOperator, times: Sequence[float]) -> list[DensityOperator]:
        """States at ``times``; each passes the trace/positivity hygiene check."""
        out = []
        for step, t in enumerate(times):
            self._check_time(t)
            m = self.evolve_matrix(rho0.matrix, float(t))
            check_state(m, step, float(t))
            out.append(DensityOperator(m, self.dims))
        return out

    def unitary_at(self, t: float, tol: float = 1e-8) -> np.ndarray | None:
        """The unitary implementing ``Lambda_t`` if its Choi matrix has rank one."""
        s = self.superoperator_at(t)
        n = self.dims.total
        choi = s.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
        u, sv, _ = np.linalg.svd(choi)
        if sv.size > 1 and sv[1] > tol * sv[0]:
            return None
        v = np.sqrt(sv[0]) * u[:, 0].reshape(n, n)
        return v

    def is_unital_at(self, t: float, tol: float = 1e-9) -> bool:
        n = self.dims.total
        img = (self.superoperator_at(t) @ np.eye(n).reshape(-1)).reshape(n, n)
        return float(np.max(np.abs(img - np.eye(n)))) <= tol


@dataclass(frozen=True, eq=False)
class LindbladSemigroup(Dynamics):
    generator: LindbladGenerator
    horizon: float
    dt: float = DEFAULT_DT
    kind: str = field(default="lindblad", init=False)

    def __post_init__(self):
        if self.generator.dims is None:
            raise ValueError("generator must carry bipartite dims")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    @property
    def dims(self) -> BipartiteDims:
        return self.generator.dims

    def superoperator_at(self, t: float) -> np.ndarray:
        self._check_time(t)
        return propagate_matrix(self.generator, float(t), self.dt)

    def evolve(self, rho0: DensityOperator, times: Sequence[float]) -> list[DensityOperator]:
        # Step between consecutive (sorted) times; reuse propagators for equal gaps.
        times = [float(t) for t in times]
        for t in times:
            self._check_time(t)
        order = np.argsort(times, kind="stable")
        n = self.dims.total
        cache: dict[float, np.ndarray] = {}
        vec = rho0.matrix.reshape(-1).astype(np.complex128)
        t_now = 0.0
        result: list[DensityOperator | None] = [None] * len(times)
        for step, i in enumerate(order):
            t = times[i]
            gap = t - t_now
            if gap > 0:
                key = round(gap, 15)
                if key not in cache:
                    cache[key] = propagate_matrix(self.generator, gap, self.dt)
                vec = cache[key] @ vec
                m = vec.reshape(n, n)
                m = 0.5 * (m + dagger(m))
                vec = m.reshape(-1)
                t_now = t
            m = vec.reshape(n, n)
            check_state(m, step, t)
            result[i] = DensityOperator(m, self.dims)
        return result


@dataclass(frozen=True, eq=False)
class UnitaryFamily(Dynamics):
    unitary: Callable[[float], np.ndarray]
    dims: BipartiteDims
    horizon: float
    kind: str = field(default="unitary", init=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", BipartiteDims.of(self.dims))

    def unitary_matrix(self, t: float) -> np.ndarray:
        self._check_time(t)
        return as_matrix(self.unitary(float(t)))

    def channel_at(self, t: float) -> Channel:
        return Channel.unitary(self.unitary_matrix(t), self.dims)

    def superoperator_at(self, t: float) -> np.ndarray:
        u = self.unitary_matrix(t)
        return np.kron(u, np.conj(u))

    def evolve_matrix(self, rho: np.ndarray, t: float) -> np.ndarray:
        u = self.unitary_matrix(t)
        out = u @ rho @ dagger(u)
        return 0.5 * (out + dagger(out))

    def unitary_at(self, t: float, tol: float = 1e-8) -> np.ndarray:
        return self.unitary_matrix(t)


@dataclass(frozen=True, eq=False)
class ChannelFamily(Dynamics):
    channel: Callable[[float], Channel]
    dims: BipartiteDims
    horizon: float
    kind: str = field(default="channel", init=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", BipartiteDims.of(self.dims))

    def channel_at(self, t: float) -> Channel:
        self._check_time(t)
        return self.channel(float(t))

    def superoperator_at(self, t: float) -> np.ndarray:
        return self.channel_at(t).superoperator()

    def evolve_matrix(self, rho: np.ndarray, t: float) -> np.ndarray:
        out = self.channel_at(t)(rho)
        return 0.5 * (out + dagger(out))


def channel_at(dyn: Dynamics, t: float) -> Channel:
    return dyn.channel_at(t)


def hamiltonian_family(h, dims, horizon: float) -> UnitaryFamily:
    """``t -> exp(-i H t)`` for a fixed Hermitian ``H``."""
    h = as_matrix(h)
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))

    def u(t: float) -> np.ndarray:
        return (v * np.exp(-1j * w * t)) @ dagger(v)

    return UnitaryFamily(u, dims, horizon)


def probe_states(dims: BipartiteDims) -> list[np.ndarray]:
    """Fixed probe set for sampled continuity: basis and pair-superposition projectors."""
    from .channels import proof_probe_states

    return [np.outer(v, np.conj(v)) for v in proof_probe_states(dims.total)]


def check_identity_at_zero(dyn: Dynamics, tol: float = IDENTITY_TOL) -> float:
    n = dyn.dims.total
    dev = float(np.max(np.abs(dyn.superoperator_at(0.0) - np.eye(n * n))))
    if dev > tol:
        raise ValueError(f"Lambda_0 deviates from the identity map by {dev:.3g}")
    return dev


def check_continuity(dyn: Dynamics, modulus: float, probes: int = 10_000) -> float:
    """Largest observed ``max_probe |Lambda_{t+h}(rho) - Lambda_t(rho)| / h`` on a grid of
    ``probes`` steps of size ``h = horizon / probes``.

    This is a heuristic check against the declared modulus, not a proof of
    continuity. Raises ``ValueError`` if the modulus is exceeded.
    """
    h = dyn.horizon / probes
    rhos = np.array([p.reshape(-1) for p in probe_states(dyn.dims)]).T
    worst = 0.0
    prev = rhos
    if isinstance(dyn, LindbladSemigroup):
        step = propagate_matrix(dyn.generator, h, dyn.dt)
        for _ in range(probes):
            nxt = step @ prev
            worst = max(worst, float(np.max(np.abs(nxt - prev))) / h)
            prev = nxt
    else:
        for k in range(1, probes + 1):
            nxt = dyn.superoperator_at(min(k * h, dyn.horizon)) @ rhos
            worst = max(worst, float(np.max(np.abs(nxt - prev))) / h)
            prev = nxt
    if worst > modulus:
        raise ValueError(f"observed modulus {worst:.4g} exceeds declared {modulus:.4g}")
    return worst


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    open_ended: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "open_ended", bool(self.open_ended))

    def as_list(self) -> list:
        return [self.a, self.b, self.open_ended]


class Method(str, enum.Enum):
    SCAN = "scan"
    CLOSED_WITNESS = "closed_witness"
    UNITAL_WITNESS = "unital_witness"


@dataclass(frozen=True, eq=False)
class FtdReport:
    witness_state: DensityOperator
    intervals: tuple
    trajectory: Trajectory
    method: Method
    t_bar: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def onset(self) -> float:
        return self.intervals[0].a


class Verdict(str, enum.Enum):
    ALL_LOCAL_UNITARY = "AllLocalUnitary"
    EXHIBITS_FTD = "ExhibitsFtd"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True, eq=False)
class DynamicsClass:
    verdict: Verdict
    evidence: tuple  # (t, tag) pairs
    report: FtdReport | None = None
    note: str = ""

    def local_swap_times(self) -> list[float]:
        return [t for t, tag in self.evidence if tag == UnitaryTag.LOCAL_SWAP.value]


# ---------------------------------------------------------------- trajectories and detection


def entanglement_trajectory(
    dyn: Dynamics,
    rho0: DensityOperator,
    samples: int = DEFAULT_SAMPLES,
    extra_times: Iterable[float] = (),
) -> Trajectory:
    """Uniform grid on ``[0, horizon]`` (plus ``extra_times``) with lambda_minus and negativity."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    times = np.linspace(0.0, dyn.horizon, samples)
    extra = [float(t) for t in extra_times]
    if extra:
        times = np.unique(np.concatenate([times, extra]))
    states = dyn.evolve(rho0, times)
    lam = np.array([min_pt_eigenvalue(s) for s in states])
    neg = np.array([negativity(s) for s in states])
    return Trajectory(times, states, lam, neg)


def _entangled_at(dyn: Dynamics, rho0: DensityOperator, t: float) -> bool:
    (state,) = dyn.evolve(rho0, [t])
    return min_pt_eigenvalue(state) < -ENT_TOL


def _bisect(dyn, rho0, t_ent: float, t_sep: float, tol: float) -> float:
    """Boundary between an entangled time and a non-entangled time, to ``tol``."""
    while abs(t_sep - t_ent) > tol:
        mid = 0.5 * (t_ent + t_sep)
        if _entangled_at(dyn, rho0, mid):
            t_ent = mid
        else:
            t_sep = mid
    return 0.5 * (t_ent + t_sep)


def intervals_from_trajectory(
    dyn: Dynamics,
    rho0: DensityOperator,
    traj: Trajectory,
    refine_tol: float = REFINE_TOL,
) -> list[Interval]:
    times = traj.times
    ent = traj.lambda_minus < -ENT_TOL
    out = []
    i = 0
    n = len(times)
    while i < n:
        if ent[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and not ent[j + 1]:
            j += 1
        if i == 0:
            # run starts at t = 0, so rho0 is not entangled; nothing to report
            i = j + 1
            continue
        a = _bisect(dyn, rho0, times[i - 1], times[i], refine_tol)
        if j == n - 1:
            out.append(Interval(a, float(times[j]), open_ended=True))
        else:
            b = _bisect(dyn, rho0, times[j + 1], times[j], refine_tol)
            out.append(Interval(a, b, open_ended=False))
        i = j + 1
    return out


def _require_entangled(rho0: DensityOperator) -> None:
    if not classify_separability(rho0).entangled:
        raise NotEntangledError("initial state is not NPT-entangled")


def detect_ftd(
    dyn: Dynamics,
    rho0: DensityOperator,
    samples: int = DEFAULT_SAMPLES,
    refine_tol: float = REFINE_TOL,
    extra_times: Iterable[float] = (),
) -> FtdReport | None:
    """Scan lambda_minus(t) and report every disentangled interval, or ``None``."""
    _require_entangled(rho0)
    traj = entanglement_trajectory(dyn, rho0, samples, extra_times)
    intervals = intervals_from_trajectory(dyn, rho0, traj, refine_tol)
    if not intervals:
        return None
    return FtdReport(rho0, tuple(intervals), traj, Method.SCAN)


def verify_report(dyn: Dynamics, report: FtdReport, points: int = 10) -> bool:
    """Re-simulate the witness: entangled at t=0, never entangled at fresh interior points."""
    rho0 = report.witness_state
    if not classify_separability(rho0).entangled:
        return False
    margin = 4 * REFINE_TOL
    offset = 0.5 / math.sqrt(2.0)  # off-grid fractions
    for iv in report.intervals:
        lo, hi = iv.a + margin, iv.b - (0.0 if iv.open_ended else margin)
        if hi <= lo:
            lo, hi = iv.a, iv.b
        ts = [lo + (hi - lo) * (k + offset) / points for k in range(points)]
        for state in dyn.evolve(rho0, ts):
            if classify_separability(state).entangled:
                return False
    return True


# ---------------------------------------------------------------- witness constructions


def _interior_certificate(image: DensityOperator, lam: float, psi_p: PureState) -> bool:
    """Whether ``image`` equals ``lam I/D + (1 - lam)|psi_P><psi_P|`` with product ``psi_P``.

    Any mixture of a separable state with a positive weight on I/D lies in
    the interior of the separable set, whatever the local dimensions.
    """
    n = image.dims.total
    target = lam * np.eye(n) / n + (1.0 - lam) * psi_p.projector()
    return lam > 0 and is_product(psi_p) and float(np.max(np.abs(image.matrix - target))) < 1e-9


def closed_system_witness(
    dyn: Dynamics,
    t_bar: float,
    samples: int = DEFAULT_SAMPLES,
    budget: int = 2000,
    seed: int = 0,
) -> FtdReport:
    """Mix a state that ``U_{t_bar}`` sends to a product vector with white noise.

    ``rho_E = lam I/D + (1 - lam)|psi_E><psi_E|`` with ``lam`` half the
    entanglement-breaking weight of ``psi_E``: still entangled at t=0, while
    its image at ``t_bar`` is white noise mixed with a product state, i.e. an
    interior point of the separable set.

    ``BudgetExhausted`` from the witness search propagates unchanged.
    """
    u = dyn.unitary_at(t_bar)
    if u is None:
        raise NotApplicable(f"Lambda at t={t_bar} is not induced by a unitary")
    try:
        psi_e, psi_p = find_entangled_to_product_witness(u, dyn.dims, budget, seed)
    except NoWitnessExists as exc:
        raise NotApplicable(
            f"U at t={t_bar} is {exc.tag.value}; no entangled state becomes product there"
        ) from exc
    lam = 0.5 * entanglement_mixing_threshold(psi_e.density())
    rho_e = isotropic_mix(psi_e.density(), lam)
    if not classify_separability(rho_e).entangled:
        raise RuntimeError("mixed witness lost its entanglement")
    (image,) = dyn.evolve(rho_e, [t_bar])
    verdict = classify_separability(image)
    interior = verdict.classification is Classification.SEPARABLE_INTERIOR
    if not interior and verdict.classification is Classification.PPT_UNDECIDED:
        interior = _interior_certificate(image, lam, psi_p)
    if not interior:
        raise RuntimeError(f"image at t_bar classified {verdict.classification.value}")
    traj = entanglement_trajectory(dyn, rho_e, samples, extra_times=[t_bar])
    intervals = intervals_from_trajectory(dyn, rho_e, traj)
    details = {
        "lambda": lam,
        "psi_E": psi_e.amplitudes.tolist(),
        "psi_P": psi_p.amplitudes.tolist(),
        "image_classification": verdict.classification.value,
    }
    return FtdReport(rho_e, tuple(intervals), traj, Method.CLOSED_WITNESS, t_bar, details)


def random_maximally_entangled(rng: np.random.Generator) -> PureState:
    """``(u_A (x) u_B)|Phi+>`` for Haar-random local unitaries."""
    u = kron(haar_unitary(2, rng), haar_unitary(2, rng))
    return PureState.normalized(u @ bell_state("phi+").amplitudes, (2, 2))


def werner_window(delta: float) -> tuple[float, float]:
    """Open interval of weights ``p`` with ``p(-3/4) + 1/4 < 0 < p(delta - 1/4) + 1/4``, within (0, 1)."""
    upper = 1.0 if delta >= 0.25 else min(1.0, 1.0 / (1.0 - 4.0 * delta))
    return (1.0 / 3.0, upper)


def unital_qubit_witness(
    dyn: Dynamics,
    t_bar: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    purity_tol: float = 1e-9,
) -> FtdReport:
    """Werner-type witness ``p rho_E + (1 - p) I/4`` for a unital, non-unitary qubit-pair map.

    ``rho_E`` is maximally entangled with a mixed image. With ``delta`` the
    lambda_minus of that image, any ``p`` in ``(1/3, 1/(1 - 4 delta))`` gives an
    entangled witness whose image is in the separable interior; the midpoint
    is used.
    """
    if dyn.dims.as_tuple() != (2, 2):
        raise NotApplicable("unital witness construction needs a qubit pair")
    if dyn.unitary_at(t_bar) is not None:
        raise NotApplicable(f"Lambda at t={t_bar} is unitary; use closed_system_witness")
    if not dyn.is_unital_at(t_bar):
        raise NotApplicable(f"Lambda at t={t_bar} is not unital")

    rng = np.random.default_rng(seed)
    bells = [bell_state(name) for name in ("phi+", "phi-", "psi+", "psi-")]
    chosen = None
    for group in (bells, (random_maximally_entangled(rng) for _ in range(RANDOM_MAX_ENTANGLED))):
        best = None
        for psi in group:
            (img,) = dyn.evolve(psi.density(), [t_bar])
            if img.purity() < 1.0 - purity_tol:
                delta = min_pt_eigenvalue(img)
                if best is None or delta > best[1] + 1e-12:
                    best = (psi, delta)
        if best is not None:
            chosen = best
            break
    if chosen is None:
        raise NotApplicable("no maximally entangled state with a mixed image was found")
    psi_e, delta = chosen
    if not delta > -0.5 + 1e-9:
        raise RuntimeError(f"delta = {delta!r} leaves an empty window")
    lo, hi = werner_window(delta)
    p = 0.5 * (lo + hi)
    rho_e = isotropic_mix(psi_e.density(), 1.0 - p)
    lam_initial = p * (-0.5 - 0.25) + 0.25
    lam_image = p * (delta - 0.25) + 0.25

    if not classify_separability(rho_e).entangled:
        raise RuntimeError("Werner-type witness is not entangled")
    (image,) = dyn.evolve(rho_e, [t_bar])
    verdict = classify_separability(image)
    if verdict.classification is not Classification.SEPARABLE_INTERIOR:
        raise RuntimeError(f"image at t_bar classified {verdict.classification.value}")

    traj = entanglement_trajectory(dyn, rho_e, samples, extra_times=[t_bar])
    intervals = intervals_from_trajectory(dyn, rho_e, traj)
    details = {
        "delta": delta,
        "window": [lo, hi],
        "p": p,
        "lambda_minus_initial": lam_initial,
        "lambda_minus_image": lam_image,
        "rho_E": psi_e.amplitudes.tolist(),
    }
    return FtdReport(rho_e, tuple(intervals), traj, Method.UNITAL_WITNESS, t_bar, details)


# ---------------------------------------------------------------- classification


def witness_candidates(dims: BipartiteDims, seed: int = 0, n_random: int = 8) -> list[DensityOperator]:
    """Entangled initial states tried by the scan fallback."""
    d = min(dims.d_a, dims.d_b)
    out: list[DensityOperator] = []
    if dims.as_tuple() == (2, 2):
        out += [bell_state(name).density() for name in ("phi+", "phi-", "psi+", "psi-")]
    for weight in (1.0 / d, 0.7, 0.9):
        amps = np.zeros(dims.total, dtype=np.complex128)
        rest = (1.0 - weight) / (d - 1)
        for j in range(d):
            amps[j * dims.d_b + j] = np.sqrt(weight if j == d - 1 else rest)
        out.append(PureState.normalized(amps, dims).density())
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        v = rng.normal(size=dims.total) + 1j * rng.normal(size=dims.total)
        psi = PureState.normalized(v, dims)
        if schmidt_decompose(psi).rank > 1:
            out.append(psi.density())
    return out


def classify_dynamics(
    dyn: Dynamics,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> DynamicsClass:
    """Place a dynamics relative to the local-unitary family, at sample resolution.

    Every sampled ``Lambda_t`` (t > 0) is tagged Local / LocalSwap /
    NotProductPreserving / NonUnitary. All Local gives ``AllLocalUnitary``;
    this says nothing about times between samples. Otherwise the witness
    constructions are tried, then a scan over candidate initial states, and
    ``ExhibitsFtd`` is returned only with a report that re-verifies.
    ``Undetermined`` is the honest fallback.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    times = np.linspace(0.0, dyn.horizon, samples)[1:]
    evidence = []
    unitary_npp: list[float] = []
    unital_nonunitary: list[float] = []
    for t in times:
        t = float(t)
        u = dyn.unitary_at(t)
        if u is not None:
            tag = classify_product_preserving_unitary(u, dyn.dims).tag
            evidence.append((t, tag.value))
            if tag is UnitaryTag.NOT_PRODUCT_PRESERVING:
                unitary_npp.append(t)
        else:
            evidence.append((t, "NonUnitary"))
            if dyn.is_unital_at(t):
                unital_nonunitary.append(t)
    evidence = tuple(evidence)

    if all(tag == UnitaryTag.LOCAL.value for _, tag in evidence):
        return DynamicsClass(Verdict.ALL_LOCAL_UNITARY, evidence,
                             note="local at every sampled time (sample resolution only)")

    def accept(report: FtdReport | None) -> DynamicsClass | None:
        if report is not None and report.intervals and verify_report(dyn, report):
            return DynamicsClass(Verdict.EXHIBITS_FTD, evidence, report)
        return None

    for t in unitary_npp[:3]:
        try:
            found = accept(closed_system_witness(dyn, t, samples, seed=seed))
        except (NotApplicable, BudgetExhausted, RuntimeError):
            continue
        if found:
            return found

    if dyn.dims.as_tuple() == (2, 2) and unital_nonunitary:
        phi = bell_state("phi+").density()
        ranked = sorted(
            unital_nonunitary,
            key=lambda t: -min_pt_eigenvalue(dyn.evolve(phi, [t])[0]),
        )
        for t in ranked[:3]:
            try:
                found = accept(unital_qubit_witness(dyn, t, samples, seed=seed))
            except (NotApplicable, RuntimeError):
                continue
            if found:
                return found

    for rho0 in witness_candidates(dyn.dims, seed):
        found = accept(detect_ftd(dyn, rho0, samples))
        if found:
            return found
    return DynamicsClass(Verdict.UNDETERMINED, evidence,
                         note="no verified witness found; no claim either way")
