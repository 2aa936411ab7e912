"""Scenario configs: validation, the built-in model library, and per-state runs.

A scenario is a JSON object::

    {
      "version": 1,
      "name": "depolarizing-bell",
      "dynamics": {"kind": "lindblad", "model": "depolarizing", "rate": 1.0},
      "initial_states": ["phi+", {"werner": 0.8}],
      "horizon": 3.0, "samples": 301, "dt": 0.001, "seed": 0
    }

Unknown fields are rejected so that a typo can never silently change a run.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import io as fio
from .channels import CNOT, PAULI, one_sided_dephasing, swap_operator
from .entanglement import classify_separability
from .ftd import (
    ChannelFamily,
    Dynamics,
    FtdReport,
    LindbladSemigroup,
    UnitaryFamily,
    detect_ftd,
    entanglement_trajectory,
    hamiltonian_family,
    verify_report,
)
from .lindblad import (
    DEFAULT_DT,
    Trajectory,
    amplitude_damping_generator,
    dephasing_generator,
    depolarizing_generator,
)
from .states import (
    BELL_NAMES,
    DensityOperator,
    InvalidStateError,
    PureState,
    bell_state,
    isotropic_mix,
    werner_state,
)
from .tensor_algebra import BipartiteDims, DimensionError, kron

CONFIG_VERSION = 1
DEFAULT_SAMPLES = 512


class ConfigError(ValueError):
    """Bad scenario config; the message names the offending field."""

    def __init__(self, field: str, problem: str):
        super().__init__(f"{field}: {problem}")
        self.field = field


TOP_FIELDS = {
    "version", "name", "dims", "dynamics", "initial_states",
    "horizon", "samples", "dt", "seed", "t_bar", "outputs",
}
OUTPUT_FIELDS = {"dir", "states_json"}


# ---------------------------------------------------------------- model library


def _cnot_pulse(t: float) -> np.ndarray:
    # P = (I - CNOT)/2 projects onto |1->; exp(i pi t P) hits CNOT at t = 1
    p = 0.5 * (np.eye(4) - CNOT)
    return np.eye(4) + (np.exp(1j * np.pi * t) - 1.0) * p


def _local_rotations(t: float) -> np.ndarray:
    def rot(pauli, angle):
        return math.cos(angle) * np.eye(2) - 1j * math.sin(angle) * PAULI[pauli]

    return kron(rot("Z", t), rot("X", t))


_SWAP22 = swap_operator((2, 2))


def _partial_swap(t: float) -> np.ndarray:
    # S^2 = I, so exp(-i S t) = cos t I - i sin t S
    return math.cos(t) * np.eye(4) - 1j * math.sin(t) * _SWAP22


UNITARY_MODELS = {
    "cnot-pulse": _cnot_pulse,
    "local-rotations": _local_rotations,
    "partial-swap": _partial_swap,
}
LINDBLAD_MODELS = {
    "depolarizing": depolarizing_generator,
    "amplitude-damping": amplitude_damping_generator,
    "dephasing": dephasing_generator,
}
CHANNEL_MODELS = {"one-sided-dephasing"}


BUILTINS: dict[str, dict] = {
    "depolarizing-bell": {
        "version": 1,
        "name": "depolarizing-bell",
        "dynamics": {"kind": "lindblad", "model": "depolarizing", "rate": 1.0},
        "initial_states": [{"bell": "phi+", "label": "phi+"}],
        "horizon": 3.0,
        "samples": 301,
        "dt": 1e-3,
        "seed": 0,
    },
    "dephasing-witness": {
        "version": 1,
        "name": "dephasing-witness",
        "dynamics": {"kind": "channel", "model": "one-sided-dephasing", "rate": 1.0},
        "initial_states": [{"werner": 2.0 / 3.0, "label": "werner-2/3"}],
        "horizon": 1.0,
        "t_bar": 1.0,
        "samples": 201,
        "seed": 0,
    },
    "amplitude-damping-sudden-death": {
        "version": 1,
        "name": "amplitude-damping-sudden-death",
        "dynamics": {"kind": "lindblad", "model": "amplitude-damping", "rate": 1.0},
        "initial_states": [
            {"amplitudes": [math.sqrt(0.1), 0, 0, math.sqrt(0.9)], "label": "sqrt.1|00>+sqrt.9|11>"},
            {"bell": "phi+", "label": "phi+"},
        ],
        "horizon": 3.0,
        "samples": 301,
        "dt": 1e-3,
        "seed": 0,
    },
    "cnot-pulse": {
        "version": 1,
        "name": "cnot-pulse",
        "dynamics": {"kind": "unitary", "model": "cnot-pulse"},
        "initial_states": [{"werner": 2.0 / 3.0, "label": "werner-2/3"}],
        "horizon": 2.0,
        "t_bar": 1.0,
        "samples": 201,
        "seed": 0,
    },
    "local-rotations": {
        "version": 1,
        "name": "local-rotations",
        "dynamics": {"kind": "unitary", "model": "local-rotations"},
        "initial_states": [
            {"bell": "phi+", "label": "phi+"},
            {"bell": "psi-", "label": "psi-"},
            {"werner": 0.8, "label": "werner-0.8"},
            {"amplitudes": [math.sqrt(0.1), 0, 0, math.sqrt(0.9)], "label": "sqrt.1|00>+sqrt.9|11>"},
        ],
        "horizon": 3.0,
        "samples": 301,
        "seed": 0,
    },
    "partial-swap": {
        "version": 1,
        "name": "partial-swap",
        "dynamics": {"kind": "unitary", "model": "partial-swap"},
        "initial_states": [
            {
                "noise": 1.0 / 3.0,
                "state": {"amplitudes": [0, 1, "0+1j", 0]},
                "label": "noisy-(|01>+i|10>)",
            }
        ],
        "horizon": 1.5,
        "t_bar": math.pi / 4.0,
        "samples": 301,
        "seed": 0,
    },
}


def builtin(name: str) -> dict:
    if name not in BUILTINS:
        raise ConfigError("name", f"unknown built-in scenario {name!r}")
    return copy.deepcopy(BUILTINS[name])


# ---------------------------------------------------------------- validated scenario


@dataclass(frozen=True, eq=False)
class InitialState:
    label: str
    state: DensityOperator


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    dynamics: Dynamics
    initial_states: tuple
    horizon: float
    samples: int
    dt: float
    seed: int
    t_bar: float | None
    out_dir: str | None
    states_json: bool
    raw: dict


def _number(cfg: dict, key: str, default=None, *, positive=False, integer=False):
    if key not in cfg:
        if default is None:
            raise ConfigError(key, "missing required field")
        return default
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(key, f"expected a number, got {val!r}")
    if integer and (not isinstance(val, int)):
        raise ConfigError(key, f"expected an integer, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(key, "must be finite")
    if positive and not val > 0:
        raise ConfigError(key, f"must be positive, got {val!r}")
    return val


def _resolve(base: Path | None, ref: str) -> Path:
    p = Path(ref)
    if not p.is_absolute() and base is not None:
        p = base / p
    if not p.exists():
        raise ConfigError("file", f"referenced file {str(p)!r} does not exist")
    return p


def _dims(value, field: str) -> BipartiteDims:
    try:
        return fio._dims_from_json(value, field)
    except (fio.FormatError, DimensionError) as exc:
        raise ConfigError(field, str(exc)) from exc


def _matrix(value, field: str, base: Path | None) -> np.ndarray:
    try:
        if isinstance(value, dict) and set(value) == {"file"}:
            return fio.read_matrix(_resolve(base, value["file"]))
        return fio.matrix_from_json(value)
    except fio.FormatError as exc:
        raise ConfigError(field, str(exc)) from exc


def _check_fields(obj: Any, allowed: set, field: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(field, "expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(field, f"unknown field(s) {unknown}")
    return obj


def build_dynamics(entry: Any, horizon: float, dt: float, base: Path | None) -> Dynamics:
    field = "dynamics"
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(field, "expected an object with a 'kind'")
    kind = entry["kind"]
    if kind == "lindblad":
        _check_fields(entry, {"kind", "model", "rate", "generator"}, field)
        if "generator" in entry:
            gen_cfg = entry["generator"]
            try:
                if isinstance(gen_cfg, str):
                    gen_cfg = fio.load_json(_resolve(base, gen_cfg))
                gen = fio.generator_from_json(gen_cfg)
            except (fio.FormatError, DimensionError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError("dynamics.generator", str(exc)) from exc
        else:
            model = entry.get("model")
            if model not in LINDBLAD_MODELS:
                raise ConfigError("dynamics.model", f"unknown lindblad model {model!r}")
            gen = LINDBLAD_MODELS[model](_number(entry, "rate", 1.0, positive=True))
        return LindbladSemigroup(gen, horizon, dt)
    if kind == "unitary":
        _check_fields(entry, {"kind", "model"}, field)
        model = entry.get("model")
        if model not in UNITARY_MODELS:
            raise ConfigError("dynamics.model", f"unknown unitary model {model!r}")
        return UnitaryFamily(UNITARY_MODELS[model], (2, 2), horizon)
    if kind == "hamiltonian":
        _check_fields(entry, {"kind", "dims", "hamiltonian"}, field)
        if "dims" not in entry:
            raise ConfigError("dynamics.dims", "missing required field")
        dims = _dims(entry["dims"], "dynamics.dims")
        h = _matrix(entry.get("hamiltonian"), "dynamics.hamiltonian", base)
        if h.shape != (dims.total, dims.total):
            raise ConfigError("dynamics.hamiltonian", f"shape {h.shape} does not match dims")
        if float(np.max(np.abs(h - h.conj().T))) > 1e-9:
            raise ConfigError("dynamics.hamiltonian", "not Hermitian")
        return hamiltonian_family(h, dims, horizon)
    if kind == "channel":
        _check_fields(entry, {"kind", "model", "rate"}, field)
        if entry.get("model") not in CHANNEL_MODELS:
            raise ConfigError("dynamics.model", f"unknown channel model {entry.get('model')!r}")
        rate = _number(entry, "rate", 1.0, positive=True)

        def dephase(t: float):
            # q ramps linearly to 1/2 (complete dephasing) at t = 1/rate
            return one_sided_dephasing(0.5 * min(1.0, rate * t))

        return ChannelFamily(dephase, (2, 2), horizon)
    raise ConfigError("dynamics.kind", f"unknown kind {kind!r}")


def _amplitudes(value, field: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ConfigError(field, "expected a non-empty list")
    out = []
    for x in value:
        if isinstance(x, bool):
            raise ConfigError(field, f"bad amplitude {x!r}")
        if isinstance(x, (int, float)):
            out.append(complex(x))
        elif isinstance(x, str):
            try:
                out.append(complex(x))
            except ValueError as exc:
                raise ConfigError(field, f"bad amplitude {x!r}") from exc
        elif isinstance(x, list) and len(x) == 2:
            out.append(complex(float(x[0]), float(x[1])))
        else:
            raise ConfigError(field, f"bad amplitude {x!r}")
    return np.array(out, dtype=np.complex128)


STATE_FIELDS = {"label", "bell", "amplitudes", "density", "file", "werner", "noise", "state"}


def build_state(entry: Any, dims: BipartiteDims, field: str, base: Path | None) -> tuple[str, DensityOperator]:
    """Parse one initial-state entry; returns ``(label, state)``."""
    if isinstance(entry, str):
        entry = {"bell": entry}
    _check_fields(entry, STATE_FIELDS, field)
    kinds = [k for k in ("bell", "amplitudes", "density", "file", "werner", "noise") if k in entry]
    if len(kinds) != 1:
        raise ConfigError(field, "exactly one of bell/amplitudes/density/file/werner/noise is required")
    kind = kinds[0]
    try:
        if kind == "bell" or kind == "werner":
            which = entry.get("bell", "phi+")
            if which not in BELL_NAMES:
                raise ConfigError(f"{field}.bell", f"unknown Bell state {which!r}")
            if dims.as_tuple() != (2, 2):
                raise ConfigError(f"{field}.{kind}", "Bell states need dims [2, 2]")
            if kind == "bell":
                rho, label = bell_state(which).density(), which
            else:
                p = _number(entry, "werner")
                rho, label = werner_state(p, which), f"werner-{p!r}"
        elif kind == "amplitudes":
            amps = _amplitudes(entry["amplitudes"], f"{field}.amplitudes")
            if amps.size != dims.total:
                raise ConfigError(f"{field}.amplitudes", f"{amps.size} entries, dims need {dims.total}")
            rho, label = PureState.normalized(amps, dims).density(), "amplitudes"
        elif kind == "density":
            rho = DensityOperator(_matrix(entry["density"], f"{field}.density", base), dims)
            label = "density"
        elif kind == "file":
            st = fio.parse_state(_resolve(base, entry["file"]).read_text(encoding="utf-8"))
            if st.dims != dims:
                raise ConfigError(f"{field}.file", f"state dims {st.dims.as_tuple()} differ from dynamics")
            rho = st.density() if isinstance(st, PureState) else st
            label = Path(entry["file"]).stem
        else:
            if "state" not in entry:
                raise ConfigError(f"{field}.state", "noise needs an inner 'state'")
            lam = _number(entry, "noise")
            _, inner = build_state(entry["state"], dims, f"{field}.state", base)
            rho, label = isotropic_mix(inner, lam), f"noisy-{lam!r}"
    except (InvalidStateError, DimensionError, fio.FormatError) as exc:
        raise ConfigError(field, str(exc)) from exc
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(field, str(exc)) from exc
    label = entry.get("label", label)
    if not isinstance(label, str) or not label:
        raise ConfigError(f"{field}.label", "must be a non-empty string")
    return label, rho


def load_config(arg: str) -> tuple[dict, Path | None]:
    """A path to a JSON file, or the name of a built-in scenario."""
    p = Path(arg)
    if p.exists():
        try:
            return fio.load_json(p), p.parent
        except (OSError, ValueError) as exc:
            raise ConfigError("config", f"cannot read {arg!r}: {exc}") from exc
    if arg in BUILTINS:
        return builtin(arg), None
    raise ConfigError("config", f"{arg!r} is neither a file nor a built-in scenario")


def parse_scenario(cfg: Any, base: Path | None = None, overrides: dict | None = None) -> Scenario:
    cfg = _check_fields(cfg, TOP_FIELDS, "config")
    cfg = copy.deepcopy(cfg)
    for key, val in (overrides or {}).items():
        if val is not None:
            cfg[key] = val
    if cfg.get("version") != CONFIG_VERSION:
        raise ConfigError("version", f"expected {CONFIG_VERSION}, got {cfg.get('version')!r}")
    name = cfg.get("name", "scenario")
    if not isinstance(name, str) or not name or "/" in name:
        raise ConfigError("name", "must be a non-empty string without '/'")
    horizon = float(_number(cfg, "horizon", positive=True))
    samples = int(_number(cfg, "samples", DEFAULT_SAMPLES, integer=True))
    if samples < 2:
        raise ConfigError("samples", "must be >= 2")
    dt = float(_number(cfg, "dt", DEFAULT_DT, positive=True))
    seed = int(_number(cfg, "seed", 0, integer=True))
    t_bar = cfg.get("t_bar")
    if t_bar is not None:
        t_bar = float(_number(cfg, "t_bar"))
        if not 0.0 < t_bar <= horizon:
            raise ConfigError("t_bar", f"must lie in (0, horizon], got {t_bar!r}")
    outputs = _check_fields(cfg.get("outputs", {}), OUTPUT_FIELDS, "outputs")
    if "dynamics" not in cfg:
        raise ConfigError("dynamics", "missing required field")
    dyn = build_dynamics(cfg["dynamics"], horizon, dt, base)
    if "dims" in cfg and _dims(cfg["dims"], "dims") != dyn.dims:
        raise ConfigError("dims", f"{cfg['dims']} differs from the dynamics dims {list(dyn.dims.as_tuple())}")
    raw_states = cfg.get("initial_states")
    if not isinstance(raw_states, list) or not raw_states:
        raise ConfigError("initial_states", "expected a non-empty list")
    states = []
    seen = set()
    for i, entry in enumerate(raw_states):
        label, rho = build_state(entry, dyn.dims, f"initial_states[{i}]", base)
        if label in seen:
            label = f"{label}#{i}"
        seen.add(label)
        states.append(InitialState(label, rho))
    return Scenario(
        name=name,
        dynamics=dyn,
        initial_states=tuple(states),
        horizon=horizon,
        samples=samples,
        dt=dt,
        seed=seed,
        t_bar=t_bar,
        out_dir=outputs.get("dir"),
        states_json=bool(outputs.get("states_json", False)),
        raw=cfg,
    )


def set_param(cfg: dict, path: str, value: float) -> dict:
    """Copy of ``cfg`` with the dotted field ``path`` replaced; the field must already exist."""
    out = copy.deepcopy(cfg)
    node = out
    keys = path.split(".")
    for k in keys[:-1]:
        if not isinstance(node, dict) or k not in node:
            raise ConfigError(path, "no such field in the config")
        node = node[k]
    last = keys[-1]
    if not isinstance(node, dict):
        raise ConfigError(path, "no such field in the config")
    if last not in node:
        # rate has a documented default, so it may be swept even when omitted
        if last != "rate":
            raise ConfigError(path, "no such field in the config")
    old = node.get(last)
    node[last] = int(round(value)) if isinstance(old, int) and not isinstance(old, bool) else float(value)
    return out


# ---------------------------------------------------------------- running


@dataclass(frozen=True, eq=False)
class StateResult:
    label: str
    verdict: str  # FtdDetected | NoFtdFound | NotEntangled
    report: FtdReport | None
    trajectory: Trajectory
    verified: bool | None

    @property
    def onset(self) -> float | None:
        return self.report.onset if self.report is not None else None


def run_state(sc: Scenario, init: InitialState) -> StateResult:
    rho0 = init.state
    if not classify_separability(rho0).entangled:
        traj = entanglement_trajectory(sc.dynamics, rho0, sc.samples)
        return StateResult(init.label, "NotEntangled", None, traj, None)
    report = detect_ftd(sc.dynamics, rho0, sc.samples)
    if report is None:
        traj = entanglement_trajectory(sc.dynamics, rho0, sc.samples)
        return StateResult(init.label, "NoFtdFound", None, traj, None)
    return StateResult(init.label, "FtdDetected", report, report.trajectory,
                       verify_report(sc.dynamics, report))


def safe_label(label: str) -> str:
    label = label.replace("+", "plus")
    keep = "".join(c if c.isalnum() or c in "-_." else "_" for c in label)
    return keep.strip("._") or "state"
