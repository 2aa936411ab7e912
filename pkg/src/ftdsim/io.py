"""Text, JSON and CSV formats for matrices, states, channels, generators and reports.

Matrix text form::

    rows cols
    re+imj re+imj ...
    ...

Entries are parsed with :func:`complex`, which is locale independent. JSON
matrices are nested ``[[[re, im], ...], ...]`` arrays; the text form
embedded as a string is also accepted on input.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Any

import numpy as np

from .channels import Channel
from .entanglement import EntanglementVerdict
from .ftd import FtdReport
from .lindblad import LindbladGenerator, Trajectory
from .states import DensityOperator, PureState
from .tensor_algebra import BipartiteDims

CSV_HEADER = ["t", "tr", "purity", "lambda_minus", "negativity"]


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------- matrix text


def _fmt_complex(z: complex) -> str:
    re = repr(float(z.real))
    im = repr(float(z.imag))
    if not im.startswith("-"):
        im = "+" + im
    return f"{re}{im}j"


def format_matrix(m) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [" ".join(_fmt_complex(z) for z in row) for row in m]
    return "\n".join(lines) + "\n"


def _parse_entry(tok: str) -> complex:
    try:
        z = complex(tok)
    except ValueError as exc:
        raise FormatError(f"cannot parse complex entry {tok!r}") from exc
    if not np.isfinite(z.real) or not np.isfinite(z.imag):
        raise FormatError(f"non-finite entry {tok!r}")
    return z


def _parse_matrix_lines(lines: list[str]) -> np.ndarray:
    if not lines:
        raise FormatError("empty matrix block")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"matrix header must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"bad matrix header {lines[0]!r}") from exc
    if rows < 1 or cols < 1:
        raise FormatError("matrix dimensions must be positive")
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(f"expected {rows} rows, found {len(body)}")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != cols:
            raise FormatError(f"row {i} has {len(toks)} entries, expected {cols}")
        out[i] = [_parse_entry(t) for t in toks]
    return out


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_matrix(text: str) -> np.ndarray:
    return _parse_matrix_lines(_content_lines(text))


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def write_matrix(path, m) -> None:
    Path(path).write_text(format_matrix(m), encoding="utf-8")


# ---------------------------------------------------------------- state text


def format_state(state: PureState | DensityOperator) -> str:
    d = state.dims
    body = state.amplitudes.reshape(-1, 1) if isinstance(state, PureState) else state.matrix
    return f"dims {d.d_a} {d.d_b}\n" + format_matrix(body)


def parse_state(text: str) -> PureState | DensityOperator:
    """A ``dims d_A d_B`` header then a one-column vector or a square density matrix."""
    lines = _content_lines(text)
    if not lines or not lines[0].startswith("dims"):
        raise FormatError("state text must start with 'dims d_A d_B'")
    parts = lines[0].split()
    if len(parts) != 3:
        raise FormatError(f"bad dims line {lines[0]!r}")
    dims = BipartiteDims(int(parts[1]), int(parts[2]))
    m = _parse_matrix_lines(lines[1:])
    if m.shape[1] == 1:
        return PureState(m[:, 0], dims)
    return DensityOperator(m, dims)


# ---------------------------------------------------------------- JSON matrices


def matrix_to_json(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj: Any) -> np.ndarray:
    if isinstance(obj, str):
        return parse_matrix(obj)
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError("matrix must be a text block or [[[re, im], ...], ...]") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise FormatError(f"nested matrix array has shape {arr.shape}, expected (rows, cols, 2)")
    if not np.all(np.isfinite(arr)):
        raise FormatError("non-finite matrix entry")
    return arr[..., 0] + 1j * arr[..., 1]


def _dims_from_json(obj: Any, field: str = "dims") -> BipartiteDims:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise FormatError(f"'{field}' must be a pair [d_A, d_B]")
    try:
        return BipartiteDims(int(obj[0]), int(obj[1]))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid '{field}': {exc}") from exc


def _check_keys(obj: dict, allowed: set, what: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise FormatError(f"unknown field(s) in {what}: {sorted(unknown)}")


# ---------------------------------------------------------------- channels and generators


def channel_to_json(ch: Channel) -> dict:
    out: dict = {"kraus": [matrix_to_json(k) for k in ch.kraus]}
    if ch.dims is not None:
        out["dims"] = list(ch.dims.as_tuple())
    return out


def channel_from_json(obj: dict) -> Channel:
    if not isinstance(obj, dict) or "kraus" not in obj:
        raise FormatError("channel JSON needs a 'kraus' list")
    _check_keys(obj, {"dims", "kraus"}, "channel")
    dims = _dims_from_json(obj["dims"]) if "dims" in obj else None
    return Channel(tuple(matrix_from_json(k) for k in obj["kraus"]), dims)


def generator_to_json(gen: LindbladGenerator) -> dict:
    return {
        "dims": list(gen.dims.as_tuple()) if gen.dims else None,
        "hamiltonian": matrix_to_json(gen.hamiltonian),
        "jumps": [matrix_to_json(a) for a in gen.jump_operators],
    }


def generator_from_json(obj: dict) -> LindbladGenerator:
    if not isinstance(obj, dict):
        raise FormatError("generator JSON must be an object")
    _check_keys(obj, {"dims", "hamiltonian", "jumps"}, "generator")
    for key in ("dims", "hamiltonian"):
        if key not in obj:
            raise FormatError(f"generator JSON is missing '{key}'")
    dims = _dims_from_json(obj["dims"])
    jumps = tuple(matrix_from_json(a) for a in obj.get("jumps", []))
    return LindbladGenerator(matrix_from_json(obj["hamiltonian"]), jumps, dims)


def load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj: Any, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------- trajectories and reports


def trajectory_rows(traj: Trajectory) -> list[list[float]]:
    rows = []
    for i, (t, s) in enumerate(zip(traj.times, traj.states)):
        lam = traj.lambda_minus[i] if traj.lambda_minus is not None else float("nan")
        neg = traj.negativity[i] if traj.negativity is not None else float("nan")
        rows.append([float(t), s.trace(), s.purity(), float(lam), float(neg)])
    return rows


def trajectory_to_csv(traj: Trajectory, path=None) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in trajectory_rows(traj):
        w.writerow([repr(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise FormatError(f"unexpected CSV header {header}")
        rows = [[float(x) for x in row] for row in reader]
    arr = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))
    return {name: arr[:, i] for i, name in enumerate(CSV_HEADER)}


def trajectory_states_to_json(traj: Trajectory) -> list:
    return [{"t": float(t), "rho": matrix_to_json(s.matrix)} for t, s in zip(traj.times, traj.states)]


def verdict_to_json(v: EntanglementVerdict) -> dict:
    return v.to_json()


def _jsonable(x: Any) -> Any:
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def report_to_json(report: FtdReport, trajectory_csv_path: str | None = None) -> dict:
    out = {
        "method": report.method.value,
        "dims": list(report.witness_state.dims.as_tuple()),
        "witness": matrix_to_json(report.witness_state.matrix),
        "intervals": [[float(iv.a), float(iv.b), bool(iv.open_ended)] for iv in report.intervals],
        "trajectory_csv_path": trajectory_csv_path,
    }
    if report.t_bar is not None:
        out["t_bar"] = float(report.t_bar)
    if report.details:
        out["details"] = _jsonable(report.details)
    return out


def report_from_json(obj: dict):
    """Witness state and intervals from a report JSON (trajectory is not restored)."""
    from .ftd import Interval, Method

    dims = _dims_from_json(obj.get("dims", [2, 2]))
    witness = DensityOperator(matrix_from_json(obj["witness"]), dims)
    intervals = tuple(Interval(float(a), float(b), bool(o)) for a, b, o in obj["intervals"])
    return witness, intervals, Method(obj["method"])
