"""``ftdsim`` command line: simulate, classify, witness, sweep.

Exit codes: 0 success, 1 analysis ran but found no witness, 2 config or
parse error, 3 numerical invariant violated during integration, 4
non-unitary matrix handed to unitary classification.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io as fio
from .channels import (
    BudgetExhausted,
    ChannelError,
    NotUnitaryError,
    classify_product_preserving_unitary,
    is_pure_state_preserving,
    is_unital,
    reconstruct_unitary_from_channel,
)
from .ftd import NotApplicable, closed_system_witness, unital_qubit_witness, verify_report
from .lindblad import IntegrationError
from .scenario import (
    BUILTINS,
    ConfigError,
    Scenario,
    StateResult,
    load_config,
    parse_scenario,
    run_state,
    safe_label,
    set_param,
)
from .tensor_algebra import BipartiteDims, DimensionError, is_unitary

EXIT_OK = 0
EXIT_NO_WITNESS = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_NOT_UNITARY = 4


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def format_table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ---------------------------------------------------------------- simulate


def _run_all(sc: Scenario, jobs: int) -> list[StateResult]:
    if jobs <= 1 or len(sc.initial_states) == 1:
        return [run_state(sc, s) for s in sc.initial_states]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        # map keeps input order, so files are written in config order
        return list(pool.map(lambda s: run_state(sc, s), sc.initial_states))


def write_results(sc: Scenario, results: list[StateResult], out_dir: Path) -> list[list]:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    used: set[str] = set()
    for i, res in enumerate(results):
        stem = safe_label(res.label)
        if stem in used:
            stem = f"{stem}-{i}"
        used.add(stem)
        csv_name = f"{stem}.csv"
        fio.trajectory_to_csv(res.trajectory, out_dir / csv_name)
        if sc.states_json:
            fio.dump_json(fio.trajectory_states_to_json(res.trajectory), out_dir / f"{stem}.states.json")
        if res.report is not None:
            fio.dump_json(fio.report_to_json(res.report, csv_name), out_dir / f"{stem}.report.json")
        n_int = len(res.report.intervals) if res.report else 0
        rows.append([res.label, res.verdict, res.onset, n_int, res.verified])
    summary = ["label,verdict,onset,intervals,verified"]
    for label, verdict, onset, n_int, ver in rows:
        summary.append(",".join([
            json.dumps(label), verdict, "" if onset is None else repr(float(onset)),
            str(n_int), "" if ver is None else str(ver).lower(),
        ]))
    (out_dir / "summary.csv").write_text("\n".join(summary) + "\n", encoding="utf-8")
    return rows


SUMMARY_HEADER = ["state", "verdict", "onset a", "intervals", "verified"]


def simulate(sc: Scenario, out_dir: Path, jobs: int) -> list[list]:
    results = _run_all(sc, jobs)
    return write_results(sc, results, out_dir)


def _scenario_from_args(args, cfg_arg: str | None = None) -> Scenario:
    cfg, base = load_config(cfg_arg or args.config)
    overrides = {"seed": args.seed, "dt": args.dt, "samples": args.samples}
    return parse_scenario(cfg, base, overrides)


def _out_dir(args, sc: Scenario) -> Path:
    root = Path(args.out_dir) if args.out_dir else Path(sc.out_dir or "ftd-out")
    return root / sc.name


def cmd_simulate(args) -> int:
    sc = _scenario_from_args(args)
    out = _out_dir(args, sc)
    rows = simulate(sc, out, args.jobs)
    print(f"scenario {sc.name}: {sc.dynamics.kind} dynamics, horizon {sc.horizon}, {sc.samples} samples")
    print(format_table(SUMMARY_HEADER, rows))
    print(f"outputs in {out}")
    return EXIT_OK


# ---------------------------------------------------------------- sweep


def parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--range", f"expected a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError("--range", f"expected a:b:n, got {text!r}") from exc
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise ConfigError("--range", "n must be >= 1 and the ends finite")
    return np.linspace(a, b, n)


def cmd_sweep(args) -> int:
    cfg, base = load_config(args.config)
    values = parse_range(args.range)
    overrides = {"seed": args.seed, "dt": args.dt, "samples": args.samples}
    scenarios = []
    for v in values:
        scenarios.append((float(v), parse_scenario(set_param(cfg, args.param, float(v)), base, overrides)))
    name = scenarios[0][1].name
    root = (Path(args.out_dir) if args.out_dir else Path(scenarios[0][1].out_dir or "ftd-out")) / f"{name}-sweep"
    table = []
    for i, (v, sc) in enumerate(scenarios):
        rows = simulate(sc, root / f"{i:03d}", args.jobs)
        table += [[repr(v)] + row for row in rows]
    lines = ["value,label,verdict,onset,intervals,verified"]
    for v, label, verdict, onset, n_int, ver in table:
        lines.append(",".join([
            v, json.dumps(label), verdict, "" if onset is None else repr(float(onset)),
            str(n_int), "" if ver is None else str(ver).lower(),
        ]))
    root.mkdir(parents=True, exist_ok=True)
    (root / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"sweep of {args.param} over {len(values)} values")
    print(format_table([args.param] + SUMMARY_HEADER, table))
    print(f"outputs in {root}")
    return EXIT_OK


# ---------------------------------------------------------------- witness


def cmd_witness(args) -> int:
    sc = _scenario_from_args(args)
    t_bar = args.t if args.t is not None else (sc.t_bar if sc.t_bar is not None else sc.horizon)
    if not 0.0 < t_bar <= sc.horizon:
        raise ConfigError("--t", f"must lie in (0, horizon={sc.horizon}]")
    dyn = sc.dynamics
    try:
        if dyn.unitary_at(t_bar) is not None:
            report = closed_system_witness(dyn, t_bar, sc.samples, seed=sc.seed)
        else:
            report = unital_qubit_witness(dyn, t_bar, sc.samples, seed=sc.seed)
    except NotApplicable as exc:
        print(f"NotApplicable at t={t_bar!r}: {exc}")
        return EXIT_NO_WITNESS
    except BudgetExhausted as exc:
        print(f"BudgetExhausted at t={t_bar!r}: {exc}")
        return EXIT_NO_WITNESS
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    csv_name = "witness.csv"
    fio.trajectory_to_csv(report.trajectory, out / csv_name)
    fio.dump_json(fio.report_to_json(report, csv_name), out / "witness.report.json")
    verified = verify_report(dyn, report)
    print(f"witness method {report.method.value} at t_bar={t_bar!r}")
    for key in ("lambda", "delta", "p", "window", "lambda_minus_initial", "lambda_minus_image"):
        if key in report.details:
            print(f"  {key} = {report.details[key]!r}")
    rows = [[f"{iv.a:.6f}", f"{iv.b:.6f}", iv.open_ended] for iv in report.intervals]
    print(format_table(["a", "b", "open-ended"], rows))
    print(f"verified: {_fmt(verified)}")
    print(f"outputs in {out}")
    return EXIT_OK


# ---------------------------------------------------------------- classify


def _parse_dims(text: str | None, n: int) -> BipartiteDims:
    if text is None:
        d = math.isqrt(n)
        if d * d != n:
            raise ConfigError("--dims", f"size {n} is not a square; pass --dims AxB")
        return BipartiteDims(d, d)
    try:
        a, b = (int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError("--dims", f"expected AxB, got {text!r}") from exc
    dims = BipartiteDims(a, b)
    if dims.total != n:
        raise ConfigError("--dims", f"{a}x{b} does not match matrix size {n}")
    return dims


def _print_matrix(name: str, m: np.ndarray) -> None:
    print(f"{name}:")
    print(fio.format_matrix(m), end="")


def cmd_classify(args) -> int:
    path = Path(args.file)
    if not path.exists():
        raise ConfigError("file", f"{args.file!r} does not exist")
    if args.channel:
        try:
            ch = fio.channel_from_json(fio.load_json(path))
        except (ValueError, ChannelError, DimensionError) as exc:
            raise ConfigError("channel", str(exc)) from exc
        unital = is_unital(ch)
        purity = is_pure_state_preserving(ch, trials=args.trials, seed=args.seed or 0)
        print("trace_preserving: yes")
        print(f"unital: {_fmt(unital)}")
        print(f"pure_state_preserving: {_fmt(purity.preserving)} "
              f"(checked {purity.checked} states, seed {args.seed or 0})")
        if unital and purity.preserving:
            try:
                v = reconstruct_unitary_from_channel(ch, seed=args.seed or 0)
            except ChannelError as exc:
                print(f"reconstruction failed: {type(exc).__name__}: {exc}")
            else:
                _print_matrix("reconstructed unitary", v)
        return EXIT_OK

    try:
        u = fio.read_matrix(path)
    except (fio.FormatError, OSError) as exc:
        raise ConfigError("file", str(exc)) from exc
    if u.shape[0] != u.shape[1]:
        raise ConfigError("file", f"matrix is {u.shape[0]}x{u.shape[1]}, not square")
    dims = _parse_dims(args.dims, u.shape[0])
    if not is_unitary(u):
        raise NotUnitaryError("matrix is not unitary within 1e-9")
    cls = classify_product_preserving_unitary(u, dims)
    print(cls.tag.value)
    if cls.factors is not None:
        _print_matrix("U_A", cls.factors[0])
        _print_matrix("U_B", cls.factors[1])
    elif cls.reason:
        print(f"reason: {cls.reason}")
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--dt", type=float, default=None, help="override the integrator step")
    common.add_argument("--samples", type=int, default=None, help="override the time-grid size")
    common.add_argument("--out-dir", default=None, help="output root (default: config outputs.dir or ftd-out)")
    common.add_argument("--jobs", type=int, default=4, help="worker threads for independent initial states")

    p = argparse.ArgumentParser(
        prog="ftdsim",
        description="Finite-time disentanglement simulator.",
        epilog="built-in scenarios: " + ", ".join(BUILTINS),
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="run a scenario over its initial states")
    s.add_argument("config", help="scenario JSON file or built-in name")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("classify", parents=[common], help="classify a unitary matrix or channel file")
    c.add_argument("file")
    c.add_argument("--channel", action="store_true", help="file is channel JSON, not a unitary matrix")
    c.add_argument("--dims", default=None, help="local dimensions AxB (default: square split)")
    c.add_argument("--trials", type=int, default=500, help="random purity-test trials")
    c.set_defaults(func=cmd_classify)

    w = sub.add_parser("witness", parents=[common], help="synthesize an FTD witness at one time")
    w.add_argument("config")
    w.add_argument("--t", type=float, default=None, help="time t_bar (default: config t_bar or horizon)")
    w.set_defaults(func=cmd_witness)

    sw = sub.add_parser("sweep", parents=[common], help="rerun a scenario across a parameter range")
    sw.add_argument("config")
    sw.add_argument("--param", required=True, help="dotted config field, e.g. dynamics.rate")
    sw.add_argument("--range", required=True, help="a:b:n, n evenly spaced values")
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except NotUnitaryError as exc:
        print(f"not unitary: {exc}", file=sys.stderr)
        return EXIT_NOT_UNITARY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
