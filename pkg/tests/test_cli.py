import json
import math

import numpy as np
import pytest

from ftdsim import io as fio
from ftdsim.channels import CNOT, constant_channel, one_sided_dephasing, swap_operator
from ftdsim.cli import main
from ftdsim.ftd import FtdReport, verify_report
from ftdsim.scenario import BUILTINS, ConfigError, builtin, load_config, parse_scenario, set_param


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def summary(path):
    lines = path.read_text().splitlines()
    head = lines[0].split(",")
    return [dict(zip(head, ln.split(","))) for ln in lines[1:]]


def test_depolarizing_bell_summary(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "depolarizing-bell", "--out-dir", str(tmp_path))
    assert code == 0
    rows = summary(tmp_path / "depolarizing-bell" / "summary.csv")
    assert rows[0]["verdict"] == "FtdDetected"
    assert abs(float(rows[0]["onset"]) - math.log(3)) <= 1e-4
    csv_text = (tmp_path / "depolarizing-bell" / "phiplus.csv").read_text()
    assert csv_text.splitlines()[0] == "t,tr,purity,lambda_minus,negativity"
    assert "1.0986" in out


def test_local_rotations_no_ftd(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "local-rotations", "--out-dir", str(tmp_path), "--samples", "101")
    assert code == 0
    rows = summary(tmp_path / "local-rotations" / "summary.csv")
    assert len(rows) == 4
    assert all(r["verdict"] == "NoFtdFound" for r in rows)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_every_builtin_runs_and_reports_reverify(name, tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", name, "--out-dir", str(tmp_path), "--samples", "101")
    assert code == 0
    sc = parse_scenario(builtin(name))
    for rep in sorted((tmp_path / name).glob("*.report.json")):
        witness, intervals, method = fio.report_from_json(fio.load_json(rep))
        assert verify_report(sc.dynamics, FtdReport(witness, intervals, None, method))


def test_outputs_are_byte_identical(tmp_path, capsys):
    for d in ("a", "b"):
        run(capsys, "simulate", "amplitude-damping-sudden-death", "--out-dir", str(tmp_path / d),
            "--samples", "101", "--jobs", "1" if d == "a" else "4")
    files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert files_a == files_b and files_a
    for rel in files_a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_config_errors_exit_2(tmp_path, capsys):
    base = builtin("cnot-pulse")
    cases = {
        "dims": dict(base, dims=[2]),
        "extra": dict(base, extra=1),
        "version": dict(base, version=7),
        "horizon": dict(base, horizon=-1),
        "initial_states[0]": dict(base, initial_states=[{"amplitudes": [1, 0, 0]}]),
        "dynamics.model": dict(base, dynamics={"kind": "unitary", "model": "nope"}),
    }
    for field, cfg in cases.items():
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg))
        code, _, err = run(capsys, "simulate", str(path), "--out-dir", str(tmp_path))
        assert code == 2, field
        assert field in err or field == "extra" and "extra" in err
    code, _, err = run(capsys, "simulate", str(tmp_path / "missing.json"))
    assert code == 2


def test_missing_referenced_file(tmp_path, capsys):
    cfg = builtin("cnot-pulse")
    cfg["initial_states"] = [{"file": "nowhere.txt"}]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    code, _, err = run(capsys, "simulate", str(path))
    assert code == 2 and "does not exist" in err


def test_state_file_and_generator_file(tmp_path, capsys):
    from ftdsim.lindblad import depolarizing_generator
    from ftdsim.states import bell_state

    (tmp_path / "bell.txt").write_text(fio.format_state(bell_state()))
    fio.dump_json(fio.generator_to_json(depolarizing_generator()), tmp_path / "gen.json")
    cfg = {
        "version": 1, "name": "from-files",
        "dynamics": {"kind": "lindblad", "generator": "gen.json"},
        "initial_states": [{"file": "bell.txt"}],
        "horizon": 2.0, "samples": 101,
    }
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    code, _, _ = run(capsys, "simulate", str(tmp_path / "c.json"), "--out-dir", str(tmp_path / "o"))
    assert code == 0
    rows = summary(tmp_path / "o" / "from-files" / "summary.csv")
    assert abs(float(rows[0]["onset"]) - math.log(3)) <= 1e-4


def test_integration_error_exit_3(tmp_path, capsys):
    cfg = builtin("depolarizing-bell")
    cfg["dynamics"]["rate"] = 100.0
    cfg["dt"] = 0.1
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    code, _, err = run(capsys, "simulate", str(tmp_path / "c.json"), "--out-dir", str(tmp_path))
    assert code == 3
    assert "step" in err and "negative eigenvalue" in err


def test_classify_unitaries(tmp_path, capsys):
    fio.write_matrix(tmp_path / "cnot.txt", CNOT)
    fio.write_matrix(tmp_path / "swap.txt", swap_operator((2, 2)))
    rng = np.random.default_rng(0)
    ua, ub = np.linalg.qr(rng.normal(size=(2, 2)))[0], np.linalg.qr(rng.normal(size=(3, 3)))[0]
    fio.write_matrix(tmp_path / "loc.txt", np.kron(ua, ub))
    fio.write_matrix(tmp_path / "bad.txt", 2 * np.eye(4))
    assert run(capsys, "classify", str(tmp_path / "cnot.txt"))[1].startswith("NotProductPreserving")
    assert run(capsys, "classify", str(tmp_path / "swap.txt"))[1].startswith("LocalSwap")
    code, out, _ = run(capsys, "classify", str(tmp_path / "loc.txt"), "--dims", "2x3")
    assert code == 0 and out.startswith("Local") and "U_A" in out and "U_B" in out
    assert run(capsys, "classify", str(tmp_path / "loc.txt"))[0] == 2
    assert run(capsys, "classify", str(tmp_path / "bad.txt"))[0] == 4
    (tmp_path / "junk.txt").write_text("2 2\n1 0\n")
    assert run(capsys, "classify", str(tmp_path / "junk.txt"))[0] == 2


def test_classify_channels(tmp_path, capsys):
    fio.dump_json(fio.channel_to_json(one_sided_dephasing(0.5)), tmp_path / "d.json")
    fio.dump_json(fio.channel_to_json(constant_channel([1, 0, 0, 0], (2, 2))), tmp_path / "c.json")
    code, out, _ = run(capsys, "classify", str(tmp_path / "d.json"), "--channel")
    assert code == 0 and "unital: yes" in out and "pure_state_preserving: no" in out
    code, out, _ = run(capsys, "classify", str(tmp_path / "c.json"), "--channel", "--trials", "50")
    assert "unital: no" in out and "pure_state_preserving: yes" in out
    fio.dump_json(fio.channel_to_json(__import__("ftdsim").Channel.unitary(CNOT, (2, 2))), tmp_path / "u.json")
    code, out, _ = run(capsys, "classify", str(tmp_path / "u.json"), "--channel")
    assert "reconstructed unitary" in out


def test_witness_subcommand(tmp_path, capsys):
    code, out, _ = run(capsys, "witness", "dephasing-witness", "--out-dir", str(tmp_path))
    assert code == 0 and "unital_witness" in out and "verified: yes" in out
    obj = fio.load_json(tmp_path / "dephasing-witness" / "witness.report.json")
    assert obj["details"]["p"] == pytest.approx(2 / 3)
    code, out, _ = run(capsys, "witness", "cnot-pulse", "--t", "1.0", "--out-dir", str(tmp_path))
    assert code == 0 and "closed_witness" in out
    code, out, _ = run(capsys, "witness", "local-rotations", "--t", "1.0", "--out-dir", str(tmp_path))
    assert code == 1 and "NotApplicable" in out
    assert run(capsys, "witness", "cnot-pulse", "--t", "9", "--out-dir", str(tmp_path))[0] == 2


def test_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "depolarizing-bell", "--param", "dynamics.rate",
                       "--range", "0.5:2:4", "--out-dir", str(tmp_path), "--samples", "101")
    assert code == 0
    lines = (tmp_path / "depolarizing-bell-sweep" / "sweep.csv").read_text().splitlines()
    assert len(lines) == 5
    for ln in lines[1:]:
        rate, _, verdict, onset = ln.split(",")[:4]
        assert verdict == "FtdDetected"
        assert float(onset) == pytest.approx(math.log(3) / float(rate), abs=1e-4)
    assert run(capsys, "sweep", "depolarizing-bell", "--param", "nope", "--range", "0:1:2")[0] == 2
    assert run(capsys, "sweep", "depolarizing-bell", "--param", "horizon", "--range", "0:1")[0] == 2


def test_set_param_and_loader():
    cfg = builtin("cnot-pulse")
    assert set_param(cfg, "samples", 50.0)["samples"] == 50
    with pytest.raises(ConfigError):
        set_param(cfg, "dynamics.nope", 1.0)
    with pytest.raises(ConfigError):
        load_config("definitely-not-a-scenario")
