"""
命令行与验收流程测试
"""
import json
import math

import pytest

from experiments import AcceptanceSuite, RunConfig, build_session, compute_reports
from errors import ResolutionGuardError
from export import CsvExporter
from main import main
from measure import dirac, load_measure, read_header, save_measure


def test_verify_zero_interval(presets_dir, tmp_path):
    code = main(["verify", "--config", str(presets_dir / "zero_interval.json"), "--out", str(tmp_path)])
    assert code == 0
    rows = CsvExporter(tmp_path).read_rows("checks.csv")
    assert rows and all(r["passed"] == "1" for r in rows)
    assert (tmp_path / "report.csv").exists()


def test_verify_shallow_depth_fails_guard(presets_dir, tmp_path):
    code = main(["verify", "--config", str(presets_dir / "cantor_shallow.json"), "--out", str(tmp_path)])
    assert code == 1
    rows = CsvExporter(tmp_path).read_rows("checks.csv")
    assert [(r["check"], r["passed"]) for r in rows] == [("guard", "0")]
    assert "atom-resolution guard" in rows[0]["detail"]


def test_build_from_ifs_file(presets_dir, tmp_path):
    ifs_path = presets_dir / "cantor_uniform.ifs.json"
    assert main(["build", "--config", str(ifs_path), "--depth", "4", "--out", str(tmp_path)]) == 0
    path = tmp_path / "cantor_uniform_depth4.txt"
    measure = load_measure(path)
    assert measure.size == 16
    assert read_header(path)["depth"] == "4"

    # IFS 文件缺少深度
    assert main(["build", "--config", str(ifs_path), "--out", str(tmp_path)]) == 2


def test_report_with_q_override(presets_dir, tmp_path):
    code = main(["report", "--config", str(presets_dir / "cantor_biased.json"),
                 "--q-grid", "0,1", "--out", str(tmp_path)])
    assert code == 0
    rows = CsvExporter(tmp_path).read_rows("report.csv")
    assert {r["q"] for r in rows} == {"0.0", "1.0"}
    tau_rows = [r for r in rows if r["quantity"] == "tau"]
    assert [float(r["value"]) for r in tau_rows] == pytest.approx([math.log(2) / math.log(3), 0.0], abs=1e-6)


def test_bad_q_grid_exits_with_error(presets_dir, tmp_path):
    code = main(["report", "--config", str(presets_dir / "cantor_biased.json"),
                 "--q-grid", "0,abc", "--out", str(tmp_path)])
    assert code == 2


def test_metric_command(tmp_path, capsys):
    mu = save_measure(tmp_path / "mu.txt", dirac([0.0]))
    nu = save_measure(tmp_path / "nu.txt", dirac([0.5]))
    witness = tmp_path / "witness.csv"
    assert main(["metric", "--mu", str(mu), "--nu", str(nu), "--witness", str(witness)]) == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("L = "))
    assert float(line[4:]) == pytest.approx(0.5, abs=1e-9)
    assert len(CsvExporter(tmp_path).read_rows("witness.csv")) == 2


def test_acceptance_on_uniform_cantor(presets_dir):
    session = build_session(RunConfig.load(presets_dir / "cantor_uniform.json"))
    suite = AcceptanceSuite(session)
    results = suite.run(["guard", "tau_shape", "grid_oracle", "mode_agreement", "typgen_certificate"])
    failed = [(r.name, r.detail) for r in results if not r.passed]
    assert not failed
    assert all(r.passed for r in suite.check_metric(trials=50, triples=10))


def test_unknown_check_is_reported(presets_dir):
    session = build_session(RunConfig.load(presets_dir / "cantor_shallow.json").with_overrides(depth=10))
    results = AcceptanceSuite(session).run(["no_such_check"])
    assert results[0].name == "guard" and results[0].passed
    assert results[1].name == "no_such_check" and not results[1].passed


def test_single_atom_measure_input(tmp_path):
    path = save_measure(tmp_path / "point.txt", dirac([0.25]))
    run = RunConfig.from_dict({
        "name": "point",
        "input": {"kind": "measure", "path": path.name},
        "grid_base": 2,
        "ladder": {"k_lo": 2, "k_hi": 6},
        "q_grid": [-1, 0, 2],
    }, base_dir=tmp_path)
    reports = compute_reports(build_session(run))
    assert [r.q for r in reports] == [-1.0, 0.0, 2.0]
    for report in reports:
        assert report.value("tau") == pytest.approx(0.0, abs=1e-12)


def test_shallow_session_raises_guard_error(presets_dir):
    session = build_session(RunConfig.load(presets_dir / "cantor_shallow.json"))
    with pytest.raises(ResolutionGuardError, match="atom-resolution guard"):
        session.require_resolution()
    build_session(RunConfig.load(presets_dir / "cantor_uniform.json")).require_resolution()


def test_build_with_incomplete_ifs_exits_with_error(tmp_path):
    path = tmp_path / "broken.ifs.json"
    path.write_text(json.dumps({"dim": 1, "maps": [
        {"ratio": 0.5, "translation": [0.0]},
        {"ratio": 0.5, "translation": [0.5], "prob": 0.5},
    ]}), encoding="utf-8")
    assert main(["build", "--config", str(path), "--depth", "2", "--out", str(tmp_path)]) == 2
