import json
import re

import numpy as np
import pytest

from torwave import (CSV_SCHEMAS, ExperimentConfig, ExperimentReport,
                     FileFormatError, UsageError, emit_report, parse_report,
                     read_hlf, run_suite, write_hlf)
from torwave.cli import main as cli_main
from torwave.samples import random_function
import torwave.harness as harness


def _strip_wall_time(text: str) -> str:
    return re.sub(r'"wall_time": [^,\n]*', '"wall_time": 0', text)


def test_unknown_suite_lists_valid_names():
    with pytest.raises(UsageError, match="reconstruction"):
        ExperimentConfig(suite="nonsense").validate()


def test_config_validation():
    with pytest.raises(UsageError, match="powers of two"):
        ExperimentConfig(suite="reconstruction", resolutions=[100]).validate()
    with pytest.raises(UsageError):
        ExperimentConfig(suite="reconstruction", sample_count=0).validate()
    with pytest.raises(UsageError, match="unknown config fields"):
        ExperimentConfig.from_dict({"suite": "reconstruction", "bogus": 1})


def test_deterministic_records():
    cfg = ExperimentConfig(suite="product_identity", resolutions=[128],
                           sample_count=3)
    r1 = run_suite(cfg)
    r2 = run_suite(cfg)
    assert r1.cases == r2.cases
    assert r1.summary == r2.summary
    assert _strip_wall_time(emit_report(r1)) == _strip_wall_time(emit_report(r2))


def test_resolution_too_small_for_basis_propagates():
    from torwave import ResolutionError
    cfg = ExperimentConfig(suite="reconstruction", resolutions=[4], sample_count=1)
    with pytest.raises(ResolutionError):
        run_suite(cfg)


def test_cli_seed_override(tmp_path):
    cfg = _write_config(tmp_path)
    out1, out2, out3 = (tmp_path / n for n in ("a.json", "b.json", "c.json"))
    cli_main(["run", "--config", cfg, "--out", str(out1)])
    cli_main(["run", "--config", cfg, "--seed", "99", "--out", str(out2)])
    cli_main(["run", "--config", cfg, "--seed", "5", "--out", str(out3)])
    assert parse_report(str(out1)).cases != parse_report(str(out2)).cases
    assert parse_report(str(out1)).cases == parse_report(str(out3)).cases


def test_vacuous_suite_fails(monkeypatch):
    monkeypatch.setitem(harness._SUITE_FUNCS, "reconstruction",
                        lambda cfg: ([], {}, True))
    rep = run_suite(ExperimentConfig(suite="reconstruction"))
    assert not rep.passed
    assert "vacuous" in rep.summary


def test_empty_report_is_valid_json():
    rep = ExperimentReport(suite="reconstruction", config={}, cases=[],
                           summary={}, passed=False, wall_time=0.0)
    data = json.loads(emit_report(rep))
    assert data["cases"] == []


def test_json_round_trip_of_reports():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        cases = [{"resolution": 128, "case": i,
                  "value": float(rng.standard_normal()),
                  "ok": bool(rng.random() < 0.5)} for i in range(4)]
        rep = ExperimentReport(
            suite="reconstruction", config={"root_seed": seed}, cases=cases,
            summary={"max": float(rng.standard_normal()), "n": int(seed)},
            passed=True, wall_time=float(rng.random()))
        back = parse_report(emit_report(rep))
        assert back.cases == rep.cases
        assert back.summary == rep.summary
        assert back.config == rep.config
        assert back.passed == rep.passed
        assert back.wall_time == rep.wall_time


def test_canonical_json_is_sorted_and_fixed_format():
    rep = ExperimentReport(suite="molecule", config={"b": 1, "a": 2},
                           cases=[{"z": 0.1, "a": 2.0}], summary={},
                           passed=True, wall_time=0.5)
    text = emit_report(rep)
    assert text.index('"a"') < text.index('"b"')
    assert "2.0" in text  # floats keep a decimal point


def test_csv_schema_and_row_count():
    cfg = ExperimentConfig(suite="boundedness_sweep", resolutions=[128, 256],
                           sample_count=4)
    rep = run_suite(cfg)
    csv = emit_report(rep, "csv")
    lines = csv.strip().splitlines()
    assert lines[0].startswith("# schema_version=1")
    assert lines[1] == ",".join(CSV_SCHEMAS["boundedness_sweep"])
    assert len(lines) - 2 == cfg.sample_count * len(cfg.resolutions)


def test_report_written_atomically(tmp_path):
    cfg = ExperimentConfig(suite="reconstruction", resolutions=[128],
                           sample_count=2)
    rep = run_suite(cfg)
    out = tmp_path / "rep.json"
    emit_report(rep, "json", str(out))
    assert parse_report(str(out)).suite == "reconstruction"
    assert not list(tmp_path.glob("*.tmp"))


# -- sampled-function files -------------------------------------------------------

def test_hlf_round_trip(tmp_path, rng):
    for dim, N in [(1, 128), (2, 32)]:
        f = random_function(rng, dim, N)
        path = tmp_path / f"f{dim}.hlf1"
        write_hlf(str(path), f)
        g = read_hlf(str(path))
        np.testing.assert_array_equal(f.values, g.values)
        assert path.stat().st_size == 32 + 8 * N ** dim


def test_hlf_bad_magic(tmp_path):
    path = tmp_path / "bad.hlf1"
    path.write_bytes(b"NOPE" + b"\0" * 60)
    with pytest.raises(FileFormatError, match="magic"):
        read_hlf(str(path))


# -- command line -------------------------------------------------------------------

def _write_config(tmp_path, **kw):
    cfg = {"suite": "product_identity", "resolutions": [128],
           "sample_count": 2, "root_seed": 5}
    cfg.update(kw)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_cli_run_pass_and_report(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    out = tmp_path / "report.json"
    code = cli_main(["run", "--config", cfg, "--out", str(out)])
    assert code == 0
    assert parse_report(str(out)).passed
    assert "[PASS]" in capsys.readouterr().out


def test_cli_run_failure_exit_code(tmp_path):
    cfg = _write_config(tmp_path, tolerances={"identity_rel": 1e-30})
    assert cli_main(["run", "--config", cfg]) == 1


def test_cli_run_unknown_suite_is_usage_error(tmp_path):
    cfg = _write_config(tmp_path)
    assert cli_main(["run", "--config", cfg, "--suite", "bogus"]) == 2


def test_cli_norms_and_decompose(tmp_path, rng, capsys):
    f = random_function(rng, 1, 256)
    path = tmp_path / "f.hlf1"
    write_hlf(str(path), f)
    code = cli_main(["norms", "--input", str(path), "--space", "Lp:2",
                     "--space", "BMO", "--space", "H1_square"])
    assert code == 0
    assert "Lp:2" in capsys.readouterr().out

    out = tmp_path / "atoms.txt"
    code = cli_main(["decompose", "--input", str(path), "--out", str(out)])
    assert code == 0
    assert out.read_text().startswith("# atom 0 lambda=")


def test_cli_atoms_and_report_roundtrip(tmp_path, rng, capsys):
    b = random_function(rng, 1, 256)
    bpath = tmp_path / "b.hlf1"
    write_hlf(str(bpath), b)
    apath = tmp_path / "atom.hlf1"
    code = cli_main(["atoms", "--kind", "qb", "--level", "3", "--offset", "2",
                     "--b-file", str(bpath), "--seed", "4", "--out", str(apath)])
    assert code == 0
    atom = read_hlf(str(apath))
    assert abs(atom.integral()) < 1e-10
    assert abs((atom * b).integral()) < 1e-10

    cfg = _write_config(tmp_path)
    rep_path = tmp_path / "r.json"
    cli_main(["run", "--config", cfg, "--out", str(rep_path)])
    csv_path = tmp_path / "r.csv"
    code = cli_main(["report", "--input", str(rep_path), "--format", "csv",
                     "--out", str(csv_path)])
    assert code == 0
    header = csv_path.read_text().splitlines()[1]
    assert header == ",".join(CSV_SCHEMAS["product_identity"])
