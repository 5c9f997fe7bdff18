import json
import math

import pytest

from udncap import cli
from udncap.harness import (CSV_HEADER, ConfigError, ExperimentConfig, ResultRow, config_from_dict,
                            config_to_dict, emit_results, read_csv, run_experiment)
from udncap.netgen import s1_desk_config


def small_cfg(**kw):
    base = dict(scenario=s1_desk_config(), beta_grid=[0.5], methods=["exact"], reps=2, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.mark.parametrize("field,kw", [
    ("reps", dict(reps=0)),
    ("beta_grid", dict(beta_grid=[])),
    ("beta_grid", dict(beta_grid=[-1.0])),
    ("methods", dict(methods=[])),
    ("methods", dict(methods=["magic"])),
    ("seed", dict(seed=-4)),
    ("cluster_selector", dict(cluster_selector="middle")),
    ("closed_form_anchor_beta", dict(closed_form_anchor_beta=0.5)),
])
def test_validation_names_field(field, kw):
    with pytest.raises(ConfigError) as info:
        run_experiment(small_cfg(**kw))
    assert info.value.field == field


def test_exact_rows_reproducible():
    cfg = small_cfg(beta_grid=[0.5, 1.0], reps=1)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert [r.beta for r in a] == [0.5, 1.0]
    assert a == b
    assert all(r.method == "exact" and r.rel_err == 0.0 and r.wall_time_s is None for r in a)


def test_auto_dispatch():
    rows = run_experiment(small_cfg(beta_grid=[0.5, 4.0], methods=["auto"]))
    assert [r.method for r in rows] == ["fise", "closed_form"]
    assert all(r.rel_err is None for r in rows)


def test_relative_error_against_exact():
    rows = run_experiment(small_cfg(beta_grid=[0.5], methods=["exact", "fise"]))
    ex, fi = rows
    assert fi.rel_err == pytest.approx(abs(fi.capacity_mean - ex.capacity_mean) / ex.capacity_mean)


def test_anchor_reuse_protocol():
    cfg = small_cfg(beta_grid=[2.0, 3.0, 4.0], methods=["closed_form"], closed_form_anchor_beta=3.0)
    rows = run_experiment(cfg)
    assert len({r.capacity_mean for r in rows}) == 1
    plain = run_experiment(small_cfg(beta_grid=[3.0], methods=["closed_form"]))
    assert rows[0].capacity_mean == plain[0].capacity_mean


def test_timing_is_opt_in():
    rows = run_experiment(small_cfg(timing=True, reps=1))
    assert rows[0].wall_time_s > 0


def _row(**kw):
    base = dict(scenario="S1_disk_ppp", beta=0.5, cluster="closest", method="fise",
                capacity_mean=3.14159265358979, capacity_std=0.123456789012345, rel_err=0.01234567890123,
                wall_time_s=None, reps=50, seed=7)
    base.update(kw)
    return ResultRow(**base)


def test_emit_header_only(tmp_path):
    p = tmp_path / "empty.csv"
    emit_results([], str(p))
    assert p.read_text() == ",".join(CSV_HEADER) + "\n"
    assert CSV_HEADER == ["scenario", "beta", "cluster", "method", "capacity_mean", "capacity_std",
                          "rel_err", "wall_time_s", "reps", "seed"]


def test_emit_one_row_and_round_trip(tmp_path):
    p = tmp_path / "one.csv"
    row = _row()
    emit_results([row], str(p))
    lines = p.read_text().splitlines()
    assert len(lines) == 2
    assert "3.141592654" in lines[1]
    back = read_csv(str(p))[0]
    for k in ("capacity_mean", "capacity_std", "rel_err", "beta"):
        assert back[k] == float(f"{getattr(row, k):.10g}")
    assert back["wall_time_s"] is None and back["reps"] == 50 and back["seed"] == 7


def test_emit_json(tmp_path):
    p = tmp_path / "rows.json"
    emit_results([_row(), _row(rel_err=None)], str(p), "json")
    doc = json.loads(p.read_text())
    assert list(doc[0]) == CSV_HEADER
    assert doc[0]["capacity_mean"] == 3.141592654
    assert doc[1]["rel_err"] is None


def test_emit_rejects_format(tmp_path):
    with pytest.raises(ValueError):
        emit_results([], str(tmp_path / "x"), "xml")


def test_config_round_trip():
    cfg = small_cfg(methods=["exact", "auto"], closed_form_anchor_beta=3.0)
    again = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert again == cfg


def test_config_expected_bs_convenience():
    cfg = config_from_dict({"scenario": {"kind": "S1_disk_ppp", "expected_bs": 300, "M": 9, "D": 1000.0}})
    assert cfg.scenario.lambda_b * math.pi * 1000.0**2 == pytest.approx(300)


@pytest.mark.parametrize("doc,field", [
    ({}, "scenario"),
    ({"scenario": {"kind": "S1_disk_ppp", "lambda_b": 1e-4, "bogus": 1}}, "scenario"),
    ({"scenario": {"kind": "S1_disk_ppp"}}, "scenario"),
    ({"scenario": {"kind": "S1_disk_ppp", "lambda_b": 1e-4}, "fading": {"d0": 60}}, "fading"),
    ({"scenario": {"kind": "S1_disk_ppp", "lambda_b": 1e-4}, "speed": 3}, "speed"),
])
def test_config_errors(doc, field):
    with pytest.raises(ConfigError) as info:
        config_from_dict(doc)
    assert info.value.field == field


def test_cli_determinism_and_output(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps(config_to_dict(small_cfg(beta_grid=[0.5, 2.0], methods=["exact", "auto"]))))
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        assert cli.main(["--config", str(cfgfile), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert len(outs[0].decode().splitlines()) == 5


def test_cli_flags_override(tmp_path):
    out = tmp_path / "o.json"
    assert cli.main(["--beta", "0.5,4", "--reps", "1", "--seed", "9", "--method", "auto",
                     "--cluster", "furthest", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert [d["method"] for d in doc] == ["fise", "closed_form"]
    assert {d["cluster"] for d in doc} == {"furthest"} and {d["seed"] for d in doc} == {9}


def test_cli_s2_default(tmp_path):
    out = tmp_path / "s2.csv"
    assert cli.main(["--scenario", "S2", "--beta", "0.5", "--reps", "1", "--out", str(out)]) == 0
    assert read_csv(str(out))[0]["scenario"] == "S2_square_truncnorm"


def test_cli_without_out_writes_csv_to_stdout(capsys):
    assert cli.main(["--beta", "0.5", "--reps", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("scenario,beta,cluster")
    assert len(lines) == 2


def test_cli_error_line(tmp_path, capsys):
    assert cli.main(["--reps", "0"]) == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "config" and err["field"] == "reps"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["--config", str(bad)]) == 1
    assert json.loads(capsys.readouterr().err.strip())["error"] == "JSONDecodeError"


def test_worker_env(monkeypatch):
    from udncap import capacity
    monkeypatch.setenv(capacity.WORKERS_ENV, "3")
    assert capacity.worker_count() == 3
    monkeypatch.setenv(capacity.WORKERS_ENV, "junk")
    assert capacity.worker_count() == 1
