"""CLI and suite driver: configuration, exit codes, report emission and determinism."""

import csv
import io
import json
import os
import re

import pytest

from msk.harness import ConfigError, SuiteConfig, build_config, execute, plan, read_config_file
from msk.harness.cli import CSV_BASE_COLUMNS, csv_columns, list_catalog, main
from msk.harness.config import parse_grid, parse_int_range, parse_tolerances

FAST_GEOMETRY = ["run", "--suite", "geometry", "--n", "2", "--k", "1-2", "--surface", "sphere:r=1:n=2",
                 "--grid", "40x80"]


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def failing_records(err):
    return [json.loads(line.split(": ", 1)[1]) for line in err.splitlines() if line.startswith("failing record")]


# ---------------------------------------------------------------- list

def test_list_contents_and_stable_order(capsys):
    code, first, _ = run_cli(["list"], capsys)
    assert code == 0
    assert "sphere:r=1:n=2" in first and "potential:linear" in first
    for section in ("surfaces:", "potentials:", "test functions:", "suites:"):
        assert section in first
    _, second, _ = run_cli(["list"], capsys)
    assert first == second


def test_list_shows_parameter_schemas():
    buf = io.StringIO()
    list_catalog(buf)
    text = buf.getvalue()
    assert "sphere:r=<radius>" in text or "sphere:r=" in text
    assert "bump" in text and "r=" in text


# ---------------------------------------------------------------- config parsing

def test_parse_ranges():
    assert parse_int_range("3", "n") == (3,)
    assert parse_int_range("2,4", "n") == (2, 4)
    assert parse_int_range("2-5", "n") == (2, 3, 4, 5)
    for bad in ("", "5-2", "x", "2,,3"):
        with pytest.raises(ConfigError, match="n"):
            parse_int_range(bad, "n")


def test_parse_grid_and_tolerances():
    assert parse_grid("200x400") == (200, 400)
    assert parse_grid("8X8x16") == (8, 8, 16)
    with pytest.raises(ConfigError, match="grid"):
        parse_grid("0x10")
    assert parse_tolerances(["eq29=1e-8", "identity=1e-9"]) == {"eq29": 1e-8, "identity": 1e-9}
    with pytest.raises(ConfigError, match="tol"):
        parse_tolerances(["nonsense=1"])
    with pytest.raises(ConfigError, match="tol"):
        parse_tolerances(["eq29=-1"])


@pytest.mark.parametrize("values,field", [
    ({"trials": "0"}, "trials"),
    ({"workers": "0"}, "workers"),
    ({"seed": "-1"}, "seed"),
    ({"suite": "everything"}, "suite"),
    ({"format": "xml"}, "format"),
    ({"a": "1.0"}, "a"),
    ({"n": "3", "k": "5"}, "k"),
    ({"k": "2", "l": "2"}, "l"),
    ({"bogus": "1"}, "bogus"),
    ({"trials": "many"}, "trials"),
])
def test_build_config_names_field(values, field):
    with pytest.raises(ConfigError) as info:
        build_config(values)
    assert info.value.field == field
    assert field in str(info.value)


def test_config_file_and_flag_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nsuite = cones\nn = 2\ntrials = 5  # inline\ntol = identity=1e-9\n", encoding="utf-8")
    values = read_config_file(path)
    assert values == {"suite": "cones", "n": "2", "trials": "5", "tol": ["identity=1e-9"]}
    values.update({"trials": "7"})
    cfg = build_config(values)
    assert (cfg.suite, cfg.n, cfg.trials) == ("cones", (2,), 7)
    assert cfg.tolerance("identity") == 1e-9 and cfg.tolerance("oracle") == 1e-10


def test_bad_config_file(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("suite cones\n", encoding="utf-8")
    code, _, err = run_cli(["run", "--config", str(path)], capsys)
    assert code == 2 and "config" in err
    code, _, err = run_cli(["run", "--config", str(tmp_path / "missing.cfg")], capsys)
    assert code == 2


def test_cli_flags_override_config(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("suite = cones\ntrials = 0\n", encoding="utf-8")
    code, _, err = run_cli(["run", "--config", str(path)], capsys)
    assert code == 2 and "trials" in err
    code, out, _ = run_cli(["run", "--config", str(path), "--trials", "3", "--n", "2", "--quiet"], capsys)
    assert code == 0 and "suite cones" in out


# ---------------------------------------------------------------- exit codes

def test_identities_example_exit_zero(tmp_path, capsys):
    out_path = tmp_path / "ids.json"
    code, _, _ = run_cli(["run", "--suite", "identities", "--n", "4", "--k", "3", "--seed", "7",
                          "--out", str(out_path)], capsys)
    assert code == 0
    report = json.loads(out_path.read_text(encoding="utf-8"))
    assert report["pass"] is True and report["seed"] == 7
    assert report["records"]
    for rec in report["records"]:
        assert rec["pass"] and rec["value"] <= 1e-10


def test_cones_zero_trials_exit_two(capsys):
    code, _, err = run_cli(["run", "--suite", "cones", "--trials", "0"], capsys)
    assert code == 2 and "trials" in err


def test_saddle_rejected_exit_one(capsys):
    code, _, err = run_cli(["run", "--suite", "inequalities", "--surface", "saddle", "--k", "2"], capsys)
    assert code == 1
    recs = failing_records(err)
    assert recs and all("kconvexity" in r["name"] for r in recs)
    assert recs[0]["value"] > 0


@pytest.mark.parametrize("argv,field", [
    (["--suite", "geometry", "--surface", "sphere:r=1:n=2", "--grid", "10x10x10"], "grid"),
    (["--suite", "functionals", "--surface", "sphere:r=1:n=2", "--k", "3"], "k"),
    (["--suite", "geometry", "--surface", "torus"], "surface"),
    (["--suite", "functionals", "--potential", "cubic"], "potential"),
])
def test_chart_dependent_config_errors(argv, field, capsys):
    code, _, err = run_cli(["run"] + argv, capsys)
    assert code == 2 and field in err


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    capsys.readouterr()


def test_unwritable_output_exit_one(tmp_path, capsys):
    target = tmp_path / "missing-dir" / "report.json"
    code, _, err = run_cli(["run", "--suite", "cones", "--n", "2", "--trials", "3", "--out", str(target)], capsys)
    assert code == 1 and "cannot write" in err
    assert not target.exists()


def test_failing_tolerance_gives_exit_one(capsys):
    code, _, err = run_cli(FAST_GEOMETRY + ["--tol", "frame=0"], capsys)
    # orthonormality residuals are rounding-sized but not all exactly zero
    recs = failing_records(err)
    assert (code == 1) == bool(recs)
    assert all(r["tolerance"] == 0 for r in recs)


# ---------------------------------------------------------------- reports

def test_json_round_trip(tmp_path, capsys):
    out_path = tmp_path / "cones.json"
    code, _, _ = run_cli(["run", "--suite", "cones", "--n", "2-3", "--trials", "5", "--out", str(out_path)], capsys)
    assert code == 0
    text = out_path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    report = json.loads(text)
    assert json.loads(json.dumps(report)) == report
    assert set(report) == {"suite", "seed", "timestamp", "pass", "config", "records"}
    assert report["pass"] == all(r["pass"] for r in report["records"])
    names = [r["name"] for r in report["records"]]
    assert len(names) == len(set(names))


def test_csv_header_matches_documented_columns(tmp_path, capsys):
    out_path = tmp_path / "ineq.csv"
    code, _, _ = run_cli(["run", "--suite", "inequalities", "--n", "2", "--k", "2", "--a", "2",
                          "--surface", "sphere:r=1:n=2", "--grid", "60x120", "--out", str(out_path),
                          "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_path.read_text(encoding="utf-8"))))
    header = rows[0]
    assert header[:len(CSV_BASE_COLUMNS)] == list(CSV_BASE_COLUMNS)
    extra = header[len(CSV_BASE_COLUMNS):]
    assert extra == [f"rhs_{m}" for m in range(len(extra))] and len(extra) == 3
    assert all(len(r) == len(header) for r in rows[1:])
    by_name = {r[0]: dict(zip(header, r)) for r in rows[1:]}
    prop = next(v for n, v in by_name.items() if ":propA:" in n)
    assert float(prop["rhs_0"]) > 0 and float(prop["c_star"]) > 0


def test_csv_columns_function():
    assert csv_columns([{"rhs_terms": [{"m": 0, "value": 1.0}] * 4}, {}]) == list(CSV_BASE_COLUMNS) + [
        "rhs_0", "rhs_1", "rhs_2", "rhs_3"]
    assert csv_columns([{}]) == list(CSV_BASE_COLUMNS) + ["rhs_0"]


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_two_runs_identical_except_timestamp(tmp_path, capsys, fmt):
    out_path = tmp_path / f"report.{fmt}"
    argv = FAST_GEOMETRY + ["--seed", "3", "--out", str(out_path), "--format", fmt]
    texts = []
    for _ in range(2):
        assert run_cli(argv, capsys)[0] == 0
        texts.append(out_path.read_text(encoding="utf-8"))
    stamp = re.compile(r"\d{4}-\d\d-\d\dT\d\d:\d\d:\d\d\+00:00")
    assert stamp.search(texts[0])
    assert stamp.sub("T", texts[0]) == stamp.sub("T", texts[1])


def test_no_temporary_files_left(tmp_path, capsys):
    out_path = tmp_path / "r.json"
    run_cli(["run", "--suite", "cones", "--n", "2", "--trials", "3", "--out", str(out_path)], capsys)
    assert os.listdir(tmp_path) == ["r.json"]


# ---------------------------------------------------------------- determinism and aggregation

def _values(records):
    return [(r.name, r.value, r.passed) for r in records]


def test_worker_count_does_not_change_results():
    cfg = build_config({"suite": "cones", "n": "2-3", "trials": "20", "seed": "11"})
    serial = execute(cfg, plan(cfg))
    cfg.workers = 2
    parallel = execute(cfg, plan(cfg))
    assert _values(serial) == _values(parallel)


def test_seed_changes_random_checks():
    cfg_a = build_config({"suite": "identities", "n": "3", "trials": "10", "seed": "1"})
    cfg_b = build_config({"suite": "identities", "n": "3", "trials": "10", "seed": "2"})
    a, b = execute(cfg_a, plan(cfg_a)), execute(cfg_b, plan(cfg_b))
    assert [r.name for r in a] == [r.name for r in b]
    assert _values(a) != _values(b)


def test_all_is_conjunction_of_suites():
    common = {"n": "2", "k": "1-2", "trials": "5", "surface": "sphere:r=1:n=2", "grid": "40x80"}
    suites = {}
    for suite in ("identities", "cones", "geometry", "functionals", "inequalities"):
        cfg = build_config(dict(common, suite=suite))
        suites[suite] = execute(cfg, plan(cfg))
    cfg_all = build_config(dict(common, suite="all"))
    total = execute(cfg_all, plan(cfg_all))
    assert sorted(r.name for r in total) == sorted(r.name for recs in suites.values() for r in recs)
    assert all(r.passed for r in total) == all(r.passed for recs in suites.values() for r in recs)


def test_suite_config_defaults():
    cfg = SuiteConfig()
    assert cfg.suite == "all" and cfg.seed == 0 and cfg.format == "json"
    assert cfg.tolerance("eq59") == 1e-4
    d = cfg.as_dict()
    assert d["tolerances"]["identity"] == 1e-10 and d["a"] == [1.5, 2.0, 4.0]
