"""``msk`` command-line driver.

Exit status: 0 when every record passes, 1 on a failing check or an
unwritable report path, 2 on a usage or configuration error.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import MskError
from ..functionals import BUMPS, POTENTIALS
from ..geometry import EXAMPLE_IDS, SURFACES
from .config import SUITES, TOLERANCES, ConfigError, build_config, read_config_file
from .suites import execute, plan

CSV_BASE_COLUMNS = ("name", "suite", "pass", "value", "tolerance", "surface", "potential", "family", "k", "l", "a",
                    "grid", "lhs", "c_star", "budget", "detail", "inputs", "timestamp")


@dataclass
class SuiteResult:
    suite: str
    records: list
    wall_time: float
    timestamp: str

    @property
    def passed(self):
        return all(r.passed for r in self.records)


def list_catalog(stream=None):
    """Print surface ids, potential ids and test-function presets in a stable order."""
    stream = stream or sys.stdout
    print("surfaces:", file=stream)
    for key in SURFACES:
        print(f"  {SURFACES[key]}", file=stream)
    print("surface examples:", file=stream)
    for sid in EXAMPLE_IDS:
        print(f"  {sid}", file=stream)
    print("potentials:", file=stream)
    for key in POTENTIALS:
        print(f"  {POTENTIALS[key]}", file=stream)
    print("test functions:", file=stream)
    for key in BUMPS:
        print(f"  {BUMPS[key]}", file=stream)
    print("suites:", file=stream)
    print("  " + ", ".join(SUITES), file=stream)
    print("tolerance names (--tol name=value):", file=stream)
    for key, val in TOLERANCES.items():
        print(f"  {key} = {val:g}", file=stream)


def report_dict(cfg, result):
    return {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "timestamp": result.timestamp,
        "pass": result.passed,
        "config": cfg.as_dict(),
        "records": [r.to_dict() for r in result.records],
    }


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_columns(records):
    width = max([len(r.get("rhs_terms") or []) for r in records] + [1])
    return list(CSV_BASE_COLUMNS) + [f"rhs_{m}" for m in range(width)]


def render_csv(report):
    records = report["records"]
    columns = csv_columns(records)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = {key: rec.get(key) for key in CSV_BASE_COLUMNS}
        row["timestamp"] = report["timestamp"]
        for term in rec.get("rhs_terms") or []:
            row[f"rhs_{term['m']}"] = term["value"]
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render(report, fmt):
    if fmt == "csv":
        return render_csv(report)
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text):
    """Write via a temporary file in the target directory and rename into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_suite(cfg):
    tasks = plan(cfg)
    start = time.perf_counter()
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    records = execute(cfg, tasks)
    return SuiteResult(cfg.suite, records, time.perf_counter() - start, stamp)


def _parser():
    p = argparse.ArgumentParser(prog="msk", description="Numerical checks for weighted curvature inequalities.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print catalog ids")
    r = sub.add_parser("run", help="run a suite")
    r.add_argument("--config", help="flat key = value file; flags override it")
    r.add_argument("--suite")
    r.add_argument("--n", help="dimension, list or range (3, 2,3 or 2-4)")
    r.add_argument("--k", help="order, list or range")
    r.add_argument("--l", help="lower order, list or range")
    r.add_argument("--a", help="comma-separated a values (each > 1)")
    r.add_argument("--surface")
    r.add_argument("--potential")
    r.add_argument("--testfn", help="const or bump[:...]; default const on closed surfaces, bump on patches")
    r.add_argument("--grid", help="per-axis node counts, e.g. 200x400")
    r.add_argument("--seed")
    r.add_argument("--trials")
    r.add_argument("--workers")
    r.add_argument("--tol", action="append", help="tolerance override name=value (repeatable)")
    r.add_argument("--out")
    r.add_argument("--format")
    r.add_argument("--quiet", action="store_true", help="print only failing records and the summary")
    return p


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        list_catalog()
        return 0
    try:
        values = read_config_file(args.config) if args.config else {}
        flags = {key: val for key, val in vars(args).items()
                 if key not in ("command", "config", "quiet") and val is not None}
        if "tol" in flags and "tol" in values:
            flags["tol"] = list(values["tol"]) + list(flags["tol"])
        values.update(flags)
        cfg = build_config(values)
        result = run_suite(cfg)
    except ConfigError as exc:
        print(f"msk: error: {exc}", file=sys.stderr)
        return 2
    except MskError as exc:
        print(f"msk: error: {exc}", file=sys.stderr)
        return 2

    for rec in result.records:
        if not args.quiet or not rec.passed:
            status = "PASS" if rec.passed else "FAIL"
            value = "n/a" if rec.value is None else f"{rec.value:.3e}"
            print(f"{status} {rec.name} value={value} tol={rec.tolerance:g}")
    failing = [r for r in result.records if not r.passed]
    print(f"suite {cfg.suite}: {len(result.records) - len(failing)}/{len(result.records)} passed "
          f"in {result.wall_time:.1f} s")
    report = report_dict(cfg, result)
    if cfg.out:
        try:
            write_atomic(cfg.out, render(report, cfg.format))
        except OSError as exc:
            print(f"msk: error: cannot write report {cfg.out}: {exc.strerror or exc}", file=sys.stderr)
            return 1
    if failing:
        for rec in failing:
            print("failing record: " + json.dumps(rec.to_dict(), allow_nan=False), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
