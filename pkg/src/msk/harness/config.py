"""Suite configuration: defaults, a flat key=value config file, and validation.

Precedence is defaults < config file < command-line flags. Every validation
failure raises ConfigError naming the offending field, which the CLI maps to
exit status 2.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

SUITES = ("identities", "cones", "geometry", "functionals", "inequalities", "all")
FORMATS = ("json", "csv")
MAX_N = 12

TOLERANCES = {
    "identity": 1e-10,
    "oracle": 1e-10,
    "violations": 0.0,
    "frame": 1e-10,
    "curvature": 1e-7,
    "restriction": 1e-8,
    "sphere_integral": 1e-5,
    "eq29": 1e-6,
    "eq52": 1e-6,
    "eq59": 1e-4,
    "ibp": 1e-6,
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name, message):
        super().__init__(f"invalid {field_name}: {message}")
        self.field = field_name


def parse_int_range(text, field_name):
    """'3', '2,4' or '2-5' (inclusive) -> sorted tuple of distinct ints."""
    values = set()
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) > 1 and not all(parts):
        raise ConfigError(field_name, f"empty item in {text!r}")
    try:
        for part in parts:
            if not part:
                continue
            lo, sep, hi = part.partition("-")
            if sep and lo:
                values.update(range(int(lo), int(hi) + 1))
            else:
                values.add(int(part))
    except ValueError:
        raise ConfigError(field_name, f"cannot parse integer range {text!r}") from None
    if not values:
        raise ConfigError(field_name, "range is empty")
    return tuple(sorted(values))


def parse_float_list(text, field_name):
    try:
        values = tuple(float(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise ConfigError(field_name, f"cannot parse numbers from {text!r}") from None
    if not values:
        raise ConfigError(field_name, "list is empty")
    return values


def parse_grid(text):
    """'200x400' -> (200, 400)."""
    try:
        counts = tuple(int(t) for t in str(text).lower().split("x"))
    except ValueError:
        raise ConfigError("grid", f"expected counts like 200x400, got {text!r}") from None
    if any(c < 2 for c in counts):
        raise ConfigError("grid", "every axis needs at least 2 nodes")
    return counts


def parse_tolerances(items):
    """['ibp=1e-5', ...] -> dict, rejecting unknown names."""
    out = {}
    for item in items or ():
        for piece in str(item).split(","):
            name, sep, val = piece.partition("=")
            name = name.strip()
            if not sep or name not in TOLERANCES:
                raise ConfigError("tol", f"expected name=value with name in {', '.join(TOLERANCES)}; got {piece!r}")
            try:
                out[name] = float(val)
            except ValueError:
                raise ConfigError("tol", f"bad value in {piece!r}") from None
            if out[name] < 0:
                raise ConfigError("tol", f"{name} must be non-negative")
    return out


@dataclass
class SuiteConfig:
    suite: str = "all"
    n: Optional[tuple] = None
    k: Optional[tuple] = None
    l: Optional[tuple] = None
    a: tuple = (1.5, 2.0, 4.0)
    surface: Optional[str] = None
    potential: str = "potential:linear"
    testfn: Optional[str] = None
    grid: Optional[tuple] = None
    seed: int = 0
    trials: int = 100
    tolerances: dict = field(default_factory=dict)
    out: Optional[str] = None
    format: str = "json"
    workers: int = 1

    def tolerance(self, name):
        return self.tolerances.get(name, TOLERANCES[name])

    def as_dict(self):
        """Plain-data view embedded in reports."""
        d = asdict(self)
        for key in ("n", "k", "l", "a", "grid"):
            if d[key] is not None:
                d[key] = list(d[key])
        d["tolerances"] = {name: self.tolerance(name) for name in TOLERANCES}
        return d


def read_config_file(path):
    """Flat ``key = value`` lines; '#' starts a comment; keys mirror the CLI flags."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError("config", f"line {lineno} is not key = value")
        key = key.strip().replace("-", "_")
        if key == "tol":
            values.setdefault("tol", []).append(val.strip())
        else:
            values[key] = val.strip()
    return values


_KEYS = ("suite", "n", "k", "l", "a", "surface", "potential", "testfn", "grid", "seed", "trials",
         "tol", "out", "format", "workers")


def build_config(values):
    """Validate raw string/None values (already merged by precedence) into a SuiteConfig."""
    unknown = sorted(set(values) - set(_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")
    cfg = SuiteConfig()
    v = {key: val for key, val in values.items() if val is not None}
    if "suite" in v:
        if v["suite"] not in SUITES:
            raise ConfigError("suite", f"expected one of {', '.join(SUITES)}, got {v['suite']!r}")
        cfg.suite = v["suite"]
    for key in ("n", "k", "l"):
        if key in v:
            setattr(cfg, key, parse_int_range(v[key], key))
    if "a" in v:
        cfg.a = parse_float_list(v["a"], "a")
    for key in ("surface", "testfn", "out"):
        if key in v:
            setattr(cfg, key, str(v[key]))
    if "potential" in v:
        p = str(v["potential"])
        cfg.potential = p if p.startswith("potential:") else "potential:" + p
    if "grid" in v:
        cfg.grid = parse_grid(v["grid"])
    for key in ("seed", "trials", "workers"):
        if key in v:
            try:
                setattr(cfg, key, int(v[key]))
            except (TypeError, ValueError):
                raise ConfigError(key, f"expected an integer, got {v[key]!r}") from None
    if "tol" in v:
        cfg.tolerances = parse_tolerances(v["tol"] if isinstance(v["tol"], (list, tuple)) else [v["tol"]])
    if "format" in v:
        if v["format"] not in FORMATS:
            raise ConfigError("format", f"expected json or csv, got {v['format']!r}")
        cfg.format = v["format"]
    validate(cfg)
    return cfg


def validate(cfg):
    """Range checks that do not need a chart; chart-dependent checks happen in the suites."""
    if cfg.suite not in SUITES:
        raise ConfigError("suite", f"unknown suite {cfg.suite!r}")
    if cfg.trials < 1:
        raise ConfigError("trials", f"must be at least 1, got {cfg.trials}")
    if cfg.workers < 1:
        raise ConfigError("workers", f"must be at least 1, got {cfg.workers}")
    if cfg.seed < 0:
        raise ConfigError("seed", "must be non-negative")
    if cfg.n is not None and (cfg.n[0] < 1 or cfg.n[-1] > MAX_N):
        raise ConfigError("n", f"dimensions must lie in [1, {MAX_N}]")
    if cfg.k is not None:
        if cfg.k[0] < 1:
            raise ConfigError("k", "k must be at least 1")
        if cfg.n is not None and cfg.k[0] > cfg.n[-1]:
            raise ConfigError("k", f"no k in {list(cfg.k)} satisfies k <= n for n in {list(cfg.n)}")
    if cfg.l is not None:
        if cfg.l[0] < 0:
            raise ConfigError("l", "l must be non-negative")
        if cfg.k is not None and cfg.l[0] >= cfg.k[-1]:
            raise ConfigError("l", "need l < k for some configured k")
    if any(a <= 1.0 for a in cfg.a):
        raise ConfigError("a", "every a must exceed 1")
    if cfg.format not in FORMATS:
        raise ConfigError("format", f"expected json or csv, got {cfg.format!r}")
    return cfg
