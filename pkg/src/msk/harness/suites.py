"""Suite planning and execution.

Planning happens in the calling process. It resolves surfaces and grids and
validates them against the configuration, raising ConfigError. Execution runs
picklable task dicts, optionally across worker processes. Each task seeds its
own generator from the configured seed and its name, so results do not depend
on the number of workers or on scheduling order.
"""

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import MskError, PreconditionError
from ..functionals import (
    ConstantOne,
    decompose,
    estimate_chain_probes,
    eval_functionals,
    make_potential,
    make_testfn,
    ms_cone,
    proposition_a_report,
    theorem_ms_report,
)
from ..functionals.spec import I
from ..geometry import (
    QuadraticAmbient,
    codazzi_residual,
    div_newton_residual,
    frame_at,
    gauss_residual,
    integrate,
    kconvexity_scan,
    make_grid,
    make_surface,
    required_cone,
    restriction_hessian_residual,
)
from ..symcalc import (
    concavity_probe,
    garding_probe,
    identity_residual,
    newton_tensor,
    newton_tensor_oracle,
    polarized_sigma,
    polarized_sigma_oracle,
)
from .config import ConfigError

BASE_SUITES = ("identities", "cones", "geometry", "functionals", "inequalities")
REPORT_FIELDS = ("surface", "potential", "family", "k", "l", "a", "grid", "lhs", "rhs_terms", "c_star", "budget")
ELLIPSOID_AXES = (1.0, 1.3, 0.8, 1.1, 0.9, 1.2, 0.85, 1.15, 0.95, 1.05, 0.8, 1.25, 1.0)
GEOMETRY_POINTS = 5
# the permutation-expansion oracle costs (k+1)! contractions per input
ORACLE_MAX_K = 4


@dataclass
class Record:
    """One check: ``value`` compared against ``tolerance`` (value <= tolerance passes)."""

    name: str
    suite: str
    inputs: dict
    value: Optional[float]
    tolerance: float
    passed: bool
    report: dict = field(default_factory=dict)
    detail: Optional[str] = None

    def to_dict(self):
        out = {"name": self.name, "suite": self.suite, "inputs": self.inputs, "value": _finite(self.value),
               "tolerance": self.tolerance, "pass": bool(self.passed)}
        for key in REPORT_FIELDS:
            out[key] = _finite(self.report.get(key, self.inputs.get(key)))
        out["detail"] = self.detail
        return out


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, list):
        return [_finite(v) for v in x]
    if isinstance(x, dict):
        return {key: _finite(v) for key, v in x.items()}
    return x


def _rng(seed, name):
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])


def _check(name, suite, inputs, value, tol, detail=None):
    value = float(value)
    return Record(name, suite, inputs, value, tol, bool(value <= tol), detail=detail)


def _failure(task, exc):
    inputs = dict(task["inputs"])
    name = task["name"]
    if isinstance(exc, PreconditionError) and "kconvexity" in str(exc):
        name = f"kconvexity:{inputs.get('surface')}:k={inputs.get('k')}"
    return Record(name, task["suite"], inputs, None, task.get("tol", 0.0), False,
                  detail=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------- identities

def _random_sym(rng, trials, n):
    G = rng.standard_normal((trials, n, n))
    return 0.5 * (G + np.swapaxes(G, 1, 2))


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    axes = tuple(range(1, a.ndim))
    scale = 1.0 + np.maximum(np.max(np.abs(a), axis=axes), np.max(np.abs(b), axis=axes))
    return float(np.max(np.max(np.abs(a - b), axis=axes) / scale))


def task_identities(seed, inputs, trials, tol_identity, tol_oracle):
    n, k = inputs["n"], inputs["k"]
    rng = _rng(seed, f"identities:n={n}:k={k}")
    out = []
    A = _random_sym(rng, trials, n)
    kinds = [("recursionT", {})]
    if k < n:
        kinds = [("trace1", {}), ("trace2", {})] + kinds
    for kind, _ in kinds:
        worst = max(identity_residual(kind, A=A[t], k=k) for t in range(trials))
        out.append(_check(f"identity:{kind}:n={n}:k={k}", "identities", dict(inputs), worst, tol_identity))
    for l in range(1, k):
        B, C = _random_sym(rng, trials, n), _random_sym(rng, trials, n)
        worst = max(identity_residual("lemma22", B=B[t], C=C[t], k=k, l=l) for t in range(trials))
        out.append(_check(f"identity:lemma22:n={n}:k={k}:l={l}", "identities", dict(inputs, l=l), worst,
                          tol_identity))
    if k > ORACLE_MAX_K:
        return out
    args = [_random_sym(rng, trials, n) for _ in range(k)]
    fast = newton_tensor(args, validate=False)
    oracle = np.stack([newton_tensor_oracle([a[t] for a in args]) for t in range(trials)])
    out.append(_check(f"oracle:newton_tensor:n={n}:k={k}", "identities", dict(inputs), _rel(fast, oracle),
                      tol_oracle))
    fast = polarized_sigma(args, validate=False)[:, None]
    oracle = np.array([polarized_sigma_oracle([a[t] for a in args]) for t in range(trials)])[:, None]
    out.append(_check(f"oracle:polarized_sigma:n={n}:k={k}", "identities", dict(inputs), _rel(fast, oracle),
                      tol_oracle))
    return out


# ---------------------------------------------------------------- cones

def task_cones(seed, inputs, trials, tol):
    n, k = inputs["n"], inputs["k"]
    base = zlib.crc32(f"cones:n={n}:k={k}".encode("utf-8"))
    out = []
    props = ["i", "iii", "iv"] + (["ii"] if k + 1 <= n else [])
    for j, prop in enumerate(sorted(props)):
        bad = garding_probe(prop, n, k, trials, seed=[seed, base, j])
        out.append(_check(f"garding:{prop}:n={n}:k={k}", "cones", dict(inputs), bad, tol))
    bad = concavity_probe("sigma_k_root", n, k, 0, trials, seed=[seed, base, 10])
    out.append(_check(f"concavity:sigma_k_root:n={n}:k={k}", "cones", dict(inputs), bad, tol))
    for l in range(k):
        bad = concavity_probe("ratio_root", n, k, l, trials, seed=[seed, base, 11 + l])
        out.append(_check(f"concavity:ratio_root:n={n}:k={k}:l={l}", "cones", dict(inputs, l=l), bad, tol))
    return out


# ---------------------------------------------------------------- geometry

def sphere_area(n, r=1.0):
    """Area of the round n-sphere of radius r."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2) * r**n


def task_geometry(seed, inputs, tols):
    surface, potential_id = inputs["surface"], inputs["potential"]
    chart = make_surface(surface)
    n = chart.n
    rng = _rng(seed, f"geometry:{surface}")
    pts = chart.random_points(GEOMETRY_POINTS, seed=int(rng.integers(2**31)), margin=0.1)
    out = []
    fp = frame_at(chart, pts)
    F = fp.frame
    gram = np.einsum("...ca,...cb->...ab", F, F) - np.eye(n)
    ortho = max(float(np.max(np.abs(gram))), float(np.max(np.abs(np.einsum("...ca,...c->...a", F, fp.normal)))))
    out.append(_check(f"frame:orthonormal:{surface}", "geometry", dict(inputs), ortho, tols["frame"]))
    asym = float(np.max(np.abs(fp.L - np.swapaxes(fp.L, -1, -2))))
    out.append(_check(f"frame:L_symmetric:{surface}", "geometry", dict(inputs), asym, tols["frame"]))
    curv = {"codazzi": codazzi_residual, "gauss": gauss_residual}
    for label, fn in curv.items():
        worst = max(float(np.max(fn(chart, u))) for u in pts)
        out.append(_check(f"{label}:{surface}", "geometry", dict(inputs), worst, tols["curvature"]))
    potential = make_potential(potential_id, n + 1)
    for pot in (potential, QuadraticAmbient()):
        worst = max(float(restriction_hessian_residual(chart, pot, u)) for u in pts)
        out.append(_check(f"restriction:{surface}:{pot.name}", "geometry", dict(inputs, potential=pot.name), worst,
                          tols["restriction"]))
    for k in range(1, n):
        for m in range(k):
            worst = max(float(np.max(np.abs(div_newton_residual(chart, u, k, m, potential if m else None))))
                        for u in pts)
            out.append(_check(f"div_newton:{surface}:k={k}:m={m}", "geometry", dict(inputs, k=k, m=m), worst,
                              tols["curvature"]))
    if surface.startswith("sphere"):
        out.extend(_sphere_integrals(chart, inputs, tols["sphere_integral"]))
    return out


def _sphere_integrals(chart, inputs, tol):
    n, r = chart.n, chart.radius
    grid = make_grid(chart, inputs.get("grid"))
    zero = make_potential("potential:zero", n + 1)
    specs = [I(j, 0) for j in range(1, n + 1)]
    vals = eval_functionals(specs, chart, grid, zero, ConstantOne(), check=False)
    area = sphere_area(n, r)
    out = []
    total = integrate(chart, grid, lambda fp: np.ones(fp.batch_shape))
    out.append(_check(f"sphere_integral:1:{chart.name}", "geometry", dict(inputs, grid=grid.label()),
                      abs(total - area) / area, tol))
    for j, val in zip(range(1, n + 1), vals):
        val = val / j  # Sigma_j(L, ..., L) = j sigma_j(L)
        exact = math.comb(n, j) * area * r ** (-j)
        out.append(_check(f"sphere_integral:sigma_{j}:{chart.name}", "geometry",
                          dict(inputs, grid=grid.label(), k=j), abs(val - exact) / exact, tol))
    return out


# ---------------------------------------------------------------- functionals

def _setup(inputs):
    chart = make_surface(inputs["surface"])
    grid = make_grid(chart, inputs.get("grid"))
    potential = make_potential(inputs["potential"], chart.n + 1)
    testfn = make_testfn(inputs["testfn"], chart)
    return chart, grid, potential, testfn


def task_functionals(seed, inputs, tols, a_values, budget):
    chart, grid, potential, testfn = _setup(inputs)
    n, k = chart.n, inputs["k"]
    base = dict(inputs, grid=grid.label())
    out = []
    tag = f"{inputs['surface']}:k={k}"
    if k == 2:
        for a in a_values:
            d = decompose("eq29", {"k": 2, "a": a}, chart, grid, potential, testfn)
            out.append(_check(f"decomposition:eq29:{tag}:a={a:g}", "functionals", dict(base, a=a), d.residual,
                              tols["eq29"]))
    for i0 in range(3, k + 1):
        d = decompose("eq52", {"k": k, "i0": i0}, chart, grid, potential, testfn)
        out.append(_check(f"decomposition:eq52:{tag}:i0={i0}", "functionals", dict(base, i0=i0), d.residual,
                          tols["eq52"]))
    for i0 in range(5, k + 1):
        d = decompose("eq59", {"k": k, "i0": i0}, chart, grid, potential, testfn)
        out.append(_check(f"decomposition:eq59:{tag}:i0={i0}", "functionals", dict(base, i0=i0), d.residual,
                          tols["eq59"]))
    plans = [("base_i0_1", {"k": k})] + ([("base_i0_2", {"k": k})] if k >= 2 else [])
    plans += [("propI", {"k": k, "l": l}) for l in range(k + 1)]
    plans += [("propJ", {"k": k, "l": l}) for l in range(k + 1)]
    if k >= 2:
        plans += [("propN", {"k": k, "l": l}) for l in range(k)]
        plans += [("propK", {"k": k, "i0": i0}) for i0 in range(3, k + 2)]
    for i0 in range(3, k + 1):
        plans.append(("lemma_k0_odd" if i0 % 2 else "lemma_k0_even", {"k": k, "i0": i0}))
    for (which, params), rec in zip(plans, estimate_chain_probes(plans, chart, grid, potential, testfn, budget)):
        if rec.identity_residual is not None:
            out.append(_check(f"ibp:{which}:{tag}", "functionals", base, rec.identity_residual, tols["ibp"],
                              detail=f"ratio={rec.ratio:.6g}"))
        out.append(_probe_record(tag, which, rec, dict(base, **params)))
    return out


def _probe_record(tag, which, rec, inputs):
    extra = ":".join(f"{key}={val}" for key, val in rec.params.items() if key != "k")
    name = f"probe:{which}:{tag}" + (f":{extra}" if extra else "")
    return Record(name, "functionals", inputs, float(rec.ratio), rec.budget, rec.passed,
                  report={"lhs": rec.lhs, "budget": rec.budget, "l": rec.params.get("l")},
                  detail=f"rhs={rec.rhs:.12g} noise_floor={rec.noise:.3g}")


# ---------------------------------------------------------------- inequalities

def task_inequalities(seed, inputs, a_values, l_values):
    chart, grid, potential, testfn = _setup(inputs)
    n, k = chart.n, inputs["k"]
    scan = kconvexity_scan(chart, grid, k, required_cone(k, n))
    base = dict(inputs, grid=grid.label())
    name = f"kconvexity:{inputs['surface']}:k={k}"
    rec = Record(name, "inequalities", base, float(-scan.worst_margin), 0.0, scan.passed,
                 detail=f"worst margin {scan.worst_margin:.6g} for Gamma_{scan.cone}^+ at u={list(scan.worst_u)}")
    out = [rec]
    if not scan.passed:
        return out
    for a in a_values:
        out.append(_report_record(proposition_a_report(k, a, chart, grid, potential, testfn), base))
    for l in l_values:
        try:
            ms_cone(k, l, n)
        except MskError:
            continue
        out.append(_report_record(theorem_ms_report(k, l, chart, grid, testfn), base))
    return out


def _report_record(report, inputs):
    d = report.to_dict()
    tag = f"{d['family']}:{d['surface']}:k={d['k']}:l={d['l']}" + (f":a={d['a']:g}" if d["a"] is not None else "")
    rhs_terms = [{"m": m, "value": v} for m, v in report.rhs_terms]
    fields = {key: d[key] for key in REPORT_FIELDS if key in d}
    fields["rhs_terms"] = rhs_terms
    inputs = dict(inputs, l=d["l"], a=d["a"])
    return Record(f"inequality:{tag}", "inequalities", inputs, float(report.c_star), report.budget,
                  report.passed, report=fields)


# ---------------------------------------------------------------- planning

TASKS = {
    "identities": task_identities,
    "cones": task_cones,
    "geometry": task_geometry,
    "functionals": task_functionals,
    "inequalities": task_inequalities,
}


def _default_surfaces(suite, n):
    closed = [f"sphere:r=1:n={n}", "ellipsoid:" + ",".join(f"{x:g}" for x in ELLIPSOID_AXES[: n + 1])]
    if suite == "geometry":
        return closed + [f"perturbed-sphere:0.05:n={n}", f"paraboloid-patch:n={n}"]
    return closed


def _charts(cfg, suite):
    """[(surface id, chart)] for chart-based suites, validating n, k and grid."""
    if cfg.surface is not None:
        try:
            chart = make_surface(cfg.surface)
        except MskError as exc:
            raise ConfigError("surface", str(exc)) from None
        if cfg.n is not None and chart.n not in cfg.n:
            raise ConfigError("n", f"surface {cfg.surface} has n={chart.n}, not in {list(cfg.n)}")
        pairs = [(cfg.surface, chart)]
    else:
        pairs = []
        for n in cfg.n or (3,):
            if n < 2:
                raise ConfigError("n", "chart-based suites need n >= 2")
            pairs += [(sid, make_surface(sid)) for sid in _default_surfaces(suite, n)]
    for sid, chart in pairs:
        if cfg.grid is not None and len(cfg.grid) != chart.n:
            raise ConfigError("grid", f"{len(cfg.grid)} axis counts given for n={chart.n} surface {sid}")
    return pairs


def _ks(cfg, n, lo, hi):
    return [k for k in (cfg.k or range(lo, hi + 1)) if lo <= k <= hi]


def plan(cfg):
    """Task dicts for the configured suite, in report order."""
    suites = BASE_SUITES if cfg.suite == "all" else (cfg.suite,)
    tasks = []
    tols = {name: cfg.tolerance(name) for name in ("frame", "curvature", "restriction", "sphere_integral",
                                                   "eq29", "eq52", "eq59", "ibp")}
    for suite in suites:
        if suite in ("identities", "cones"):
            if cfg.surface is not None and cfg.n is None:
                ns = (make_surface(cfg.surface).n,)
            else:
                ns = cfg.n or (2, 3, 4)
            for n in ns:
                for k in _ks(cfg, n, 1, n):
                    inputs = {"n": n, "k": k}
                    if suite == "identities":
                        kw = {"trials": cfg.trials, "tol_identity": cfg.tolerance("identity"),
                              "tol_oracle": cfg.tolerance("oracle")}
                    else:
                        kw = {"trials": cfg.trials, "tol": cfg.tolerance("violations")}
                    tasks.append({"suite": suite, "name": f"{suite}:n={n}:k={k}", "inputs": inputs, "kw": kw})
            continue
        for sid, chart in _charts(cfg, suite):
            testfn = cfg.testfn or ("const" if chart.closed else "bump")
            inputs = {"surface": sid, "potential": cfg.potential, "testfn": testfn,
                      "grid": list(cfg.grid) if cfg.grid else None}
            try:
                make_potential(cfg.potential, chart.n + 1)
                make_testfn(testfn, chart)
            except MskError as exc:
                raise ConfigError("potential" if "potential" in str(exc) else "testfn", str(exc)) from None
            if suite == "geometry":
                tasks.append({"suite": suite, "name": f"geometry:{sid}", "inputs": inputs, "kw": {"tols": tols}})
                continue
            ks = _ks(cfg, chart.n, 1, chart.n) if suite == "functionals" else (list(cfg.k) if cfg.k else [2])
            for k in ks:
                if not 1 <= k <= chart.n:
                    raise ConfigError("k", f"k={k} outside [1, {chart.n}] for surface {sid}")
                kin = dict(inputs, k=k)
                if suite == "functionals":
                    kw = {"tols": tols, "a_values": list(cfg.a), "budget": 100.0}
                else:
                    ls = list(cfg.l) if cfg.l is not None else list(range(1, k)) or [0]
                    kw = {"a_values": list(cfg.a), "l_values": ls}
                tasks.append({"suite": suite, "name": f"{suite}:{sid}:k={k}", "inputs": kin, "kw": kw})
    if not tasks:
        raise ConfigError("k", f"no k in {list(cfg.k or ())} is valid for the selected dimensions")
    return tasks


def run_task(seed, task):
    """Execute one task; numerical failures become failing records instead of exceptions."""
    fn = TASKS[task["suite"]]
    try:
        return fn(seed, dict(task["inputs"]), **task["kw"])
    except MskError as exc:
        return [_failure(task, exc)]


def _run_task_args(args):
    return run_task(*args)


def execute(cfg, tasks):
    """Run tasks in order; with workers > 1 they are sharded but results keep plan order."""
    jobs = [(cfg.seed, task) for task in tasks]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_task_args, jobs))
    else:
        chunks = [_run_task_args(job) for job in jobs]
    return [rec for chunk in chunks for rec in chunk]
