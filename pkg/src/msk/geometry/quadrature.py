"""Tensor-product quadrature over chart boxes and k-convexity scans."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import IntegrationError
from ..symcalc.sigma import sigma_all
from ..symcalc.jacobi import jacobi_eigenvalues
from .frame import frame_at, jet_at

CHUNK = 20000


@dataclass(frozen=True)
class Grid:
    counts: tuple
    rules: tuple
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self):
        return self.weights.size

    def label(self):
        return "x".join(str(c) for c in self.counts)


def axis_rule(a, b, count, rule):
    if rule == "gauss":
        t, w = np.polynomial.legendre.leggauss(count)
        return 0.5 * (a + b) + 0.5 * (b - a) * t, 0.5 * (b - a) * w
    if rule == "midpoint":
        h = (b - a) / count
        return a + (np.arange(count) + 0.5) * h, np.full(count, h)
    raise ValueError(f"unknown quadrature rule {rule!r}")


def default_counts(chart):
    n = chart.n
    if chart.closed:
        table = {2: (200, 400), 3: (32, 32, 64), 4: (16, 16, 16, 32)}
        return table.get(n, (12,) * (n - 1) + (24,))
    return {2: (160, 160), 3: (40, 40, 40)}.get(n, (16,) * n)


def make_grid(chart, counts=None, rules=None):
    """Gauss-Legendre on bounded axes, midpoint on periodic axes (spectral there).

    Nodes are in C order over the axes; weights are products of axis weights.
    """
    counts = tuple(default_counts(chart) if counts is None else counts)
    if len(counts) != chart.n or min(counts) < 1:
        raise ValueError(f"grid needs {chart.n} positive counts, got {counts}")
    if rules is None:
        rules = tuple("midpoint" if p else "gauss" for p in chart.periodic)
    axes = [axis_rule(lo, hi, c, r) for lo, hi, c, r in zip(chart.lower, chart.upper, counts, rules)]
    mesh = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wmesh = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=-1), axis=-1)
    return Grid(counts, tuple(rules), nodes, weights)


def iter_chunks(chart, grid, jets=False, chunk=CHUNK):
    """Yield (slice, FramePoint or JetPoint) over the grid in node order."""
    for start in range(0, grid.size, chunk):
        sl = slice(start, min(start + chunk, grid.size))
        u = grid.nodes[sl]
        yield sl, (jet_at(chart, u) if jets else frame_at(chart, u))


def integrate(chart, grid, integrand, jets=False, chunk=CHUNK):
    """Sum of weight * area * integrand(fp) over nodes with exact (fsum) reduction.

    ``integrand`` maps a batched FramePoint to values of shape (N,) or (N, m);
    the result is a float or an array of m floats. The reduction is independent
    of the chunk size.
    """
    parts = []
    for sl, fp in iter_chunks(chart, grid, jets, chunk):
        vals = np.asarray(integrand(fp), dtype=float)
        if vals.ndim == 0:
            vals = np.full(fp.area.shape, float(vals))
        finite = np.isfinite(vals) if vals.ndim == 1 else np.all(np.isfinite(vals), axis=-1)
        if not np.all(finite):
            i = int(np.argmin(finite))
            raise IntegrationError(
                f"non-finite integrand at node {sl.start + i} (u={grid.nodes[sl.start + i].tolist()})")
        w = grid.weights[sl] * fp.area
        parts.append(w * vals if vals.ndim == 1 else w[:, None] * vals)
    stacked = np.concatenate(parts, axis=0)
    if stacked.ndim == 1:
        return math.fsum(stacked)
    return np.array([math.fsum(stacked[:, j]) for j in range(stacked.shape[1])])


@dataclass(frozen=True)
class ScanResult:
    passed: bool
    worst_margin: float
    worst_node: int
    worst_u: tuple
    cone: int

    def __iter__(self):
        return iter((self.passed, self.worst_margin))


def required_cone(k, n):
    """Gamma_{k+1} for k+1 <= n, Gamma_n for k = n."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return k + 1 if k + 1 <= n else n


def kconvexity_scan(chart, grid, k, cone=None):
    """Test L in the cone at every node; report the smallest sigma_j margin and where."""
    order = required_cone(k, chart.n) if cone is None else cone
    worst, where = math.inf, -1
    for sl, fp in iter_chunks(chart, grid):
        lam = jacobi_eigenvalues(fp.L)
        margins = np.min(sigma_all(lam, order)[..., 1:], axis=-1)
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst, where = float(margins[i]), sl.start + i
    return ScanResult(worst > 0.0, worst, where, tuple(grid.nodes[where].tolist()), order)
