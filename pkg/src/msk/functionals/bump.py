"""Compactly supported test functions in chart coordinates."""

import math

import numpy as np

from ..errors import PreconditionError, ValidationError

E = math.e


class TestFunction:
    """Chart-coordinate function with derivatives to order three."""

    name = "testfn"
    compact = True

    def value(self, u):
        raise NotImplementedError

    def gradient(self, u):
        raise NotImplementedError

    def hessian(self, u):
        raise NotImplementedError

    def third(self, u):
        raise NotImplementedError

    def check_domain(self, chart, grid=None):
        """Raise PreconditionError if the function is not admissible on chart."""


class BumpFunction(TestFunction):
    """phi(u) = e * exp(-1 / (1 - t^2)) for t = |u - center| / radius < 1, else 0.

    Scaled so that phi(center) = 1.
    """

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValidationError("bump radius must be positive")
        self.name = "bump:c=" + ",".join(f"{c:.4g}" for c in self.center) + f":r={self.radius:g}"

    def _profile(self, u, order):
        z = np.asarray(u, dtype=float) - self.center
        s = np.sum(z * z, axis=-1) / self.radius**2
        inside = s < 1.0
        w = 1.0 / (1.0 - np.where(inside, s, 0.0))
        f = np.where(inside, E * np.exp(-w), 0.0)
        derivs = [f, -w**2 * f, f * (w**4 - 2 * w**3), f * (-(w**6) + 6 * w**5 - 6 * w**4)]
        derivs = [np.where(inside, d, 0.0) for d in derivs[: order + 1]]
        return z, derivs

    def value(self, u):
        return self._profile(u, 0)[1][0]

    def gradient(self, u):
        z, (f, f1) = self._profile(u, 1)
        return f1[..., None] * (2.0 * z / self.radius**2)

    def hessian(self, u):
        z, (f, f1, f2) = self._profile(u, 2)
        si = 2.0 * z / self.radius**2
        sij = 2.0 * np.eye(z.shape[-1]) / self.radius**2
        return f2[..., None, None] * np.einsum("...i,...j->...ij", si, si) + f1[..., None, None] * sij

    def third(self, u):
        z, (f, f1, f2, f3) = self._profile(u, 3)
        si = 2.0 * z / self.radius**2
        sij = 2.0 * np.eye(z.shape[-1]) / self.radius**2
        cube = np.einsum("...i,...j,...k->...ijk", si, si, si)
        sym = (np.einsum("ij,...k->...ijk", sij, si) + np.einsum("ik,...j->...ijk", sij, si)
               + np.einsum("jk,...i->...ijk", sij, si))
        return f3[..., None, None, None] * cube + f2[..., None, None, None] * sym

    def check_domain(self, chart, grid=None):
        """Support must stay at least two grid cells inside the chart box."""
        counts = np.full(chart.n, 1) if grid is None else np.asarray(grid.counts)
        cells = (chart.upper - chart.lower) / counts if grid is not None else np.zeros(chart.n)
        lo = self.center - self.radius
        hi = self.center + self.radius
        if np.any(lo < chart.lower + 2 * cells) or np.any(hi > chart.upper - 2 * cells):
            raise PreconditionError(
                f"{self.name}: support must lie two grid cells inside the domain of {chart.name}")


class ConstantOne(TestFunction):
    """phi = 1; admissible only on closed charts, where constants are compactly supported."""

    name = "const"
    compact = False

    def value(self, u):
        return np.ones(np.shape(u)[:-1])

    def gradient(self, u):
        return np.zeros(np.shape(u))

    def hessian(self, u):
        n = np.shape(u)[-1]
        return np.zeros(np.shape(u)[:-1] + (n, n))

    def third(self, u):
        n = np.shape(u)[-1]
        return np.zeros(np.shape(u)[:-1] + (n, n, n))

    def check_domain(self, chart, grid=None):
        if not chart.closed:
            raise PreconditionError(f"phi = 1 is not compactly supported on the patch {chart.name}")


BUMPS = {
    "const": "const  phi = 1 (closed surfaces only)",
    "bump": "bump[:r=<frac>][:c=<u0>,...]  radius as a fraction of the smallest box side (default 0.3)",
    "bump:narrow": "bump:narrow  bump with r = 0.15",
    "bump:wide": "bump:wide  bump with r = 0.4",
}


def default_center(chart):
    return 0.5 * (chart.lower + chart.upper)


def make_testfn(testfn_id, chart):
    if testfn_id == "const":
        return ConstantOne()
    head, *parts = testfn_id.split(":")
    if head != "bump":
        raise ValidationError(f"unknown test function {testfn_id!r}; known: {', '.join(BUMPS)}")
    frac, center = 0.3, default_center(chart)
    for part in parts:
        if part == "narrow":
            frac = 0.15
        elif part == "wide":
            frac = 0.4
        elif part.startswith("r="):
            frac = float(part[2:])
        elif part.startswith("c="):
            center = np.array([float(t) for t in part[2:].split(",")])
        else:
            raise ValidationError(f"bad bump option {part!r}")
    side = float(np.min(chart.upper - chart.lower))
    return BumpFunction(center, frac * side)
