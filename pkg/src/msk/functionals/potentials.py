"""Convex potentials V on a hyperplane E and their extensions V o p to R^(n+1).

Each catalog family certifies |grad V| <= 1 analytically; ``certify`` checks
the bound and convexity numerically on random samples.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..geometry.fields import AmbientFunction, QuadraticAmbient
from ..symcalc.jacobi import jacobi_eigenvalues

HESS_TOL = 1e-10
GRAD_TOL = 1e-12


def default_plane(ambient_dim):
    """Orthonormal basis (columns) of the complement of (1, 2, ..., n+1)."""
    nu = np.arange(1.0, ambient_dim + 1.0)
    nu /= np.linalg.norm(nu)
    basis = np.eye(ambient_dim) - np.outer(nu, nu)
    q, _ = np.linalg.qr(basis)
    return q[:, : ambient_dim - 1]


@dataclass(frozen=True)
class Certificate:
    samples: int
    min_hessian_eig: float
    max_gradient_norm: float

    @property
    def passed(self):
        return self.min_hessian_eig >= -HESS_TOL and self.max_gradient_norm <= 1.0 + GRAD_TOL


class ConvexPotential(AmbientFunction):
    """V on E = span(plane) and V_bar = V o p, with p(x) = plane^T x in E-coordinates."""

    name = "potential"

    def __init__(self, plane):
        self.plane = np.asarray(plane, dtype=float)

    @property
    def dim(self):
        return self.plane.shape[1]

    # V and its derivatives in E-coordinates y (..., n)
    def V(self, y):
        raise NotImplementedError

    def dV(self, y):
        raise NotImplementedError

    def ddV(self, y):
        raise NotImplementedError

    def dddV(self, y):
        raise NotImplementedError

    def project(self, x):
        return np.asarray(x, dtype=float) @ self.plane

    def value(self, x):
        return self.V(self.project(x))

    def gradient(self, x):
        return self.dV(self.project(x)) @ self.plane.T

    def hessian(self, x):
        B = self.plane
        return np.einsum("ca,...ab,db->...cd", B, self.ddV(self.project(x)), B)

    def third(self, x):
        B = self.plane
        return np.einsum("ca,db,ef,...abf->...cde", B, B, B, self.dddV(self.project(x)))

    def certify(self, samples=1000, seed=0, spread=2.0):
        rng = np.random.default_rng(seed)
        y = spread * rng.standard_normal((samples, self.dim))
        eig = jacobi_eigenvalues(self.ddV(y))
        grad = np.linalg.norm(self.dV(y), axis=-1)
        return Certificate(samples, float(np.min(eig)), float(np.max(grad)))


class LinearPotential(ConvexPotential):
    """V(y) = c <a, y> with |a| = 1 and |c| <= 1."""

    def __init__(self, plane, c=0.5, direction=None):
        super().__init__(plane)
        if abs(c) > 1.0:
            raise ValidationError(f"linear potential needs |c| <= 1, got {c}")
        a = np.zeros(self.dim) if direction is None else np.asarray(direction, dtype=float)
        if direction is None:
            a[0] = 1.0
        self.a = a / np.linalg.norm(a)
        self.c = float(c)
        self.name = f"potential:linear:c={c:g}"

    def V(self, y):
        return self.c * (y @ self.a)

    def dV(self, y):
        return np.broadcast_to(self.c * self.a, y.shape).copy()

    def ddV(self, y):
        return np.zeros(y.shape + (self.dim,))

    def dddV(self, y):
        return np.zeros(y.shape + (self.dim, self.dim))


class ZeroPotential(LinearPotential):
    def __init__(self, plane):
        super().__init__(plane, c=0.0)
        self.name = "potential:zero"


class SmoothDistancePotential(ConvexPotential):
    """V(y) = c (sqrt(eps^2 + |y - y0|^2) - eps); |grad V| < c <= 1."""

    def __init__(self, plane, eps=0.5, c=1.0, center=None):
        super().__init__(plane)
        if not 0.0 < c <= 1.0 or eps <= 0.0:
            raise ValidationError("smoothed distance needs 0 < c <= 1 and eps > 0")
        self.eps, self.c = float(eps), float(c)
        self.y0 = np.full(self.dim, 0.1) if center is None else np.asarray(center, dtype=float)
        self.name = f"potential:smoothdist:eps={eps:g}"

    def _r(self, y):
        z = y - self.y0
        return z, np.sqrt(self.eps**2 + np.sum(z * z, axis=-1))

    def V(self, y):
        z, r = self._r(y)
        return self.c * (r - self.eps)

    def dV(self, y):
        z, r = self._r(y)
        return self.c * z / r[..., None]

    def ddV(self, y):
        z, r = self._r(y)
        r_ = r[..., None, None]
        return self.c * (np.eye(self.dim) / r_ - np.einsum("...i,...j->...ij", z, z) / r_**3)

    def dddV(self, y):
        z, r = self._r(y)
        r_ = r[..., None, None, None]
        eye = np.eye(self.dim)
        sym = (np.einsum("ij,...k->...ijk", eye, z) + np.einsum("ik,...j->...ijk", eye, z)
               + np.einsum("jk,...i->...ijk", eye, z))
        return self.c * (-sym / r_**3 + 3.0 * np.einsum("...i,...j,...k->...ijk", z, z, z) / r_**5)


class LogSumExpPotential(ConvexPotential):
    """V(y) = (1/beta) log sum_i exp(beta (<a_i, y> + c_i)) with |a_i| <= 1.

    The gradient is a convex combination of the a_i, hence |grad V| <= 1.
    """

    def __init__(self, plane, beta=2.0, slopes=None, offsets=None):
        super().__init__(plane)
        n = self.dim
        if slopes is None:
            slopes = np.vstack([np.eye(n), -np.ones((1, n)) / math.sqrt(n)]) * 0.9
        self.A = np.asarray(slopes, dtype=float)
        if np.any(np.linalg.norm(self.A, axis=-1) > 1.0 + GRAD_TOL):
            raise ValidationError("log-sum-exp slopes must have norm <= 1")
        self.offsets = np.linspace(0.0, 0.3, self.A.shape[0]) if offsets is None else np.asarray(offsets)
        self.beta = float(beta)
        self.name = f"potential:lse:beta={beta:g}"

    def _p(self, y):
        s = self.beta * (y @ self.A.T + self.offsets)
        smax = np.max(s, axis=-1, keepdims=True)
        e = np.exp(s - smax)
        return s, smax, e / np.sum(e, axis=-1, keepdims=True)

    def V(self, y):
        s, smax, p = self._p(y)
        return (smax[..., 0] + np.log(np.sum(np.exp(s - smax), axis=-1))) / self.beta

    def dV(self, y):
        return self._p(y)[2] @ self.A

    def ddV(self, y):
        p = self._p(y)[2]
        mu = p @ self.A
        second = np.einsum("...i,ia,ib->...ab", p, self.A, self.A)
        return self.beta * (second - np.einsum("...a,...b->...ab", mu, mu))

    def dddV(self, y):
        p = self._p(y)[2]
        mu = p @ self.A
        D = self.A - mu[..., None, :]
        return self.beta**2 * np.einsum("...i,...ia,...ib,...ic->...abc", p, D, D, D)


POTENTIALS = {
    "potential:linear": "potential:linear[:c=<slope>]  c<a,y>, |c| <= 1 (default c=0.5)",
    "potential:zero": "potential:zero  V = 0",
    "potential:smoothdist": "potential:smoothdist[:eps=<eps>]  sqrt(eps^2 + |y - y0|^2) - eps",
    "potential:lse": "potential:lse[:beta=<beta>]  smoothed max of affine functions, slopes <= 0.9",
    "potential:quadratic": "potential:quadratic  |x|^2/2 on R^(n+1) (ambient only, no gradient bound)",
}


def make_potential(potential_id, ambient_dim, plane=None):
    """Catalog lookup; ``ambient_dim`` is n+1."""
    text = potential_id if potential_id.startswith("potential:") else "potential:" + potential_id
    parts = text.split(":")
    head = ":".join(parts[:2])
    opts = {}
    for part in parts[2:]:
        key, sep, val = part.partition("=")
        if not sep:
            raise ValidationError(f"bad option {part!r} in {potential_id!r}")
        opts[key] = float(val)
    B = default_plane(ambient_dim) if plane is None else plane
    if head == "potential:linear":
        return LinearPotential(B, c=opts.get("c", 0.5))
    if head == "potential:zero":
        return ZeroPotential(B)
    if head == "potential:smoothdist":
        return SmoothDistancePotential(B, eps=opts.get("eps", 0.5))
    if head == "potential:lse":
        return LogSumExpPotential(B, beta=opts.get("beta", 2.0))
    if head == "potential:quadratic":
        return QuadraticAmbient()
    raise ValidationError(f"unknown potential id {potential_id!r}; known: {', '.join(POTENTIALS)}")
