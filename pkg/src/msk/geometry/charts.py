"""Analytic hypersurface charts u -> X(u) in R^(n+1) with derivatives to order three.

Arrays are batched over leading axes: ``u`` has shape (..., n), ``d1``
(..., n+1, n), ``d2`` (..., n+1, n, n) and ``d3`` (..., n+1, n, n, n)
with ``d3[..., c, i, j, l] = d_l d2[..., c, i, j]``.
"""

from itertools import product

import numpy as np

from ..errors import DomainError

HALF_PI = 0.5 * np.pi


class Chart:
    """Base class. Subclasses implement ``embed``, ``d1``, ``d2`` and optionally ``d3``.

    Orientation of the unit normal is fixed either by ``interior_point``
    (normal points towards it) or by ``normal_hint`` (declared direction).
    """

    analytic_d3 = True

    def __init__(self, name, n, lower, upper, periodic=None, closed=False,
                 interior_point=None, normal_hint=None, fd_step=None):
        self.name = name
        self.n = n
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.periodic = tuple(periodic) if periodic is not None else (False,) * n
        self.closed = closed
        self.interior_point = None if interior_point is None else np.asarray(interior_point, dtype=float)
        self.normal_hint = None if normal_hint is None else np.asarray(normal_hint, dtype=float)
        extent = float(np.max(self.upper - self.lower))
        self.fd_step = fd_step if fd_step is not None else 1e-4 * extent

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"

    @property
    def volume(self):
        return float(np.prod(self.upper - self.lower))

    def embed(self, u):
        raise NotImplementedError

    def d1(self, u):
        raise NotImplementedError

    def d2(self, u):
        raise NotImplementedError

    def d3(self, u):
        raise NotImplementedError

    def third(self, u, h=None):
        """Analytic d3 when available, else central differences of d2 with step h."""
        if self.analytic_d3 and h is None:
            return self.d3(u)
        return fd_third(self, u, self.fd_step if h is None else h)

    def contains(self, u):
        u = np.asarray(u, dtype=float)
        return bool(np.all((u > self.lower) & (u < self.upper)))

    def random_points(self, count, seed, margin=0.1):
        rng = np.random.default_rng(seed)
        lo = self.lower + margin * (self.upper - self.lower)
        hi = self.upper - margin * (self.upper - self.lower)
        return rng.uniform(lo, hi, size=(count, self.n))


def fd_third(chart, u, h):
    u = np.asarray(u, dtype=float)
    n = chart.n
    cols = []
    for l in range(n):
        e = np.zeros(n)
        e[l] = h
        cols.append((chart.d2(u + e) - chart.d2(u - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)


class FiniteDifferenceChart(Chart):
    """Wraps a chart and hides its analytic third derivatives."""

    analytic_d3 = False

    def __init__(self, base, h=None):
        super().__init__(base.name + "+fd", base.n, base.lower, base.upper, base.periodic,
                         base.closed, base.interior_point, base.normal_hint,
                         fd_step=h if h is not None else base.fd_step)
        self.base = base

    def embed(self, u):
        return self.base.embed(u)

    def d1(self, u):
        return self.base.d1(u)

    def d2(self, u):
        return self.base.d2(u)


_ONE, _COS, _SIN = 0, 1, 2


def _factor(kind, freq, x, order):
    if kind == _ONE:
        return np.ones_like(x) if order == 0 else np.zeros_like(x)
    arg = freq * x + order * HALF_PI
    scale = freq**order
    return scale * (np.cos(arg) if kind == _COS else np.sin(arg))


class ProductChart(Chart):
    """Charts whose coordinates are products of single-angle trig factors.

    X_c(u) = amp_c * prod_j f_cj(u_j) with f in {1, cos, sin}, so every
    partial derivative is again a product and is exact at any order.
    """

    def __init__(self, name, kinds, amps, freqs=None, **kw):
        self.kinds = np.asarray(kinds, dtype=int)
        self.amps = np.asarray(amps, dtype=float)
        self.freqs = np.ones(self.kinds.shape) if freqs is None else np.asarray(freqs, dtype=float)
        super().__init__(name, self.kinds.shape[1], **kw)

    def derivative(self, u, counts):
        u = np.asarray(u, dtype=float)
        out = np.broadcast_to(self.amps, u.shape[:-1] + self.amps.shape).copy()
        for j, order in enumerate(counts):
            x = u[..., j : j + 1]
            col = np.empty(out.shape)
            for c in range(self.kinds.shape[0]):
                col[..., c] = _factor(self.kinds[c, j], self.freqs[c, j], x[..., 0], order)
            out = out * col
        return out

    def _tensor(self, u, order):
        n = self.n
        u = np.asarray(u, dtype=float)
        shape = u.shape[:-1] + (self.kinds.shape[0],) + (n,) * order
        out = np.empty(shape)
        cache = {}
        for idx in product(range(n), repeat=order):
            counts = tuple(idx.count(j) for j in range(n))
            if counts not in cache:
                cache[counts] = self.derivative(u, counts)
            out[(Ellipsis, slice(None)) + idx] = cache[counts]
        return out

    def embed(self, u):
        return self.derivative(u, (0,) * self.n)

    def d1(self, u):
        return self._tensor(u, 1)

    def d2(self, u):
        return self._tensor(u, 2)

    def d3(self, u):
        return self._tensor(u, 3)


def _sphere_factors(n):
    """Hyperspherical angles: x_0 = cos t1, x_1 = sin t1 cos t2, ..., x_n = sin t1..sin t_{n-1} sin t_n."""
    kinds = np.full((n + 1, n), _ONE)
    for c in range(n + 1):
        for j in range(min(c, n)):
            kinds[c, j] = _SIN
        if c < n:
            kinds[c, c] = _COS
    kinds[n, n - 1] = _SIN
    return kinds


def _angular_box(n):
    lower = np.zeros(n)
    upper = np.full(n, np.pi)
    upper[-1] = 2.0 * np.pi
    periodic = (False,) * (n - 1) + (True,)
    return lower, upper, periodic


class EllipsoidChart(ProductChart):
    """Closed ellipsoid with semi-axes ``axes`` (length n+1) in hyperspherical angles."""

    def __init__(self, axes, name=None):
        axes = np.asarray(axes, dtype=float)
        n = axes.size - 1
        if n < 2:
            raise DomainError("ellipsoid needs at least three semi-axes")
        if np.any(axes <= 0):
            raise DomainError("semi-axes must be positive")
        lower, upper, periodic = _angular_box(n)
        self.axes = axes
        super().__init__(name or "ellipsoid:" + ",".join(f"{a:g}" for a in axes),
                         _sphere_factors(n), axes, lower=lower, upper=upper,
                         periodic=periodic, closed=True, interior_point=np.zeros(n + 1))


class SphereChart(EllipsoidChart):
    """Round sphere of radius r in R^(n+1)."""

    def __init__(self, r=1.0, n=2):
        if r <= 0:
            raise DomainError("radius must be positive")
        self.radius = float(r)
        super().__init__(np.full(n + 1, float(r)), name=f"sphere:r={r:g}:n={n}")


class PerturbedSphereChart(Chart):
    """Radial graph X = rho(u) S(u) over the unit sphere, rho = 1 + eps * x_0 x_1.

    x_0 x_1 = (1/2) sin(2 t1) cos(t2) is a smooth, non-axisymmetric function
    on the sphere; each factor depends on one angle so derivatives stay exact.
    """

    def __init__(self, eps=0.05, n=2):
        self.eps = float(eps)
        self.base = SphereChart(1.0, n)
        kinds = np.full((1, n), _ONE)
        freqs = np.ones((1, n))
        kinds[0, 0] = _SIN
        freqs[0, 0] = 2.0
        kinds[0, 1] = _COS
        self.rho_chart = ProductChart("rho", kinds, [0.5 * self.eps], freqs=freqs,
                                      lower=self.base.lower, upper=self.base.upper)
        super().__init__(f"perturbed-sphere:{eps:g}:n={n}", n, self.base.lower, self.base.upper,
                         self.base.periodic, closed=True, interior_point=np.zeros(n + 1))

    def _rho(self, u, counts):
        val = self.rho_chart.derivative(u, counts)[..., 0]
        if sum(counts) == 0:
            val = val + 1.0
        return val

    def _deriv(self, u, idx):
        n = self.n
        total = 0.0
        m = len(idx)
        for mask in range(1 << m):
            a = [idx[p] for p in range(m) if mask >> p & 1]
            b = [idx[p] for p in range(m) if not mask >> p & 1]
            ca = tuple(a.count(j) for j in range(n))
            cb = tuple(b.count(j) for j in range(n))
            total = total + self._rho(u, ca)[..., None] * self.base.derivative(u, cb)
        return total

    def _tensor(self, u, order):
        u = np.asarray(u, dtype=float)
        n = self.n
        out = np.empty(u.shape[:-1] + (n + 1,) + (n,) * order)
        cache = {}
        for idx in product(range(n), repeat=order):
            key = tuple(sorted(idx))
            if key not in cache:
                cache[key] = self._deriv(u, key)
            out[(Ellipsis, slice(None)) + idx] = cache[key]
        return out

    def embed(self, u):
        return self._deriv(u, ())

    def d1(self, u):
        return self._tensor(u, 1)

    def d2(self, u):
        return self._tensor(u, 2)

    def d3(self, u):
        return self._tensor(u, 3)


class GraphChart(Chart):
    """Graph X(u) = (u, h(u)) over an axis-aligned box; normal orientation declared up."""

    def __init__(self, name, n, h, grad, hess, third, half_width=1.0, up=True, interior_point=None):
        lower = np.full(n, -half_width)
        upper = np.full(n, half_width)
        hint = np.zeros(n + 1)
        hint[-1] = 1.0 if up else -1.0
        super().__init__(name, n, lower, upper, normal_hint=None if interior_point is not None else hint,
                         interior_point=interior_point)
        self._h, self._grad, self._hess, self._third = h, grad, hess, third

    def embed(self, u):
        u = np.asarray(u, dtype=float)
        return np.concatenate([u, self._h(u)[..., None]], axis=-1)

    def d1(self, u):
        u = np.asarray(u, dtype=float)
        n = self.n
        top = np.broadcast_to(np.eye(n), u.shape[:-1] + (n, n))
        return np.concatenate([top, self._grad(u)[..., None, :]], axis=-2)

    def d2(self, u):
        u = np.asarray(u, dtype=float)
        n = self.n
        zero = np.zeros(u.shape[:-1] + (n, n, n))
        return np.concatenate([zero, self._hess(u)[..., None, :, :]], axis=-3)

    def d3(self, u):
        u = np.asarray(u, dtype=float)
        n = self.n
        zero = np.zeros(u.shape[:-1] + (n, n, n, n))
        return np.concatenate([zero, self._third(u)[..., None, :, :, :]], axis=-4)


def paraboloid_chart(n=2, curvatures=None):
    """h(u) = (1/2) sum kappa_i u_i^2; the apex has L = diag(kappa) for the upward normal."""
    kappa = np.ones(n) if curvatures is None else np.asarray(curvatures, dtype=float)
    return GraphChart(
        f"paraboloid-patch:n={n}",
        n,
        h=lambda u: 0.5 * np.sum(kappa * u * u, axis=-1),
        grad=lambda u: kappa * u,
        hess=lambda u: np.broadcast_to(np.diag(kappa), u.shape[:-1] + (n, n)),
        third=lambda u: np.zeros(u.shape[:-1] + (n, n, n)),
    )


def saddle_chart():
    """h(u) = u_1^2 - u_2^2, a patch of negative Gauss curvature."""
    H = np.diag([2.0, -2.0])
    return GraphChart(
        "saddle-patch",
        2,
        h=lambda u: u[..., 0] ** 2 - u[..., 1] ** 2,
        grad=lambda u: np.stack([2.0 * u[..., 0], -2.0 * u[..., 1]], axis=-1),
        hess=lambda u: np.broadcast_to(H, u.shape[:-1] + (2, 2)),
        third=lambda u: np.zeros(u.shape[:-1] + (2, 2, 2)),
    )


def ellipsoid_patch_chart(axes=(1.0, 1.3, 0.8), half_width=None):
    """Lower cap of an ellipsoid as a graph: h(u) = -c sqrt(1 - sum u_i^2 / a_i^2).

    Unlike the angular chart, finite differences of d2 here carry a
    non-symmetric O(h^2) error, which makes it the reference patch for
    convergence-order checks.
    """
    axes = np.asarray(axes, dtype=float)
    n = axes.size - 1
    a2 = axes[:n] ** 2
    c = axes[n]
    hw = 0.5 * float(np.min(axes[:n])) if half_width is None else half_width

    def parts(u):
        q = np.sum(u * u / a2, axis=-1)
        s = np.sqrt(1.0 - q)
        qi = 2.0 * u / a2
        qij = np.diag(2.0 / a2)
        return s, qi, qij

    def h(u):
        return -c * parts(u)[0]

    def grad(u):
        s, qi, _ = parts(u)
        return c * qi / (2.0 * s[..., None])

    def hess(u):
        s, qi, qij = parts(u)
        s_ = s[..., None, None]
        return c * (qij / (2.0 * s_) + np.einsum("...i,...j->...ij", qi, qi) / (4.0 * s_**3))

    def third(u):
        s, qi, qij = parts(u)
        s_ = s[..., None, None, None]
        sym = (np.einsum("ij,...k->...ijk", qij, qi) + np.einsum("ik,...j->...ijk", qij, qi)
               + np.einsum("jk,...i->...ijk", qij, qi))
        cube = np.einsum("...i,...j,...k->...ijk", qi, qi, qi)
        return c * (sym / (4.0 * s_**3) + 3.0 * cube / (8.0 * s_**5))

    return GraphChart("ellipsoid-patch:" + ",".join(f"{a:g}" for a in axes), n, h, grad, hess, third,
                      half_width=hw, interior_point=np.zeros(n + 1))
