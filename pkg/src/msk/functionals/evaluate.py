"""Quadrature of the I/J/K/N functionals and related curvature integrals."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import PreconditionError, ValidationError
from ..geometry.fields import coordinate_hessian, coordinate_third, frame_tensor3, pullback
from ..geometry.quadrature import integrate, kconvexity_scan
from ..symcalc.newton import mixed_newton, mixed_sigma

GRAD_BOUND_TOL = 1e-12


@dataclass
class NodeFields:
    """Per-node quantities in the orthonormal frame (batched over nodes)."""

    fp: object
    L: np.ndarray
    H: np.ndarray
    grad_v: np.ndarray
    b: np.ndarray
    phi: np.ndarray
    grad_phi: np.ndarray
    phi_norms: list
    _cache: Optional[dict] = None

    @property
    def grad_v_sq(self):
        return np.einsum("...a,...a->...", self.grad_v, self.grad_v)

    def newton(self, l, k):
        """T_k(H^l, L^(k-l)), memoized per chunk."""
        if self._cache is None:
            self._cache = {}
        key = (l, k)
        if key not in self._cache:
            self._cache[key] = mixed_newton(self.H, self.L, l, k)
        return self._cache[key]

    def sigma(self, l, k):
        return mixed_sigma(self.H, self.L, l, k)


def node_fields(fp, potential, testfn, phi_order=1):
    """Evaluate D^2 v, grad v, b, phi and |nabla^m phi| (m <= phi_order) at a frame/jet point."""
    if phi_order > 3:
        raise ValidationError("covariant derivatives of phi are implemented up to order 3")
    order = 3 if phi_order >= 3 else 2
    _, dv, ddv = pullback(potential, fp, order=2)
    H = fp.to_frame(coordinate_hessian(fp, dv, ddv))
    H = 0.5 * (H + np.swapaxes(H, -1, -2))
    grad_v = fp.covector_to_frame(dv)
    b = np.einsum("...c,...c->...", potential.gradient(fp.x), fp.normal)
    u = fp.u
    phi = testfn.value(u)
    dphi = testfn.gradient(u)
    grad_phi = fp.covector_to_frame(dphi)
    norms = [np.abs(phi), np.linalg.norm(grad_phi, axis=-1)]
    if phi_order >= 2:
        ddphi = testfn.hessian(u)
        norms.append(np.linalg.norm(fp.to_frame(coordinate_hessian(fp, dphi, ddphi)), axis=(-2, -1)))
    if order >= 3 and phi_order >= 3:
        T3 = coordinate_third(fp, dphi, ddphi, testfn.third(u))
        norms.append(np.sqrt(np.sum(frame_tensor3(fp, T3) ** 2, axis=(-3, -2, -1))))
    return NodeFields(fp, fp.L, H, grad_v, b, phi, grad_phi, norms[: phi_order + 1])


def weight_values(nf, weight):
    out = np.full(nf.b.shape, float(weight.sign))
    if weight.grad_power:
        out = out * np.sqrt(nf.grad_v_sq) ** weight.grad_power
    if weight.b_power:
        out = out * nf.b**weight.b_power
    return out


def test_factor(nf, mode):
    if mode == "phi":
        return nf.phi
    if mode == "abs":
        return nf.phi_norms[0]
    return nf.phi_norms[1]


def integrand_value(nf, spec):
    """Pointwise integrand of one FunctionalSpec."""
    k, l = spec.k, spec.l
    w = nf.grad_v
    if spec.family == "I":
        core = nf.sigma(l, k)
    elif spec.family == "J":
        core = np.einsum("...i,...ij,...j->...", w, nf.newton(l, k), w)
    elif spec.family == "K":
        T = nf.newton(l, k - 1)
        core = np.einsum("...m,...mi,...ij,...j->...", w, nf.H, T, w)
        return core * weight_values(nf, spec.weight) * test_factor(nf, spec.mode)
    else:
        T = nf.newton(l, k - 1)
        return np.einsum("...i,...ij,...j->...", nf.grad_phi, T, w) * weight_values(nf, spec.weight)
    return core * weight_values(nf, spec.weight) * test_factor(nf, spec.mode)


def check_preconditions(chart, grid, k, potential, testfn, cone=None):
    """Cone hypothesis on L, test-function admissibility. Raises PreconditionError."""
    scan = kconvexity_scan(chart, grid, k, cone=cone)
    if not scan.passed:
        raise PreconditionError(
            f"kconvexity: {chart.name} fails Gamma_{scan.cone}^+ at node {scan.worst_node} "
            f"(u={list(scan.worst_u)}, worst sigma margin {scan.worst_margin:.6g})")
    testfn.check_domain(chart, grid)
    return scan


def integrate_fields(chart, grid, potential, testfn, columns, phi_order=1):
    """Integrate ``columns(nf) -> (N, m)`` over the grid; enforces |grad v| <= 1 at nodes
    for bounded-gradient potentials."""
    jets = phi_order >= 3
    bounded = hasattr(potential, "certify")

    def integrand(fp):
        nf = node_fields(fp, potential, testfn, phi_order)
        if bounded:
            excess = np.sqrt(nf.grad_v_sq) - 1.0
            if np.any(excess > GRAD_BOUND_TOL):
                i = int(np.argmax(excess))
                raise PreconditionError(f"|grad v| exceeds 1 at u={fp.u[i].tolist()}")
        return columns(nf)

    return integrate(chart, grid, integrand, jets=jets)


def eval_functionals(specs, chart, grid, potential, testfn=None, check=True, cone=None):
    """Evaluate several specs in one pass; returns an array of values."""
    specs = list(specs)
    testfn = testfn if testfn is not None else specs[0].testfn
    if testfn is None:
        raise ValidationError("a test function is required")
    if check:
        kmax = max(s.k for s in specs)
        check_preconditions(chart, grid, kmax, potential, testfn, cone=cone)

    def columns(nf):
        return np.stack([integrand_value(nf, s) for s in specs], axis=-1)

    return integrate_fields(chart, grid, potential, testfn, columns)


def eval_functional(spec, chart, grid, potential, testfn=None, check=True):
    return float(eval_functionals([spec], chart, grid, potential, testfn, check)[0])
