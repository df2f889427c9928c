"""Inequality reports: LHS against derivative-order-split RHS integrals.

The m-th RHS term is int sigma_{k-m}(L) |nabla^m phi| dmu with sigma_0 = 1
and |.| the Frobenius norm in an orthonormal frame.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DomainError, PreconditionError, ValidationError
from ..symcalc.sigma import newton_sequence
from .bump import ConstantOne
from .evaluate import check_preconditions, integrate_fields

RHS_READING = "m-th term: int sigma_{k-m}(L) |nabla^m phi|, Frobenius norm, sigma_0 = 1"
DEFAULT_MS_BUDGET = 100.0


def prop_a_budget(k, a):
    return 10.0 * (1.0 + a) ** k


@dataclass
class InequalityReport:
    family: str
    k: int
    l: int
    a: float
    lhs: float
    rhs_terms: list
    budget: float
    surface: str
    potential: str
    grid: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(v < 0 for _, v in self.rhs_terms):
            raise ValidationError("rhs terms must be nonnegative")

    @property
    def rhs_total(self):
        return math.fsum(v for _, v in self.rhs_terms)

    @property
    def c_star(self):
        total = self.rhs_total
        if total > 0:
            return self.lhs / total
        return 0.0 if self.lhs <= 0 else math.inf

    @property
    def passed(self):
        return bool(self.c_star <= self.budget)

    def to_dict(self):
        return {
            "surface": self.surface,
            "potential": self.potential,
            "family": self.family,
            "k": self.k,
            "l": self.l,
            "a": self.a,
            "grid": self.grid,
            "lhs": self.lhs,
            "rhs_terms": [{"m": m, "value": v} for m, v in self.rhs_terms],
            "c_star": self.c_star,
            "pass": self.passed,
            "budget": self.budget,
            "metadata": dict(self.metadata),
        }


def _rhs_and(chart, grid, potential, testfn, k, lhs_columns, extra=0):
    """Integrate the k+1 RHS terms together with ``extra`` LHS columns in one pass."""
    const = isinstance(testfn, ConstantOne)
    order = 0 if const else k
    if order > 3:
        raise ValidationError("RHS terms with |nabla^m phi|, m > 3, are not implemented; use phi = 1")

    def columns(nf):
        sig = newton_sequence(nf.L, k)[0]
        cols = [sig[k - m] * nf.phi_norms[m] for m in range(order + 1)]
        return np.stack(cols + lhs_columns(nf), axis=-1)

    vals = integrate_fields(chart, grid, potential, testfn, columns, phi_order=order)
    rhs = [(m, float(vals[m])) for m in range(order + 1)]
    rhs += [(m, 0.0) for m in range(order + 1, k + 1)]
    return rhs, [float(v) for v in vals[order + 1:]]


def proposition_a_report(k, a, chart, grid, potential, testfn, budget=None):
    """LHS = int sigma_k(D^2v + aL) phi; requires a > 1, the cone hypothesis and |grad V| <= 1."""
    if a <= 1:
        raise DomainError(f"need a > 1, got a={a}")
    if not hasattr(potential, "certify"):
        raise PreconditionError(f"{potential.name} has no gradient-bound certificate")
    cert = potential.certify()
    if not cert.passed:
        raise PreconditionError(f"{potential.name} fails its certificate: {cert}")
    scan = check_preconditions(chart, grid, k, potential, testfn)

    def lhs_col(nf):
        return [newton_sequence(nf.H + a * nf.L, k)[0][k] * nf.phi]

    rhs, (lhs,) = _rhs_and(chart, grid, potential, testfn, k, lhs_col)
    budget = prop_a_budget(k, a) if budget is None else budget
    meta = {"rhs_reading": RHS_READING, "budget_rule": "10*(1+a)^k heuristic envelope",
            "cone": scan.cone, "testfn": testfn.name}
    return InequalityReport("propA", k, 0, float(a), lhs, rhs, budget, chart.name, potential.name,
                            grid.label(), meta)


def ms_cone(k, l, n):
    """Cone order required by the Sobolev-type (thmMS) statement, validating (k, l)."""
    if k == 1:
        if l != 0:
            raise DomainError("k = 1 pairs with l = 0")
        return 1
    if k == n and l == n:
        raise DomainError("k = l = n makes the exponent degenerate")
    if not 1 <= l <= k - 1:
        raise DomainError(f"need 1 <= l <= k-1, got k={k}, l={l}")
    if 2 <= k <= n - 1:
        return k + 1
    if k == n:
        return n
    raise DomainError(f"need k <= n, got k={k}, n={n}")


class _NoPotential:
    """Zero ambient function: the thmMS report does not involve v."""

    name = "none"

    def value(self, x):
        return np.zeros(x.shape[:-1])

    def gradient(self, x):
        return np.zeros(x.shape)

    def hessian(self, x):
        return np.zeros(x.shape + (x.shape[-1],))


def theorem_ms_report(k, l, chart, grid, testfn, budget=None):
    """LHS = (int sigma_l(L) |phi|^p)^(1/p), p = (n-l)/(n-k).

    For k = n the exponent p is infinite and the LHS is its limit, the
    maximum of |phi| over nodes where sigma_l(L) > 0.
    """
    n = chart.n
    cone = ms_cone(k, l, n)
    pot = _NoPotential()
    scan = check_preconditions(chart, grid, k, pot, testfn, cone=cone)
    meta = {"rhs_reading": RHS_READING, "cone": cone, "testfn": testfn.name,
            "budget_rule": f"default {DEFAULT_MS_BUDGET:g}"}
    if k < n:
        p = (n - l) / (n - k)

        def lhs_col(nf):
            return [newton_sequence(nf.L, l)[0][l] * nf.phi_norms[0] ** p]

        rhs, (inner,) = _rhs_and(chart, grid, pot, testfn, k, lhs_col)
        lhs = inner ** (1.0 / p) if inner > 0 else 0.0
        meta["exponent"] = p
    else:
        peak = [0.0]

        def lhs_col(nf):
            sig = newton_sequence(nf.L, l)[0][l]
            vals = np.where(sig > 0, nf.phi_norms[0], 0.0)
            peak[0] = max(peak[0], float(np.max(vals)))
            return []

        rhs, _ = _rhs_and(chart, grid, pot, testfn, k, lhs_col)
        lhs = peak[0]
        meta["exponent"] = "inf (k = n limit: sup of |phi| on {sigma_l(L) > 0})"
    budget = DEFAULT_MS_BUDGET if budget is None else budget
    return InequalityReport("thmMS", k, l, None, lhs, rhs, budget, chart.name, "none", grid.label(), meta)
