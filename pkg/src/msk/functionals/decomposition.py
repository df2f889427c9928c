"""Integral identities that split functionals into lower-index pieces.

* ``eq29``: sigma_2(D^2v + aL) = Sigma_2(D^2v, D^2v)/2 + a Sigma_2(D^2v, L) + a^2 Sigma_2(L, L)/2,
  an algebraic identity of the integrand.
* ``eq52``: the integration-by-parts split of I_{k,i0} into I, J, K and N terms.
* ``eq59``: the integration-by-parts split of K_{k,i0-3}^(-1) with the constants
  C1, C2, C3 derived in docs/derivations.md.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from ..errors import DomainError
from ..symcalc.sigma import newton_sequence
from ..symcalc.newton import mixed_sigma
from .evaluate import check_preconditions, integrand_value, integrate_fields
from .spec import I, J, K, MINUS_ONE, N, Weight

GRAD2 = Weight(1, 2, 0)
GRAD4 = Weight(1, 4, 0)


@dataclass
class Decomposition:
    which: str
    params: dict
    lhs: float
    rhs: float
    terms: list = field(default_factory=list)

    @property
    def residual(self):
        return abs(self.lhs - self.rhs) / (1.0 + abs(self.lhs))


def eq52_coefficients(k, i0):
    """Exact coefficients (I^(|dv|^2)_{k,i0-2}, J^(-1)_{k,i0-2}, K^(-1)_{k,i0-3}, N^(-1)_{k,i0-1})."""
    m = i0 - 2
    c1 = Fraction((i0 - 1) * comb(k, m), k * comb(k - 1, m))
    c2 = Fraction((i0 - 1) * comb(k, m), comb(k - 1, m))
    c3 = Fraction((i0 - 1) * comb(k - 1, i0 - 3), comb(k - 1, m))
    return c1, c2, c3, Fraction(1)


def eq59_constants(k, i0):
    """C1, C2, C3 = (i0-3)/(2(k-i0+4)) * (1, k, i0-4)."""
    base = Fraction(i0 - 3, 2 * (k - i0 + 4))
    return base, base * k, base * (i0 - 4)


def _plan(which, params, n):
    """List of (coefficient, spec) for the right-hand side and the LHS spec."""
    if which == "eq52":
        k, i0 = params["k"], params["i0"]
        if not 3 <= i0 <= k <= n:
            raise DomainError(f"eq52 needs 3 <= i0 <= k <= n, got k={k}, i0={i0}, n={n}")
        c1, c2, c3, c4 = eq52_coefficients(k, i0)
        rhs = [(c1, I(k, i0 - 2, GRAD2)), (c2, J(k, i0 - 2, MINUS_ONE)),
               (c3, K(k, i0 - 3, MINUS_ONE)), (c4, N(k, i0 - 1, MINUS_ONE))]
        return I(k, i0), rhs, k
    if which == "eq59":
        k, i0 = params["k"], params["i0"]
        if not 5 <= i0 <= k <= n:
            raise DomainError(f"eq59 needs 5 <= i0 <= k <= n, got k={k}, i0={i0}, n={n}")
        C1, C2, C3 = eq59_constants(k, i0)
        half = Fraction(1, 2)
        rhs = [(half, I(k, i0 - 2, GRAD2)), (-C1, I(k, i0 - 4, GRAD4)), (C2, J(k, i0 - 4, GRAD2)),
               (C3, K(k, i0 - 5, GRAD2)), (half, N(k, i0 - 3, GRAD2))]
        return K(k, i0 - 3, MINUS_ONE), rhs, k
    raise DomainError(f"unknown decomposition {which!r}")


def decompose(which, params, chart, grid, potential, testfn, check=True):
    """Evaluate both sides of the named identity by quadrature."""
    params = dict(params)
    n = chart.n
    if which == "eq29":
        k = params.setdefault("k", 2)
        if k != 2:
            raise DomainError("eq29 is the k = 2 split")
        a = float(params["a"])
        if check:
            check_preconditions(chart, grid, 2, potential, testfn)

        def columns(nf):
            direct = newton_sequence(nf.H + a * nf.L, 2)[0][2]
            return np.stack([direct * nf.phi, mixed_sigma(nf.H, nf.L, 2, 2) * nf.phi,
                             mixed_sigma(nf.H, nf.L, 1, 2) * nf.phi,
                             mixed_sigma(nf.H, nf.L, 0, 2) * nf.phi], axis=-1)

        lhs, t1, t2, t3 = integrate_fields(chart, grid, potential, testfn, columns)
        terms = [(0.5, "Sigma_2(D2v,D2v)", t1), (a, "Sigma_2(D2v,L)", t2), (0.5 * a * a, "Sigma_2(L,L)", t3)]
        rhs = sum(c * v for c, _, v in terms)
        return Decomposition(which, params, float(lhs), float(rhs), terms)

    left, rhs_plan, k = _plan(which, params, n)
    if check:
        check_preconditions(chart, grid, k, potential, testfn)
    specs = [left] + [s for _, s in rhs_plan]

    def columns(nf):
        return np.stack([integrand_value(nf, s) for s in specs], axis=-1)

    vals = integrate_fields(chart, grid, potential, testfn, columns)
    terms = [(float(c), s.label(), float(v)) for (c, s), v in zip(rhs_plan, vals[1:])]
    rhs = float(np.sum([c * v for c, _, v in terms]))
    return Decomposition(which, params, float(vals[0]), rhs, terms)


def decomposition_residual(which, params, chart, grid, potential, testfn, check=True):
    """|LHS - RHS| / (1 + |LHS|) for eq29, eq52 or eq59."""
    return decompose(which, params, chart, grid, potential, testfn, check).residual
