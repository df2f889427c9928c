"""Empirical ratio probes for the estimate chain, with all constants set to 1.

A probe evaluates LHS and RHS of a stated inequality and records
ratio = LHS / RHS; it passes iff LHS <= budget * RHS. These are probes of
non-sharp inequalities, not identities. The two base cases also report an
integration-by-parts identity residual.

An LHS whose magnitude is below NOISE_REL times the integral of the absolute
LHS integrand is cancellation roundoff of an exactly vanishing integral. It is
recorded as zero, so ratio = 0.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DomainError
from ..symcalc.newton import mixed_newton
from ..symcalc.sigma import newton_sequence
from .evaluate import check_preconditions, integrand_value, integrate_fields, weight_values
from .spec import I, J, K, MINUS_ONE, N, ONE, Weight

DEFAULT_BUDGET = 100.0
NOISE_REL = 1e-12
PROBES = ("propI", "propJ", "propN", "propK", "lemma_k0_odd", "lemma_k0_even", "base_i0_1", "base_i0_2")


@dataclass
class ProbeRecord:
    which: str
    params: dict
    lhs: float
    rhs: float
    budget: float
    identity_residual: Optional[float] = None
    detail: dict = field(default_factory=dict)
    noise: float = 0.0

    @property
    def effective_lhs(self):
        return 0.0 if abs(self.lhs) <= self.noise else self.lhs

    @property
    def ratio(self):
        if self.effective_lhs == 0.0:
            return 0.0
        if self.rhs == 0.0:
            return math.copysign(math.inf, self.lhs)
        return self.lhs / self.rhs

    @property
    def passed(self):
        return bool(self.effective_lhs <= self.budget * self.rhs)

    def to_dict(self):
        return {"which": self.which, "params": dict(self.params), "lhs": self.lhs, "rhs": self.rhs,
                "ratio": self.ratio, "pass": self.passed, "budget": self.budget,
                "identity_residual": self.identity_residual, "noise": self.noise, "detail": dict(self.detail)}


def _weight(params):
    w = params.get("weight", ONE)
    return Weight.parse(w) if isinstance(w, str) else w


def _need(cond, msg):
    if not cond:
        raise DomainError(msg)


def _chain_plan(which, params, n):
    """(lhs specs, rhs specs, top cone order) for the pure ratio probes."""
    k = params["k"]
    _need(1 <= k <= n, f"need 1 <= k <= n, got k={k}")
    if which in ("propI", "propJ"):
        l = params["l"]
        _need(0 <= l <= k, f"{which} needs 0 <= l <= k")
        fam = I if which == "propI" else J
        return [fam(k, l, _weight(params))], [I(k, s, ONE, "abs") for s in range(l + 1)]
    if which == "propN":
        l = params["l"]
        _need(k >= 2 and 0 <= l <= k - 1, "propN needs k >= 2 and 0 <= l <= k-1")
        return [N(k, l, _weight(params))], [I(k - 1, s, ONE, "absgrad") for s in range(l + 1)]
    if which == "propK":
        i0 = params["i0"]
        _need(k >= 2 and 3 <= i0 <= k + 1, "propK needs 3 <= i0 <= k+1")
        rhs = [I(k, s, ONE, "abs") for s in range(min(i0 - 2, k) + 1)]
        rhs += [I(k - 1, s, ONE, "absgrad") for s in range(min(i0 - 3, k - 1) + 1)]
        return [K(k, i0 - 3, MINUS_ONE)], rhs
    if which in ("lemma_k0_odd", "lemma_k0_even"):
        i0 = params["i0"]
        odd = which == "lemma_k0_odd"
        _need(3 <= i0 <= k and (i0 % 2 == 1) == odd, f"{which} needs 3 <= i0 <= k with matching parity")
        if odd:
            lhs = [K(k, 0, Weight(s, i0 - 3)) for s in (1, -1)]
            rhs = [I(k, 0, ONE, "abs"), I(k, 1, ONE, "abs"), I(k - 1, 0, ONE, "absgrad")]
        else:
            lhs = [K(k, 1, Weight(s, i0 - 4)) for s in (1, -1)]
            rhs = [I(k, s, ONE, "abs") for s in range(3)] + [I(k - 1, s, ONE, "absgrad") for s in range(2)]
        return lhs, rhs
    raise DomainError(f"unknown probe {which!r}")


def _base_case(which, params, chart, grid, potential, testfn, budget):
    k = params["k"]
    n = chart.n
    if which == "base_i0_1":
        _need(1 <= k <= n, "base_i0_1 needs 1 <= k <= n")

        def columns(nf):
            direct = integrand_value(nf, I(k, 1))
            parts = integrand_value(nf, N(k, 0, MINUS_ONE))
            sig = newton_sequence(nf.L, k - 1)[0][k - 1]
            return np.stack([direct, parts, sig * nf.phi_norms[1], np.abs(direct)], axis=-1)

        direct, parts, rhs, mass = integrate_fields(chart, grid, potential, testfn, columns)
        residual = abs(direct - parts) / (1.0 + abs(direct))
        detail = {"direct": float(direct), "after_divergence_free_step": float(parts)}
        return ProbeRecord(which, dict(params), float(direct), float(rhs), budget, residual, detail,
                           NOISE_REL * float(mass))
    _need(2 <= k <= n, "base_i0_2 needs 2 <= k <= n")

    def columns(nf):
        direct = integrand_value(nf, I(k, 2))
        TL = mixed_newton(nf.H, nf.L, 0, k - 1) @ nf.L
        curv = np.einsum("...i,...ij,...j->...", nf.grad_v, TL, nf.grad_v) * nf.phi
        boundary = integrand_value(nf, N(k, 1))
        sig = newton_sequence(nf.L, k)[0]
        rhs = sig[k] * nf.phi_norms[0] + sig[k - 1] * nf.phi_norms[1] + sig[k - 2] * nf.phi_norms[2]
        return np.stack([direct, curv, boundary, rhs, np.abs(direct)], axis=-1)

    direct, curv, boundary, rhs, mass = integrate_fields(chart, grid, potential, testfn, columns, phi_order=2)
    parts = curv - boundary
    residual = abs(direct - parts) / (1.0 + abs(direct))
    detail = {"direct": float(direct), "curvature_term": float(curv), "N_{k,1}": float(boundary),
              "literal_sign_value": float(-curv - boundary)}
    return ProbeRecord(which, dict(params), float(direct), float(rhs), budget, residual, detail,
                       NOISE_REL * float(mass))


def estimate_chain_probe(which, params, chart, grid, potential, testfn, budget=DEFAULT_BUDGET, check=True):
    """Evaluate one statement of the estimate chain; see PROBES for names."""
    return estimate_chain_probes([(which, params)], chart, grid, potential, testfn, budget, check)[0]


def estimate_chain_probes(items, chart, grid, potential, testfn, budget=DEFAULT_BUDGET, check=True):
    """Evaluate several (which, params) probes, sharing one quadrature pass for the ratio probes."""
    items = [(which, dict(params)) for which, params in items]
    for which, params in items:
        if which not in PROBES:
            raise DomainError(f"unknown probe {which!r}; known: {', '.join(PROBES)}")
    if check and items:
        check_preconditions(chart, grid, max(p["k"] for _, p in items), potential, testfn)
    plans = {}
    specs, index = [], {}
    for pos, (which, params) in enumerate(items):
        if which.startswith("base_"):
            continue
        lhs_specs, rhs_specs = _chain_plan(which, params, chart.n)
        plans[pos] = (lhs_specs, rhs_specs)
        for spec in lhs_specs + rhs_specs:
            if spec not in index:
                index[spec] = len(specs)
                specs.append(spec)
    lhs_set = [spec for pos in plans for spec in plans[pos][0]]
    vals = mass = None
    if specs:
        def columns(nf):
            cols = [integrand_value(nf, spec) for spec in specs]
            cols += [np.abs(cols[index[spec]]) for spec in lhs_set]
            return np.stack(cols, axis=-1)

        out = integrate_fields(chart, grid, potential, testfn, columns)
        vals, mass = out[: len(specs)], dict(zip(lhs_set, out[len(specs):]))
    records = []
    for pos, (which, params) in enumerate(items):
        if which.startswith("base_"):
            records.append(_base_case(which, params, chart, grid, potential, testfn, budget))
            continue
        lhs_specs, rhs_specs = plans[pos]
        lhs_vals = [float(vals[index[spec]]) for spec in lhs_specs]
        worst = int(np.argmax(lhs_vals))
        rhs = float(math.fsum(float(vals[index[spec]]) for spec in rhs_specs))
        detail = {spec.label(): float(vals[index[spec]]) for spec in lhs_specs + rhs_specs}
        noise = NOISE_REL * float(mass[lhs_specs[worst]])
        records.append(ProbeRecord(which, params, lhs_vals[worst], rhs, budget, None, detail, noise))
    return records
