"""Pointwise residuals of the hypersurface identities.

Every residual is dimension-free: the max-norm of (LHS - RHS) divided by
(1 + the largest operand magnitude).
"""

import numpy as np

from ..errors import DomainError, ValidationError
from ..symcalc.newton import newton_tensor
from .fields import coordinate_hessian, pullback
from .frame import frame_at, jet_at, riemann


def _normalized(diff, *operands):
    scale = max(float(np.max(np.abs(op))) for op in operands)
    return float(np.max(np.abs(diff))) / (1.0 + scale)


def restriction_hessian_terms(chart, potential, u, fp=None):
    """(D^2 v, tangential ambient Hessian, b, L) in the orthonormal frame."""
    if fp is None:
        fp = frame_at(chart, u)
    _, dv, ddv = pullback(potential, fp, order=2)
    lhs = fp.to_frame(coordinate_hessian(fp, dv, ddv))
    tan = fp.tangential(potential.hessian(fp.x))
    b = np.einsum("...c,...c->...", potential.gradient(fp.x), fp.normal)
    return lhs, tan, b, fp.L


def restriction_hessian_residual(chart, potential, u):
    lhs, tan, b, L = restriction_hessian_terms(chart, potential, u)
    rhs = tan + b[..., None, None] * L
    return _normalized(lhs - rhs, lhs, rhs)


def second_form_derivative(jet):
    """Coordinate components C[k, i, j] = (nabla_k II)_ij."""
    gam = jet.christoffel
    return (jet.dII
            - np.einsum("...mki,...mj->...kij", gam, jet.II)
            - np.einsum("...mkj,...im->...kij", gam, jet.II))


def codazzi_residual(chart, u, h=None):
    """Antisymmetric part of L_{ij,k} in (j, k); uses finite-difference d3 when h is given."""
    jet = jet_at(chart, u, h=h)
    C = second_form_derivative(jet)
    Cf = np.einsum("...kc,...ia,...jb,...kij->...cab", jet.P, jet.P, jet.P, C)
    # Cf[c, a, b] = L_{ab,c}; Codazzi says L_{ab,c} = L_{ac,b}
    return _normalized(Cf - np.einsum("...cab->...bac", Cf), Cf)


def gauss_terms(jet):
    R = riemann(jet)
    Rf = np.einsum("...ia,...jb,...kc,...ld,...ijkl->...abcd", jet.P, jet.P, jet.P, jet.P, R)
    L = jet.L
    G = np.einsum("...ik,...jl->...ijkl", L, L) - np.einsum("...il,...jk->...ijkl", L, L)
    return Rf, G


def gauss_residual(chart, u, h=None):
    """R_ijkl - (L_ik L_jl - L_il L_jk) with R from metric derivatives only."""
    Rf, G = gauss_terms(jet_at(chart, u, h=h))
    return _normalized(Rf - G, Rf, G)


def _endomorphism_parts(jet, potential):
    """Shape operator S, mixed Hessian H of v and their coordinate derivatives."""
    ginv = jet.ginv
    S = ginv @ jet.II
    dS = np.einsum("...lip,...pj->...lij", jet.dginv, jet.II) + np.einsum("...ip,...lpj->...lij", ginv, jet.dII)
    if potential is None:
        return S, dS, None, None, None
    _, dv, ddv, dddv = pullback(potential, jet, order=3)
    Hc = coordinate_hessian(jet, dv, ddv)
    # d_l Hc_kj = d_kjl v - d_l Gamma^m_kj d_m v - Gamma^m_kj d_lm v
    dHc = (np.einsum("...kjl->...lkj", dddv)
           - np.einsum("...lmkj,...m->...lkj", jet.dchristoffel, dv)
           - np.einsum("...mkj,...lm->...lkj", jet.christoffel, ddv))
    H = ginv @ Hc
    dH = np.einsum("...lip,...pj->...lij", jet.dginv, Hc) + np.einsum("...ip,...lpj->...lij", ginv, dHc)
    return S, dS, H, dH, dv


def _mixed_T(H, S, m, k):
    if k == 0:
        n = S.shape[-1]
        return np.broadcast_to(np.eye(n), S.shape).copy()
    return newton_tensor([H] * m + [S] * (k - m), validate=False)


def _dT(H, S, dH, dS, m, k):
    """d_l T_k(H^m, S^(k-m)) by multilinearity, stacked over l."""
    n = S.shape[-1]
    terms = []
    for l in range(n):
        acc = np.zeros(S.shape)
        if m > 0:
            acc = acc + m * newton_tensor([dH[..., l, :, :]] + [H] * (m - 1) + [S] * (k - m), validate=False)
        if k - m > 0:
            acc = acc + (k - m) * newton_tensor([dS[..., l, :, :]] + [H] * m + [S] * (k - m - 1), validate=False)
        terms.append(acc)
    return np.stack(terms, axis=-3)


def div_newton_terms(chart, u, k, m=0, potential=None, h=None):
    """Frame covectors (div T_k(D^2v^m, L^(k-m)), T_k(D^2v^(m-1), L^(k-m+1)) L grad v).

    The second entry is None when m = 0. The divergence is computed by
    differentiating coordinate components along the chart and applying
    Christoffel corrections.
    """
    n = chart.n
    if not 1 <= k <= n - 1:
        raise DomainError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    if m < 0 or m > k - 1:
        raise DomainError(f"slot count m={m} must satisfy 0 <= m <= k-1")
    if m >= 1 and potential is None:
        raise ValidationError("m >= 1 needs a potential to build D^2 v")
    jet = jet_at(chart, u, h=h)
    S, dS, H, dH, dv = _endomorphism_parts(jet, potential if m >= 1 else None)
    T = _mixed_T(H, S, m, k)
    dT = _dT(H, S, dH, dS, m, k)
    gam = jet.christoffel
    div = (np.einsum("...iij->...j", dT)
           + np.einsum("...iip,...pj->...j", gam, T)
           - np.einsum("...pij,...ip->...j", gam, T))
    lhs = jet.covector_to_frame(div)
    if m == 0:
        return lhs, None
    Pinv = np.linalg.inv(jet.P)
    Tr = Pinv @ _mixed_T(H, S, m - 1, k) @ jet.P
    grad = jet.covector_to_frame(dv)
    Lv = np.einsum("...qi,...q->...i", jet.L, grad)
    rhs_unit = np.einsum("...ij,...i->...j", Tr, Lv)
    return lhs, rhs_unit


def div_newton_residual(chart, u, k, m=0, potential=None, h=None, coefficient=None):
    """Residual vector of the Newton-tensor divergence identity.

    m = 0: div T_k(L) = 0. m >= 1:
    div T_k(D^2v^m, L^(k-m)) = coefficient * T_k(D^2v^(m-1), L^(k-m+1)) L grad v
    with the default coefficient -m (see docs/derivations.md).
    """
    lhs, unit = div_newton_terms(chart, u, k, m, potential, h)
    if unit is None:
        return np.abs(lhs)
    c = -float(m) if coefficient is None else float(coefficient)
    rhs = c * unit
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return np.abs(lhs - rhs) / (1.0 + scale)
