"""Orthonormal frames, fundamental forms and connection data at chart points.

All routines are vectorized over leading batch axes of ``u``. Index
conventions (after the batch axes):

* ``g[i, j]``, ``II[i, j]`` coordinate components of the two forms;
* ``dg[k, i, j] = d_k g_ij``; ``ddg[k, l, i, j] = d_l d_k g_ij``;
* ``christoffel[m, i, j] = Gamma^m_ij``; ``dchristoffel[l, m, i, j] = d_l Gamma^m_ij``;
* ``P`` maps frame to coordinates: ``frame = d1 @ P`` and ``P @ P.T = g^{-1}``.
"""

from dataclasses import dataclass, fields

import numpy as np

from ..errors import ImmersionError

IMMERSION_TOL = 1e-30


@dataclass
class FramePoint:
    u: np.ndarray
    x: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    P: np.ndarray
    frame: np.ndarray
    normal: np.ndarray
    II: np.ndarray
    L: np.ndarray
    area: np.ndarray
    dg: np.ndarray
    christoffel: np.ndarray

    @property
    def n(self):
        return self.u.shape[-1]

    @property
    def batch_shape(self):
        return self.u.shape[:-1]

    def tangential(self, M):
        """Frame components of an ambient bilinear form M (..., n+1, n+1)."""
        return np.einsum("...ca,...cd,...db->...ab", self.frame, M, self.frame)

    def to_frame(self, T):
        """Frame components of a coordinate (0, 2)-tensor."""
        return np.einsum("...ia,...ij,...jb->...ab", self.P, T, self.P)

    def covector_to_frame(self, w):
        return np.einsum("...i,...ia->...a", w, self.P)


@dataclass
class JetPoint(FramePoint):
    """FramePoint extended with data that needs third derivatives of the embedding."""

    d3: np.ndarray = None
    ddg: np.ndarray = None
    dginv: np.ndarray = None
    dchristoffel: np.ndarray = None
    dII: np.ndarray = None


def _generalized_cross(d1):
    """Vector orthogonal to the n columns of d1 via signed maximal minors."""
    m = d1.shape[-2]
    comps = []
    for c in range(m):
        rows = [r for r in range(m) if r != c]
        comps.append((-1) ** c * np.linalg.det(d1[..., rows, :]))
    return np.stack(comps, axis=-1)


def _orient(chart, x, normal):
    if chart.interior_point is not None:
        ref = chart.interior_point - x
    elif chart.normal_hint is not None:
        ref = np.broadcast_to(chart.normal_hint, x.shape)
    else:
        return normal
    s = np.sign(np.einsum("...c,...c->...", normal, ref))
    s = np.where(s == 0, 1.0, s)
    return normal * s[..., None]


def metric_derivative(d1, d2):
    """dg[k, i, j] = <X_ki, X_j> + <X_i, X_kj>."""
    A = np.einsum("...cki,...cj->...kij", d2, d1)
    return A + np.swapaxes(A, -1, -2)


def christoffel_first(dg):
    """Gamma_{ij,p} = (d_i g_jp + d_j g_ip - d_p g_ij) / 2, stored as [..., p, i, j]."""
    t1 = np.einsum("...ijp->...pij", dg)
    t2 = np.einsum("...jip->...pij", dg)
    return 0.5 * (t1 + t2 - dg)


def frame_at(chart, u, order=None):
    """Frame, forms and Christoffel symbols at chart coordinates u (batched).

    ``order`` permutes the coordinate tangents before Gram-Schmidt.
    """
    u = np.asarray(u, dtype=float)
    n = chart.n
    x = chart.embed(u)
    d1 = chart.d1(u)
    d2 = chart.d2(u)
    g = np.einsum("...ci,...cj->...ij", d1, d1)
    scale = np.einsum("...ii->...", g) / n
    detg = np.linalg.det(g)
    bad = ~(detg > IMMERSION_TOL * scale**n)
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        raise ImmersionError(f"{chart.name}: d1 is rank deficient at u={np.atleast_2d(u.reshape(-1, n))[idx[0]]}")
    perm = np.arange(n) if order is None else np.asarray(order)
    gp = g[..., perm[:, None], perm[None, :]]
    R = np.swapaxes(np.linalg.cholesky(gp), -1, -2)
    Rinv = np.linalg.inv(R)
    P = np.empty_like(Rinv)
    P[..., perm, :] = Rinv
    frame = np.einsum("...ci,...ia->...ca", d1, P)
    normal = _generalized_cross(d1)
    normal = normal / np.linalg.norm(normal, axis=-1, keepdims=True)
    normal = _orient(chart, x, normal)
    II = np.einsum("...cij,...c->...ij", d2, normal)
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    L = np.einsum("...ia,...ij,...jb->...ab", P, II, P)
    L = 0.5 * (L + np.swapaxes(L, -1, -2))
    ginv = np.einsum("...ia,...ja->...ij", P, P)
    dg = metric_derivative(d1, d2)
    chris = np.einsum("...mp,...pij->...mij", ginv, christoffel_first(dg))
    return FramePoint(u=u, x=x, d1=d1, d2=d2, g=g, ginv=ginv, P=P, frame=frame, normal=normal,
                      II=II, L=L, area=np.sqrt(detg), dg=dg, christoffel=chris)


def jet_at(chart, u, order=None, h=None):
    """frame_at plus second metric derivatives, Christoffel derivatives and d_l II.

    Uses analytic third derivatives when the chart has them and ``h`` is None,
    otherwise central differences of d2 with step h.
    """
    fp = frame_at(chart, u, order)
    d1, d2 = fp.d1, fp.d2
    d3 = chart.third(fp.u, h)
    # ddg[k, l, i, j] = d_l d_k g_ij
    a = np.einsum("...ckil,...cj->...klij", d3, d1)
    b = np.einsum("...cki,...cjl->...klij", d2, d2)
    ddg = a + b + np.swapaxes(a, -1, -2) + np.swapaxes(b, -1, -2)
    dginv = -np.einsum("...ip,...lpq,...qj->...lij", fp.ginv, fp.dg, fp.ginv)
    # d_l Gamma_{ij,p}, stored [..., l, p, i, j]
    # d_l of (d_i g_jp + d_j g_ip - d_p g_ij) / 2 with d_l d_k g = ddg[k, l]
    t1 = np.einsum("...iljp->...lpij", ddg)
    t2 = np.einsum("...jlip->...lpij", ddg)
    t3 = np.einsum("...plij->...lpij", ddg)
    dG1 = 0.5 * (t1 + t2 - t3)
    G1 = christoffel_first(fp.dg)
    dchris = (np.einsum("...lmp,...pij->...lmij", dginv, G1)
              + np.einsum("...mp,...lpij->...lmij", fp.ginv, dG1))
    dII = (np.einsum("...cijl,...c->...lij", d3, fp.normal)
           - np.einsum("...pij,...lp->...lij", fp.christoffel, fp.II))
    base = {f.name: getattr(fp, f.name) for f in fields(FramePoint)}
    return JetPoint(**base, d3=d3, ddg=ddg, dginv=dginv, dchristoffel=dchris, dII=dII)


def riemann(jet):
    """Covariant Riemann tensor R_iklm in coordinates from the metric jet.

    Convention: R_1212 = K det g, i.e. positive on round spheres.
    """
    ddg = jet.ddg
    gam = jet.christoffel
    ein = np.einsum
    R = 0.5 * (ein("...klim->...iklm", ddg) + ein("...imkl->...iklm", ddg)
               - ein("...kmil->...iklm", ddg) - ein("...ilkm->...iklm", ddg))
    R = R + ein("...np,...nkl,...pim->...iklm", jet.g, gam, gam)
    R = R - ein("...np,...nkm,...pil->...iklm", jet.g, gam, gam)
    return R
