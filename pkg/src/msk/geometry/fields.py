"""Scalar fields on charts, ambient functions and their covariant derivatives."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class ScalarField:
    """Chart-coordinate field with derivative callbacks (all batched over leading axes).

    ``gradient`` returns (..., n), ``hessian`` (..., n, n) and ``third``
    (..., n, n, n).
    """

    value: Callable
    gradient: Optional[Callable] = None
    hessian: Optional[Callable] = None
    third: Optional[Callable] = None
    name: str = "field"


def check_gradient(field, points, h=1e-5):
    """Max deviation between field.gradient and central differences of field.value."""
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    fd = np.stack([(field.value(points + h * e) - field.value(points - h * e)) / (2 * h)
                   for e in np.eye(n)], axis=-1)
    return float(np.max(np.abs(fd - field.gradient(points))))


class AmbientFunction:
    """Function on R^(n+1) with derivative callbacks up to order three."""

    name = "ambient"

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def third(self, x):
        raise NotImplementedError


class QuadraticAmbient(AmbientFunction):
    """|x|^2 / 2. Not a bounded-gradient potential; used for Hessian-restriction checks."""

    name = "potential:quadratic"

    def value(self, x):
        return 0.5 * np.sum(x * x, axis=-1)

    def gradient(self, x):
        return np.array(x, dtype=float)

    def hessian(self, x):
        m = x.shape[-1]
        return np.broadcast_to(np.eye(m), x.shape[:-1] + (m, m))

    def third(self, x):
        m = x.shape[-1]
        return np.zeros(x.shape[:-1] + (m, m, m))


def pullback(ambient, fp, order=2):
    """Chart derivatives of v = F o X up to ``order`` (<= 3) at a frame or jet point.

    Returns a list [v, dv, ddv(, dddv)].
    """
    x = fp.x
    G = ambient.gradient(x)
    out = [ambient.value(x), np.einsum("...c,...ci->...i", G, fp.d1)]
    if order >= 2:
        H = ambient.hessian(x)
        HX = np.einsum("...cd,...dj->...cj", H, fp.d1)
        out.append(np.einsum("...ci,...cj->...ij", fp.d1, HX)
                   + np.einsum("...c,...cij->...ij", G, fp.d2))
    if order >= 3:
        d3 = getattr(fp, "d3", None)
        if d3 is None:
            raise ValidationError("third pullback derivatives need a JetPoint")
        T = ambient.third(x)
        t = np.einsum("...cde,...ci,...dj,...ek->...ijk", T, fp.d1, fp.d1, fp.d1)
        # D2F[X_ij, X_k] + D2F[X_ik, X_j] + D2F[X_jk, X_i]
        m = np.einsum("...cij,...ck->...ijk", fp.d2, HX)
        t = t + m + np.einsum("...ikj->...ijk", m) + np.einsum("...jki->...ijk", m)
        t = t + np.einsum("...c,...cijk->...ijk", G, d3)
        out.append(t)
    return out


def coordinate_hessian(fp, df, ddf):
    """Covariant Hessian in coordinates: d_ij f - Gamma^m_ij d_m f."""
    return ddf - np.einsum("...mij,...m->...ij", fp.christoffel, df)


def coordinate_third(jet, df, ddf, dddf):
    """Third covariant derivative (nabla^3 f)_{ijk}, k the last differentiation index."""
    Hc = coordinate_hessian(jet, df, ddf)
    gam, dgam = jet.christoffel, jet.dchristoffel
    dHc = (dddf
           - np.einsum("...kpij,...p->...ijk", dgam, df)
           - np.einsum("...pij,...kp->...ijk", gam, ddf))
    return (dHc
            - np.einsum("...pki,...pj->...ijk", gam, Hc)
            - np.einsum("...pkj,...ip->...ijk", gam, Hc))


def frame_gradient(fp, df):
    return fp.covector_to_frame(df)


def covariant_hessian(chart, f, u, fp=None):
    """Frame components of D^2 f for a ScalarField f; symmetric output."""
    from .frame import frame_at

    if f.hessian is None or f.gradient is None:
        raise ValidationError(f"{f.name}: covariant_hessian needs gradient and hessian callbacks")
    if fp is None:
        fp = frame_at(chart, u)
    Hc = coordinate_hessian(fp, f.gradient(fp.u), f.hessian(fp.u))
    out = fp.to_frame(Hc)
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def frame_tensor3(fp, T):
    return np.einsum("...ia,...jb,...kc,...ijk->...abc", fp.P, fp.P, fp.P, T)
