"""Elementary symmetric functions of spectra and of symmetric matrices."""

import math
from itertools import combinations

import numpy as np

from ..errors import DomainError, ValidationError
from .jacobi import jacobi_eigenvalues

SYM_TOL = 1e-12


def as_spectrum(values):
    lam = np.asarray(values, dtype=float)
    if lam.ndim == 0 or lam.shape[-1] < 1:
        raise ValidationError("spectrum must contain at least one value")
    if not np.all(np.isfinite(lam)):
        raise ValidationError("spectrum entries must be finite")
    return lam


def as_symmatrix(A):
    """Validate a (batch of) symmetric matrices and return it as a float array."""
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2] or A.shape[-1] < 1:
        raise ValidationError(f"expected square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix entries must be finite")
    scale = 1.0 + np.max(np.abs(A))
    asym = np.max(np.abs(A - np.swapaxes(A, -1, -2)))
    if asym > SYM_TOL * scale:
        raise ValidationError(f"matrix not symmetric: max |A - A^T| = {asym:.3e}")
    return A


def sigma_all(values, kmax):
    """Return sigma_0..sigma_kmax stacked on a new last axis.

    Uses the prefix recurrence e_j <- e_j + lambda_m e_{j-1}, which costs
    O(n k) and never enumerates subsets.
    """
    lam = np.asarray(values, dtype=float)
    e = np.zeros(lam.shape[:-1] + (kmax + 1,))
    e[..., 0] = 1.0
    for m in range(lam.shape[-1]):
        x = lam[..., m : m + 1]
        e[..., 1:] = e[..., 1:] + x * e[..., :-1]
    return e


def sigma(values, k):
    """k-th elementary symmetric function of a spectrum (batched over leading axes)."""
    lam = as_spectrum(values)
    n = lam.shape[-1]
    if not 0 <= k <= n:
        raise DomainError(f"sigma order k={k} outside [0, {n}]")
    out = sigma_all(lam, k)[..., k]
    return float(out) if out.ndim == 0 else out


def newton_sequence(A, kmax):
    """Faddeev-LeVerrier sweep: sigma_0..sigma_kmax and T_0..T_kmax of ``A``.

    Works for any square (not necessarily symmetric) matrix batch; sigma_j is
    the j-th characteristic-polynomial coefficient.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    eye = np.broadcast_to(np.eye(n), A.shape)
    T = eye.copy()
    sig = [np.ones(A.shape[:-2])]
    Ts = [T]
    for j in range(1, kmax + 1):
        M = T @ A
        s = np.trace(M, axis1=-2, axis2=-1) / j
        T = s[..., None, None] * eye - M
        sig.append(s)
        Ts.append(T)
    return sig, Ts


def sigma_matrix(A, k, method="eig"):
    """sigma_k of the eigenvalues of symmetric ``A``.

    ``method="eig"`` uses the Jacobi eigensolver, ``"charpoly"`` the
    trace recursion; both accept batches.
    """
    A = as_symmatrix(A)
    n = A.shape[-1]
    if not 0 <= k <= n:
        raise DomainError(f"sigma order k={k} outside [0, {n}]")
    if method == "eig":
        out = sigma_all(jacobi_eigenvalues(A), k)[..., k]
    elif method == "charpoly":
        out = newton_sequence(A, k)[0][k]
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def principal_minor_sum(A, k):
    """Brute-force sigma_k(A) as the sum of all k x k principal minors."""
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    if k == 0:
        return 1.0
    total = 0.0
    for idx in combinations(range(n), k):
        total += np.linalg.det(A[np.ix_(idx, idx)])
    return float(total)


def sigma_partials(values, k):
    """d sigma_k / d lambda_i = sigma_{k-1} of the spectrum with entry i removed."""
    lam = np.asarray(values, dtype=float)
    n = lam.shape[-1]
    out = np.empty(lam.shape)
    for i in range(n):
        rest = np.delete(lam, i, axis=-1)
        if k - 1 > n - 1:
            out[..., i] = 0.0
        elif rest.shape[-1] == 0:
            out[..., i] = 1.0 if k == 1 else 0.0
        else:
            out[..., i] = sigma_all(rest, k - 1)[..., k - 1]
    return out


def binomial(n, k):
    return math.comb(n, k) if 0 <= k <= n else 0
