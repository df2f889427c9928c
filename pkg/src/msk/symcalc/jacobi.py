"""Cyclic Jacobi eigensolver for small dense symmetric matrices, batched over leading axes."""

import numpy as np

OFF_TOL = 1e-13
MAX_SWEEPS = 100


def jacobi_eigh(A, tol=OFF_TOL, max_sweeps=MAX_SWEEPS, vectors=False):
    """Eigenvalues (ascending) of symmetric ``A`` with shape (..., n, n).

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol`` times the Frobenius norm of the input. With ``vectors=True``
    also returns the orthogonal matrix whose columns are eigenvectors.
    """
    A = np.array(A, dtype=float, copy=True)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected (..., n, n) array, got shape {A.shape}")
    batch = A.shape[:-2]
    n = A.shape[-1]
    A = A.reshape((-1, n, n))
    V = np.broadcast_to(np.eye(n), A.shape).copy() if vectors else None
    fro = np.sqrt(np.einsum("bij,bij->b", A, A))
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(A[:, offmask] ** 2, axis=1))
        if np.all(off <= tol * fro):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                nz = apq != 0.0
                if not np.any(nz):
                    continue
                safe = np.where(nz, apq, 1.0)
                # tiny apq can overflow theta to inf; the rotation then degenerates to t = 0
                with np.errstate(over="ignore"):
                    theta = (A[:, q, q] - A[:, p, p]) / (2.0 * safe)
                    sgn = np.where(theta >= 0.0, 1.0, -1.0)
                    t = np.where(nz, sgn / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cc = c[:, None]
                ss = s[:, None]
                ap = A[:, :, p].copy()
                aq = A[:, :, q].copy()
                A[:, :, p] = cc * ap - ss * aq
                A[:, :, q] = ss * ap + cc * aq
                ap = A[:, p, :].copy()
                aq = A[:, q, :].copy()
                A[:, p, :] = cc * ap - ss * aq
                A[:, q, :] = ss * ap + cc * aq
                A[nz, p, q] = 0.0
                A[nz, q, p] = 0.0
                if vectors:
                    vp = V[:, :, p].copy()
                    vq = V[:, :, q].copy()
                    V[:, :, p] = cc * vp - ss * vq
                    V[:, :, q] = ss * vp + cc * vq

    w = np.diagonal(A, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1)
    w = np.take_along_axis(w, order, axis=1).reshape(batch + (n,))
    if not vectors:
        return w
    V = np.take_along_axis(V, order[:, None, :], axis=2).reshape(batch + (n, n))
    return w, V


def jacobi_eigenvalues(A):
    return jacobi_eigh(A)
