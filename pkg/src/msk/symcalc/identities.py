"""Residuals of the trace identities, the T_k recursion and the two-matrix lemma."""

import math

import numpy as np

from ..errors import DomainError
from .jacobi import jacobi_eigh
from .newton import newton_identity, newton_tensor, newton_tensor_oracle, polarized_sigma, polarized_sigma_oracle
from .sigma import as_symmatrix, sigma_matrix, sigma_partials

KINDS = ("trace1", "trace2", "recursionT", "lemma22")


def _residual(lhs, rhs):
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = 1.0 + max(np.max(np.abs(lhs)), np.max(np.abs(rhs)))
    return float(np.max(np.abs(lhs - rhs)) / scale)


def spectral_newton(A, k):
    """T_k(A) = Q diag(d sigma_{k+1}/d lambda_i) Q^T from a Jacobi eigendecomposition."""
    w, Q = jacobi_eigh(A, vectors=True)
    d = sigma_partials(w, k + 1)
    return (Q * d) @ Q.T


def _T(args, n, method):
    if len(args) == 0:
        return np.eye(n)
    if method == "oracle":
        return newton_tensor_oracle(args)
    return newton_tensor(args)


def _Sigma(args, method):
    return polarized_sigma_oracle(args) if method == "oracle" else polarized_sigma(args)


def identity_residual(kind, A=None, k=None, B=None, C=None, l=None, method="fast"):
    """Normalized max-norm |LHS - RHS| / (1 + max side magnitude) of a named identity.

    trace1:      sigma_k(A) = Tr T_k(A) / (n - k)
    trace2:      sigma_{k+1}(A) = Tr(T_k(A) A) / (k + 1)
    recursionT:  T_k(A) = sigma_k(A) I - T_{k-1}(A) A
    lemma22:     T_{k-1}(B^l, C^(k-1-l)) C expressed through Sigma_k, T_k and T_{k-1} B

    ``method="oracle"`` evaluates every Newton tensor by permutation
    expansion. With the fast path, recursionT compares the spectral form
    of T_k against the recursion so the check is not circular.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown identity {kind!r}")
    if kind == "lemma22":
        B = as_symmatrix(B)
        C = as_symmatrix(C)
        n = B.shape[-1]
        if not (k is not None and l is not None and 1 <= l <= k - 1 and k <= n):
            raise DomainError("lemma22 needs 1 <= l <= k-1 and k <= n")
        lhs = _T([B] * l + [C] * (k - 1 - l), n, method) @ C
        c1 = math.comb(k, l) / (k * math.comb(k - 1, l))
        c2 = math.comb(k, l) / math.comb(k - 1, l)
        c3 = math.comb(k - 1, l - 1) / math.comb(k - 1, l)
        rhs = (
            c1 * _Sigma([B] * l + [C] * (k - l), method) * np.eye(n)
            - c2 * _T([B] * l + [C] * (k - l), n, method)
            - c3 * _T([B] * (l - 1) + [C] * (k - l), n, method) @ B
        )
        return _residual(lhs, rhs)

    A = as_symmatrix(A)
    n = A.shape[-1]
    if k is None or not 0 <= k <= n:
        raise DomainError(f"order k={k} outside [0, {n}]")
    if kind == "trace1":
        if k >= n:
            raise DomainError("trace1 is undefined for k = n (division by n - k)")
        lhs = sigma_matrix(A, k)
        rhs = np.trace(_T([A] * k, n, method)) / (n - k)
    elif kind == "trace2":
        if k + 1 > n:
            raise DomainError("trace2 needs k + 1 <= n")
        lhs = sigma_matrix(A, k + 1)
        rhs = np.trace(_T([A] * k, n, method) @ A) / (k + 1)
    else:
        if k < 1:
            raise DomainError("recursionT needs k >= 1")
        if method == "oracle":
            lhs = newton_tensor_oracle([A] * k)
            prev = _T([A] * (k - 1), n, method)
        else:
            lhs = spectral_newton(A, k)
            prev = newton_tensor([A] * (k - 1)) if k > 1 else newton_identity(n)
        rhs = sigma_matrix(A, k) * np.eye(n) - prev @ A
    return _residual(lhs, rhs)
