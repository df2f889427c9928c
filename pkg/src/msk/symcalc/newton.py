"""Newton transformation tensors T_k and the polarized forms Sigma_k.

The fast path handles mixed arguments by inclusion-exclusion over subset
sums. Repeated arguments (the same object passed several times) are
grouped, so ``T_k(B, ..., B, C, ..., C)`` costs (l+1)(k-l+1) diagonal
evaluations instead of 2^k.
"""

import math
from functools import lru_cache
from itertools import permutations, product

import numpy as np

from ..errors import DomainError, ValidationError
from .sigma import as_symmatrix, newton_sequence


def _check_tuple(args, validate):
    if len(args) == 0:
        raise DomainError("argument tuple must be non-empty")
    mats = [as_symmatrix(a) if validate else np.asarray(a, dtype=float) for a in args]
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape[-1] != shape[-1]:
            raise ValidationError("all arguments must have equal dimension")
    return mats


def _groups(args):
    groups = []
    for a in args:
        for g in groups:
            if g[0] is a:
                g[1] += 1
                break
        else:
            groups.append([a, 1])
    return groups


def diagonal_newton(A, k):
    """T_k(A, ..., A) by the recursion T_k = sigma_k I - T_{k-1} A."""
    return newton_sequence(A, k)[1][k]


def polarize(args, diagonal):
    """Symmetric k-linear form with diagonal ``diagonal(M)`` evaluated at ``args``.

    ``diagonal`` must be homogeneous of degree ``len(args)``; the result is
    (1/k!) sum_S (-1)^(k-|S|) diagonal(sum_{i in S} A_i).
    """
    k = len(args)
    groups = _groups(args)
    mats = [np.asarray(g[0], dtype=float) for g in groups]
    mult = [g[1] for g in groups]
    shape = np.broadcast_shapes(*(m.shape for m in mats))
    total = None
    for counts in product(*(range(m + 1) for m in mult)):
        size = sum(counts)
        if size == 0:
            continue
        coeff = (-1) ** (k - size)
        for c, m in zip(counts, mult):
            coeff *= math.comb(m, c)
        M = np.zeros(shape)
        for c, A in zip(counts, mats):
            if c:
                M = M + c * A
        term = coeff * diagonal(M)
        total = term if total is None else total + term
    return total / math.factorial(k)


def newton_tensor(args, validate=True):
    """Mixed Newton tensor T_k(A_1, ..., A_k); batched over leading axes.

    An empty tuple gives the identity (T_0). With ``validate=False`` the
    arguments may be arbitrary square matrices (endomorphisms).
    """
    args = list(args)
    if len(args) == 0:
        raise DomainError("use an explicit dimension for T_0")
    mats = _check_tuple(args, validate)
    ident = {}
    keyed = []
    for a, m in zip(args, mats):
        keyed.append(ident.setdefault(id(a), m))
    k = len(keyed)
    if len(_groups(keyed)) == 1:
        return diagonal_newton(keyed[0], k)
    return polarize(keyed, lambda M: diagonal_newton(M, k))


def newton_identity(n, batch=()):
    return np.broadcast_to(np.eye(n), tuple(batch) + (n, n)).copy()


def polarized_sigma(args, validate=True):
    """Sigma_k(A_1, ..., A_k) = <A_1, T_{k-1}(A_2, ..., A_k)> (full contraction)."""
    args = list(args)
    mats = _check_tuple(args, validate)
    first = mats[0]
    if len(args) == 1:
        return _as_out(np.trace(first, axis1=-2, axis2=-1))
    ident = {}
    rest = [ident.setdefault(id(a), m) for a, m in zip(args[1:], mats[1:])]
    T = newton_tensor(rest, validate=False)
    return _as_out(np.einsum("...ij,...ij->...", first, T))


def mixed_newton(B, C, l, k):
    """T_k(B^l, C^(k-l)): l copies of B and k-l copies of C."""
    if k == 0:
        return newton_identity(np.shape(C)[-1], np.shape(C)[:-2])
    return newton_tensor([B] * l + [C] * (k - l), validate=False)


def mixed_sigma(B, C, l, k):
    """Sigma_k(B^l, C^(k-l))."""
    first = B if l > 0 else C
    rest_l = l - 1 if l > 0 else 0
    T = mixed_newton(B, C, rest_l, k - 1)
    return np.einsum("...ij,...ij->...", first, T)


def _as_out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _parity(perm):
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _oracle_plan(k):
    letters = "abcdefghpqrstuvw"
    plan = []
    for perm in permutations(range(k + 1)):
        inv = [0] * (k + 1)
        for m, pm in enumerate(perm):
            inv[pm] = m
        up = ["I"] + [letters[m] for m in range(k)]
        m0 = inv[0]
        use_eye = m0 == 0
        if not use_eye:
            up[m0] = "J"
        subs = [up[s] + up[inv[s]] for s in range(1, k + 1)]
        if use_eye:
            subs.append("IJ")
        plan.append((_parity(perm), ",".join(subs) + "->IJ", use_eye))
    return tuple(plan)


def newton_tensor_oracle(args):
    """T_k via literal expansion of the generalized Kronecker delta.

    [T_k]_ij = (1/k!) sum over permutations pi of (k+1) slots of
    sgn(pi) * prod_m delta(a_m, b_pi(m)) * prod_s (A_s)_{a_s b_s}, with
    a_0 = i, b_0 = j. Each permutation term is one tensor contraction.
    Meant as a test reference for n <= 6, k <= 5.
    """
    mats = [as_symmatrix(a) for a in args]
    if not mats:
        raise DomainError("argument tuple must be non-empty")
    n = mats[0].shape[-1]
    for m in mats:
        if m.shape != (n, n):
            raise ValidationError("oracle takes equal-dimension single matrices")
    k = len(mats)
    eye = np.eye(n)
    out = np.zeros((n, n))
    for sign, subs, use_eye in _oracle_plan(k):
        ops = mats + [eye] if use_eye else mats
        out += sign * np.einsum(subs, *ops, optimize=True)
    return out / math.factorial(k)


def polarized_sigma_oracle(args):
    """Sigma_k as the direct contraction of A_1 with the oracle T_{k-1}(A_2..A_k)."""
    mats = [as_symmatrix(a) for a in args]
    if len(mats) == 1:
        return float(np.trace(mats[0]))
    return float(np.sum(mats[0] * newton_tensor_oracle(mats[1:])))
