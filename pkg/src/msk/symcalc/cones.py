"""Garding cones Gamma_k^+ and test-point sampling inside them."""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .sigma import as_spectrum, sigma_all

SAMPLE_MARGIN = 0.1
_BISECT_STEPS = 80


@dataclass(frozen=True)
class ConeQuery:
    k: int
    member: bool
    margins: tuple

    def __post_init__(self):
        assert self.member == all(m > 0 for m in self.margins)


def cone_member(values, k):
    """Membership of a spectrum in Gamma_k^+, with sigma_1..sigma_k as margins."""
    lam = as_spectrum(values)
    n = lam.shape[-1]
    if lam.ndim != 1:
        raise DomainError("cone_member takes a single spectrum; use cone_margins for batches")
    if not 1 <= k <= n:
        raise DomainError(f"cone order k={k} outside [1, {n}]")
    margins = tuple(float(x) for x in sigma_all(lam, k)[1:])
    return ConeQuery(k=k, member=all(m > 0 for m in margins), margins=margins)


def cone_margins(values, k):
    """sigma_1..sigma_k for a batch of spectra, shape (..., k)."""
    return sigma_all(np.asarray(values, dtype=float), k)[..., 1:]


def _shift_to_cone(z, k, margin):
    n = z.shape[-1]
    ones = np.ones(n)

    def feasible(t):
        return np.all(cone_margins(z + t[:, None] * ones, k) >= margin, axis=-1)

    lo = -np.max(z, axis=-1) - 1.0  # every entry negative: sigma_1 < 0
    hi = np.maximum(-np.min(z, axis=-1), 0.0) + 1.0
    while True:
        bad = ~feasible(hi)
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi + 1.0, hi)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        ok = feasible(mid)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return z + hi[:, None] * ones


def sample_cone_batch(n, k, size, rng, margin=SAMPLE_MARGIN):
    """``size`` spectra in Gamma_k^+ drawn as shifted standard normals.

    The shift t(1, ..., 1) is the smallest one (found by bisection) for which
    every margin sigma_j, j <= k, is at least ``margin``.
    """
    if not 1 <= k <= n:
        raise DomainError(f"cone order k={k} outside [1, {n}]")
    z = rng.standard_normal((size, n))
    return _shift_to_cone(z, k, margin)


def sample_cone(n, k, seed):
    """One deterministic spectrum in Gamma_k^+ for the given seed."""
    rng = np.random.default_rng(seed)
    return sample_cone_batch(n, k, 1, rng)[0]


def random_rotations(size, n, rng):
    q, r = np.linalg.qr(rng.standard_normal((size, n, n)))
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    d[d == 0] = 1.0
    return q * d[:, None, :]


def sample_cone_matrices(n, k, size, rng):
    """Symmetric matrices Q diag(lambda) Q^T with lambda sampled in Gamma_k^+."""
    lam = sample_cone_batch(n, k, size, rng)
    Q = random_rotations(size, n, rng)
    return np.einsum("bij,bj,bkj->bik", Q, lam, Q)
