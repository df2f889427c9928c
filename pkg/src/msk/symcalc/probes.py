"""Randomized checks of the Garding cone properties and of concavity in Gamma_k^+."""

import numpy as np

from ..errors import DomainError
from .cones import cone_margins, sample_cone_batch, sample_cone_matrices
from .jacobi import jacobi_eigenvalues
from .newton import newton_tensor, polarized_sigma
from .sigma import sigma_all, sigma_partials

PROPERTIES = ("i", "ii", "iii", "iv")
CONCAVE_EXPRS = ("sigma_k_root", "ratio_root")
PD_TOL = 1e-12
CONCAVITY_TOL = 1e-10


def _check_trials(trials):
    if trials < 1:
        raise DomainError("trials must be positive")


def garding_probe(prop, n, k, trials, seed):
    """Number of sampled points violating Garding property (i)-(iv); 0 expected.

    (i)   lambda in Gamma_k: every d sigma_k / d lambda_i > 0
    (ii)  A_1..A_k in Gamma_{k+1}: T_k(A_1..A_k) positive definite
    (iii) A_1..A_k in Gamma_k: Sigma_k(A_1..A_k) > 0
    (iv)  A - B in Gamma_k, A_2..A_k in Gamma_k: Sigma_k(B, A_2..) < Sigma_k(A, A_2..)
    """
    if prop not in PROPERTIES:
        raise DomainError(f"unknown Garding property {prop!r}")
    _check_trials(trials)
    if not 1 <= k <= n:
        raise DomainError(f"cone order k={k} outside [1, {n}]")
    rng = np.random.default_rng(seed)

    if prop == "i":
        lam = sample_cone_batch(n, k, trials, rng)
        d = sigma_partials(lam, k)
        return int(np.sum(~np.all(d > 0, axis=1)))

    if prop == "ii":
        if k + 1 > n:
            raise DomainError("property (ii) samples Gamma_{k+1}^+ and needs k + 1 <= n")
        args = [sample_cone_matrices(n, k + 1, trials, rng) for _ in range(k)]
        T = newton_tensor(args, validate=False)
        T = 0.5 * (T + np.swapaxes(T, -1, -2))
        scale = 1.0 + np.max(np.abs(T), axis=(1, 2))
        wmin = jacobi_eigenvalues(T)[:, 0]
        return int(np.sum(wmin <= -PD_TOL * scale))

    if prop == "iii":
        args = [sample_cone_matrices(n, k, trials, rng) for _ in range(k)]
        return int(np.sum(~(polarized_sigma(args, validate=False) > 0)))

    rest = [sample_cone_matrices(n, k, trials, rng) for _ in range(k - 1)]
    G = rng.standard_normal((trials, n, n))
    B = 0.5 * (G + np.swapaxes(G, 1, 2))
    A = B + sample_cone_matrices(n, k, trials, rng)
    low = polarized_sigma([B] + rest, validate=False)
    high = polarized_sigma([A] + rest, validate=False)
    return int(np.sum(~(low < high)))


def concavity_value(lam, expr, k, l=0):
    e = sigma_all(lam, k)
    if expr == "sigma_k_root":
        return e[..., k] ** (1.0 / k)
    return (e[..., k] / e[..., l]) ** (1.0 / (k - l))


def concavity_probe(expr, n, k, l, trials, seed):
    """Count violations of f(t x + (1-t) y) >= t f(x) + (1-t) f(y) for x, y in Gamma_k^+.

    ``sigma_k_root`` is sigma_k^(1/k); ``ratio_root`` is
    (sigma_k / sigma_l)^(1/(k-l)) with 0 <= l < k.
    """
    if expr not in CONCAVE_EXPRS:
        raise DomainError(f"unknown expression {expr!r}")
    _check_trials(trials)
    if not 1 <= k <= n:
        raise DomainError(f"cone order k={k} outside [1, {n}]")
    if expr == "ratio_root" and not 0 <= l < k:
        raise DomainError("ratio_root needs 0 <= l < k")
    rng = np.random.default_rng(seed)
    x = sample_cone_batch(n, k, trials, rng)
    y = sample_cone_batch(n, k, trials, rng)
    t = rng.uniform(0.0, 1.0, trials)
    z = t[:, None] * x + (1.0 - t[:, None]) * y
    fx, fy = concavity_value(x, expr, k, l), concavity_value(y, expr, k, l)
    fz = concavity_value(z, expr, k, l)
    scale = 1.0 + np.maximum(np.abs(fx), np.abs(fy))
    bad = fz < t * fx + (1.0 - t) * fy - CONCAVITY_TOL * scale
    bad |= ~np.all(cone_margins(z, k) > 0, axis=1)
    return int(np.sum(bad))
