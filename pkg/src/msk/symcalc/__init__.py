"""Symmetric-function calculus: sigma_k, Newton tensors, Garding cones."""

from .cones import ConeQuery, cone_member, sample_cone, sample_cone_batch, sample_cone_matrices
from .identities import identity_residual, spectral_newton
from .jacobi import jacobi_eigenvalues, jacobi_eigh
from .newton import (
    mixed_newton,
    mixed_sigma,
    newton_tensor,
    newton_tensor_oracle,
    polarized_sigma,
    polarized_sigma_oracle,
)
from .probes import concavity_probe, garding_probe
from .sigma import as_spectrum, as_symmatrix, newton_sequence, principal_minor_sum, sigma, sigma_matrix

__all__ = [
    "ConeQuery",
    "as_spectrum",
    "as_symmatrix",
    "concavity_probe",
    "cone_member",
    "garding_probe",
    "identity_residual",
    "jacobi_eigenvalues",
    "jacobi_eigh",
    "mixed_newton",
    "mixed_sigma",
    "newton_sequence",
    "newton_tensor",
    "newton_tensor_oracle",
    "polarized_sigma",
    "polarized_sigma_oracle",
    "principal_minor_sum",
    "sample_cone",
    "sample_cone_batch",
    "sample_cone_matrices",
    "sigma",
    "sigma_matrix",
    "spectral_newton",
]
