"""Numerical verification of sigma_k curvature identities and Sobolev-type curvature inequalities."""

__version__ = "0.1.0"
