"""Weighted curvature functionals, their decompositions, and inequality reports."""

from .bump import BUMPS, BumpFunction, ConstantOne, TestFunction, make_testfn
from .decomposition import Decomposition, decompose, decomposition_residual, eq52_coefficients, eq59_constants
from .evaluate import NodeFields, check_preconditions, eval_functional, eval_functionals, integrate_fields, node_fields
from .potentials import (
    POTENTIALS,
    Certificate,
    ConvexPotential,
    LinearPotential,
    LogSumExpPotential,
    SmoothDistancePotential,
    ZeroPotential,
    default_plane,
    make_potential,
)
from .probes import PROBES, ProbeRecord, estimate_chain_probe, estimate_chain_probes
from .reports import InequalityReport, ms_cone, prop_a_budget, proposition_a_report, theorem_ms_report
from .spec import FunctionalSpec, I, J, K, N, Weight

__all__ = [
    "BUMPS",
    "BumpFunction",
    "Certificate",
    "ConstantOne",
    "ConvexPotential",
    "Decomposition",
    "FunctionalSpec",
    "I",
    "InequalityReport",
    "J",
    "K",
    "LinearPotential",
    "LogSumExpPotential",
    "N",
    "NodeFields",
    "POTENTIALS",
    "PROBES",
    "ProbeRecord",
    "SmoothDistancePotential",
    "TestFunction",
    "Weight",
    "ZeroPotential",
    "check_preconditions",
    "decompose",
    "decomposition_residual",
    "default_plane",
    "eq52_coefficients",
    "eq59_constants",
    "estimate_chain_probe",
    "estimate_chain_probes",
    "eval_functional",
    "eval_functionals",
    "integrate_fields",
    "make_potential",
    "make_testfn",
    "ms_cone",
    "node_fields",
    "prop_a_budget",
    "proposition_a_report",
    "theorem_ms_report",
]
