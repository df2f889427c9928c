"""Chart-based hypersurface calculus in R^(n+1)."""

from .catalog import EXAMPLE_IDS, SURFACES, make_surface
from .charts import (
    Chart,
    EllipsoidChart,
    FiniteDifferenceChart,
    GraphChart,
    PerturbedSphereChart,
    ProductChart,
    SphereChart,
    ellipsoid_patch_chart,
    paraboloid_chart,
    saddle_chart,
)
from .fields import (
    AmbientFunction,
    QuadraticAmbient,
    ScalarField,
    check_gradient,
    covariant_hessian,
    pullback,
)
from .frame import FramePoint, JetPoint, frame_at, jet_at, riemann
from .identities import (
    codazzi_residual,
    div_newton_residual,
    div_newton_terms,
    gauss_residual,
    restriction_hessian_residual,
    restriction_hessian_terms,
)
from .quadrature import Grid, ScanResult, integrate, kconvexity_scan, make_grid, required_cone

__all__ = [name for name in dir() if not name.startswith("_")]
