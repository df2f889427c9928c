"""Surface catalog addressable by string ids such as ``sphere:r=2:n=3``."""

from ..errors import ValidationError
from .charts import (
    EllipsoidChart,
    PerturbedSphereChart,
    SphereChart,
    ellipsoid_patch_chart,
    paraboloid_chart,
    saddle_chart,
)

SURFACES = {
    "sphere": "sphere[:r=<radius>][:n=<dim>]  closed round sphere (default r=1, n=2)",
    "ellipsoid": "ellipsoid:<a0>,...,<an>  closed ellipsoid, n+1 semi-axes (default 1,1.3,0.8)",
    "ellipsoid-patch": "ellipsoid-patch[:<a0>,...,<an>]  lower cap of an ellipsoid as a graph patch",
    "paraboloid-patch": "paraboloid-patch[:n=<dim>]  graph of |u|^2/2 over [-1,1]^n",
    "perturbed-sphere": "perturbed-sphere[:<eps>][:n=<dim>]  radial graph (1 + eps x0 x1) over the sphere",
    "saddle": "saddle  graph of u1^2 - u2^2 over [-1,1]^2 (not 2-convex)",
}

EXAMPLE_IDS = (
    "sphere:r=1:n=2",
    "sphere:r=2:n=3",
    "ellipsoid:1,1.3,0.8",
    "ellipsoid-patch:1,1.3,0.8",
    "paraboloid-patch:n=2",
    "perturbed-sphere:0.05:n=2",
    "saddle",
)


def _split(surface_id):
    head, _, rest = surface_id.partition(":")
    keyed, plain = {}, []
    for part in filter(None, rest.split(":")):
        if "=" in part:
            key, _, val = part.partition("=")
            keyed[key.strip()] = val.strip()
        else:
            plain.append(part.strip())
    return head.strip(), keyed, plain


def _floats(text, what):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse {what} from {text!r}") from None


def make_surface(surface_id):
    """Build the chart named by ``surface_id``."""
    head, keyed, plain = _split(surface_id)
    try:
        n = int(keyed.get("n", 2))
    except ValueError:
        raise ValidationError(f"bad dimension in {surface_id!r}") from None
    if head == "sphere":
        return SphereChart(float(keyed.get("r", 1.0)), n)
    if head == "ellipsoid":
        axes = _floats(plain[0], "semi-axes") if plain else [1.0, 1.3, 0.8]
        return EllipsoidChart(axes)
    if head == "ellipsoid-patch":
        axes = _floats(plain[0], "semi-axes") if plain else [1.0, 1.3, 0.8]
        return ellipsoid_patch_chart(axes)
    if head == "paraboloid-patch":
        return paraboloid_chart(n)
    if head == "perturbed-sphere":
        eps = float(plain[0]) if plain else float(keyed.get("eps", 0.05))
        return PerturbedSphereChart(eps, n)
    if head in ("saddle", "saddle-patch"):
        return saddle_chart()
    raise ValidationError(f"unknown surface id {surface_id!r}; known: {', '.join(SURFACES)}")
