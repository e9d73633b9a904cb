"""Laplace eigenproblems on geodesic triangles of constant curvature."""

__version__ = "0.1.0"

from .exceptions import CurvspecError  # noqa: E402
from .geometry import GeodesicTriangle, Isometry, triangle_from_angles  # noqa: E402
from .killing import KillingField  # noqa: E402
from .estimator import TriangleSpectrum  # noqa: E402

__all__ = ["CurvspecError", "GeodesicTriangle", "Isometry", "KillingField", "TriangleSpectrum", "triangle_from_angles",
           "__version__"]
