"""Whitney-square surgery, John constants and planar potential theory on pixel grids."""

from .exceptions import (ConnectivityError, ConstructionError, EmptyMaskError, GeometryError,
                         JohnforgeError, ParameterError, WitnessInapplicableError)
from .geometry import Box, CompactSetMask, WhitneyDecomposition, distance_transform, rasterize, whitney
from .john import JohnEstimate, estimate_john_constant
from .simplify import build_graph, certify_graph, cut_slits, verify_simplified
from .removability import build_test_function, nonremovability_witness, removability_report, smooth_in_collar
from .estimators import (CapacityEstimator, CauchyTransformer, DomainSimplifier, JohnConstantEstimator,
                         Rasterizer, RemovabilityExperiment, WhitneyDecomposer, WitnessEstimator)

__version__ = "0.1.0"

__all__ = [
    "Box", "CapacityEstimator", "CauchyTransformer", "CompactSetMask", "ConnectivityError",
    "ConstructionError", "DomainSimplifier", "EmptyMaskError", "GeometryError", "JohnEstimate",
    "JohnConstantEstimator", "JohnforgeError", "ParameterError", "Rasterizer",
    "RemovabilityExperiment", "WhitneyDecomposer", "WhitneyDecomposition", "WitnessEstimator",
    "WitnessInapplicableError", "build_graph", "build_test_function", "certify_graph", "cut_slits",
    "distance_transform", "estimate_john_constant", "nonremovability_witness", "rasterize",
    "removability_report", "smooth_in_collar", "verify_simplified", "whitney",
]
