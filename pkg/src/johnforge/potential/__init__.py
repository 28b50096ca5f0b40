"""Numerical potential theory on pixel grids."""

from .beurling import arc_capacity, verify_beurling
from .capacity import (CapacityEstimate, EquilibriumMeasure, capacity_estimate,
                       capacity_of_points, equilibrium_measure)
from .cauchy import ComplexField, cauchy_transform
from .harmonic import (HarmonicField, dirichlet_energy, disk_grid, harmonic_solve,
                       normalize_energy, oscillation_capacity)
from .measure import HarmonicMeasureEstimate, harmonic_measure_wos, poisson_arc_measure

__all__ = [
    "CapacityEstimate", "ComplexField", "EquilibriumMeasure", "HarmonicField",
    "HarmonicMeasureEstimate", "arc_capacity", "capacity_estimate", "capacity_of_points",
    "cauchy_transform", "dirichlet_energy", "disk_grid", "equilibrium_measure",
    "harmonic_measure_wos", "harmonic_solve", "normalize_energy", "oscillation_capacity",
    "poisson_arc_measure", "verify_beurling",
]
