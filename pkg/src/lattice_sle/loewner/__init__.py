from .core import (DrivingSample, HalfPlaneCurve, brownian_driving, douglas_peucker,
                   extract_driving, forward_solve, sample_sle)
from .lattice import lattice_curve_to_halfplane, lattice_driving, map_curve_to_halfplane

__all__ = [
    "DrivingSample", "HalfPlaneCurve", "brownian_driving", "douglas_peucker", "extract_driving",
    "forward_solve", "sample_sle", "lattice_curve_to_halfplane", "lattice_driving",
    "map_curve_to_halfplane",
]
