"""Local statistics and rank bounds for the height-ordered family y^2 = x^3 + ax + b."""

from .family import CurveParams, enumerate_family, family_size
from .reduction import KodairaType, ReductionClass, reduction_report

__all__ = [
    "CurveParams",
    "KodairaType",
    "ReductionClass",
    "enumerate_family",
    "family_size",
    "reduction_report",
]

__version__ = "0.1.0"
