"""stalab: counterdiabatic shortcuts to adiabaticity for scale-invariant driving."""

from . import classical, meanfield, morse, potentials, quantum1d, schedules
from .report import InvariantReport

__all__ = [
    "schedules",
    "potentials",
    "classical",
    "morse",
    "quantum1d",
    "meanfield",
    "InvariantReport",
]

__version__ = "0.1.0"
