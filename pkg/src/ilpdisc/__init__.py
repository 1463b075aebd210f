"""Exact standard-form ILP solver for small codimension via a windowed dynamic program."""

from .dp import DpConfig, solve
from .instance import IlpInstance, SolveResult

__all__ = ["DpConfig", "IlpInstance", "SolveResult", "solve"]
__version__ = "0.1.0"
