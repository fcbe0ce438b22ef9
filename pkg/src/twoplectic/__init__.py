"""Exact symbolic checks for 2-plectic geometry, Courant algebroids and their
Lie 2-algebras, with polynomial coefficients on R^n."""

from .courant import CourantStructure, Section
from .exterior import AffineMap, DifferentialForm, VectorField, dx
from .plectic import HamiltonianPair, PlecticStructure, check_two_plectic
from .report import Report, Settings
from .ring import Polynomial, rational

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "CourantStructure",
    "DifferentialForm",
    "HamiltonianPair",
    "PlecticStructure",
    "Polynomial",
    "Report",
    "Section",
    "Settings",
    "VectorField",
    "check_two_plectic",
    "dx",
    "rational",
]
