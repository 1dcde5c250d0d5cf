"""Exact computations around torus knots, false theta functions and (s,t)-log VOA characters."""

from .exactq import APComplex, ParameterError, PeriodicChar
from .knots import TorusParams, jones_torus_knot, kashaev_invariant
from .qseries import LaurentPoly, QSeries, QZSeries
from .thetas import Phi, Psi
from .voa import VoaLabel

__all__ = [
    "APComplex",
    "LaurentPoly",
    "ParameterError",
    "PeriodicChar",
    "Phi",
    "Psi",
    "QSeries",
    "QZSeries",
    "TorusParams",
    "VoaLabel",
    "jones_torus_knot",
    "kashaev_invariant",
]
