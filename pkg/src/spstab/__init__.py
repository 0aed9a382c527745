"""Exact, desk-scale computations around homology stability for symplectic groups."""

from .errors import (
    CapExceeded,
    ConfigError,
    IncompatibleCoefficients,
    NotPrime,
    SpstabError,
)
from .grouphomology import (
    BarHomology,
    GModule,
    bar_homology,
    d1_shapiro_square,
    induced_map,
    relative_decomposition,
    relative_quasilinearity_check,
    shapiro_check,
    stable_surjection_check,
    vindep_check,
)
from .homology import ChainComplex, available_backends, complex_homology, default_backend
from .monoidring import FinZ0RModule, PolyR, Z0RElem, localization_vanishes, s_poly
from .mwk import milnor_k, milnor_witt_k, steinberg_pairs
from .ringkernel import FGAbelianGroup, Ring, make_local_ring, parse_ring, pfaffian
from .symplectic import FinGroup, sp_group
from .unimodular import SkewMat, UnimodSeq, gram, normal_form, orbit_count

__version__ = "0.1.0"

__all__ = [
    "BarHomology", "CapExceeded", "ChainComplex", "ConfigError", "FGAbelianGroup",
    "FinGroup", "FinZ0RModule", "GModule", "IncompatibleCoefficients", "NotPrime",
    "PolyR", "Ring", "SkewMat", "SpstabError", "UnimodSeq", "Z0RElem",
    "available_backends", "bar_homology", "complex_homology", "d1_shapiro_square",
    "default_backend", "gram", "induced_map", "localization_vanishes", "make_local_ring",
    "milnor_k", "milnor_witt_k", "normal_form", "orbit_count", "parse_ring", "pfaffian",
    "relative_decomposition", "relative_quasilinearity_check", "s_poly", "shapiro_check",
    "sp_group", "stable_surjection_check", "steinberg_pairs", "vindep_check",
]
