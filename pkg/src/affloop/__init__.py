"""affloop: exact twisted affine Kac-Moody realizations and annihilating
fields of standard modules, verified on depth-truncated graded modules."""

from .scalars import Cyc, Rational, cyc_arith, cyc_inv, cyc_make, sqrt2, zeta
from .finlie import ChevalleyAlgebra, RootSystem, chevalley_algebra, root_system
from .twist import (
    Automorphism,
    TwistRealization,
    construct_realization,
    diagram_automorphism,
    gradation,
    inner_automorphism,
)
from .affine import AffineElement, affine_bracket, affine_generators
from .modules import HWModule, TruncationOverflow, heisenberg_membership
from .fields import LoopOps, RSpace

__all__ = [
    "AffineElement", "Automorphism", "ChevalleyAlgebra", "Cyc", "HWModule",
    "LoopOps", "RSpace", "Rational", "RootSystem", "TruncationOverflow",
    "TwistRealization", "affine_bracket", "affine_generators",
    "chevalley_algebra", "construct_realization", "cyc_arith", "cyc_inv",
    "cyc_make", "diagram_automorphism", "gradation", "heisenberg_membership",
    "inner_automorphism", "root_system", "sqrt2", "zeta",
]

__version__ = "0.1.0"
