"""Companionship graphs of knots and links in the 3-sphere.

Links are represented as splice diagrams whose vertices carry Seifert-fibred
or hyperbolic link labels.  Diagrams can be spliced, reduced to companionship
graphs, compared through canonical forms, and fed to invariant computations.
"""

from splicegraph.errors import SpliceError, ParseError, AtomValidationError
from splicegraph.laurent import LaurentPoly
from splicegraph.links import (
    AtomRef,
    BrunnianSet,
    KeyChain,
    SeifertLink,
    SeifertManifoldDescriptor,
    Slope,
    Unlink,
)

__all__ = [
    "AtomRef",
    "AtomValidationError",
    "BrunnianSet",
    "KeyChain",
    "LaurentPoly",
    "ParseError",
    "SeifertLink",
    "SeifertManifoldDescriptor",
    "Slope",
    "SpliceError",
    "Unlink",
]

__version__ = "0.1.0"
