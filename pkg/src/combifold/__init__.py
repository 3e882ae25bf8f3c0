"""
combifold: abstract ball complexes, assemblies and combinatorial tangent bundles.

Finite posets and simplicial complexes checked with certificates: PL sphere
and ball recognition by bistellar flips, ball-complex validation, assembly
morphisms, prismatic decompositions, finite Alexandroff spaces and the Gauss
functor of a combinatorial manifold.
"""

__version__ = "0.1.0"

from .assembly import Assembly, compose, verify_assembly
from .ballcomplex import BallComplex, assemble_ball, validate
from .bundles import GaussFunctor, prism_complex, tangent_total, validate_coloring
from .config import RunConfig
from .errors import CombifoldError, InputError, RefutedError, UnprovenError
from .mcp_server import CombifoldMCPServer
from .poset import Poset, PosetDiagram, grothendieck_total
from .recognition import Status, Verdict, homology, is_ball, is_sphere
from .simplicial import SimplicialComplex

__all__ = [
    "Assembly",
    "BallComplex",
    "CombifoldError",
    "CombifoldMCPServer",
    "GaussFunctor",
    "InputError",
    "Poset",
    "PosetDiagram",
    "RefutedError",
    "RunConfig",
    "SimplicialComplex",
    "Status",
    "UnprovenError",
    "Verdict",
    "assemble_ball",
    "compose",
    "grothendieck_total",
    "homology",
    "is_ball",
    "is_sphere",
    "prism_complex",
    "tangent_total",
    "validate",
    "validate_coloring",
    "verify_assembly",
]
