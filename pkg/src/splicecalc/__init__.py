"""splicecalc: exact Conway-function arithmetic for spliced links.

Submodules:

  symalg       exact Laurent-polynomial / rational-function arithmetic
  linkcore     the link data model and built-in catalog
  spliceengine splice evaluation and the derived operations
  torsionlab   torsion of based chain complexes and its multiplicativity check
  cli          command-line front end
"""

from .symalg import LaurentPoly, Monomial, RatFn, parse_poly, render
from .linkcore import Catalog, LinkSpec, builtin_catalog, relabel, validate_linkspec

__all__ = [
    "LaurentPoly",
    "Monomial",
    "RatFn",
    "parse_poly",
    "render",
    "Catalog",
    "LinkSpec",
    "builtin_catalog",
    "relabel",
    "validate_linkspec",
]

__version__ = "0.1.0"
