"""Exception hierarchy shared by all splicecalc modules.

Domain errors derive from :class:`SpliceCalcError`; input-syntax problems
derive from :class:`SpliceCalcSyntaxError` so the CLI can map them to a
distinct exit code.
"""


class SpliceCalcError(Exception):
    """Base class for all domain errors raised by this package."""


class SpliceCalcSyntaxError(SpliceCalcError):
    """Base class for malformed textual input (expressions, catalog files)."""


# --- symbolic algebra ------------------------------------------------------

class DivisionByZero(SpliceCalcError):
    """Division of a rational function by zero."""


class ZeroDenominator(SpliceCalcError):
    """A rational function was constructed with an identically-zero denominator."""


class SingularSpecialization(SpliceCalcError):
    """A substitution or specialization makes the denominator identically zero."""


class ExprSyntaxError(SpliceCalcSyntaxError):
    """Malformed polynomial or splice expression; carries the failing offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (offset {position})")
        self.position = position


# --- link data model -------------------------------------------------------

class CollisionError(SpliceCalcError):
    """A component relabeling is not injective."""


class UnknownComponent(SpliceCalcError):
    """A named component does not exist in the link it was looked up in."""


class UnknownName(SpliceCalcError):
    """A link name does not resolve against the loaded catalogs."""


class CatalogError(SpliceCalcSyntaxError):
    """Malformed or inconsistent catalog file; message carries line numbers."""


class InvalidLinkSpec(SpliceCalcError):
    """A link spec violates its invariants where valid data is required."""


# --- splice engine ---------------------------------------------------------

class DegenerateSplice(SpliceCalcError):
    """Splicing two bare knots leaves no components."""


class MissingSublinkData(SpliceCalcError):
    """The exceptional splice branch needs sublink data that was not supplied."""


class TorresDegenerate(SpliceCalcError):
    """Component removal requested for a component with all-zero linking numbers."""


class NonCoprime(SpliceCalcError):
    """Cabling parameters p, q are not coprime."""


class NotPolynomial(SpliceCalcError):
    """A reduced one-variable Conway function failed to be a Laurent polynomial."""


class CrossCheckError(SpliceCalcError):
    """Two independent computation routes disagree (verification mode)."""


# --- torsion lab -----------------------------------------------------------

class ComplexFileError(SpliceCalcSyntaxError):
    """Malformed chain-complex file; message carries line numbers."""


class InvalidComplex(SpliceCalcError):
    """A based chain complex violates its invariants (boundary squares, cycles, bases)."""


class DegenerateBasis(SpliceCalcError):
    """Chain-complex data has inconsistent shapes or a singular distinguished basis."""


class InvalidWitness(SpliceCalcError):
    """A short-exact-sequence witness is malformed."""
