"""Exception types shared by every cspkit module.

All errors raised on purpose by the library derive from CspkitError, so
callers can catch one base class at an API boundary (the command line
driver does exactly that).
"""

from __future__ import annotations


class CspkitError(Exception):
    """Base class of every error deliberately raised by cspkit."""


# ---------------------------------------------------------------- modeling

class EmptyDomain(CspkitError):
    """A variable was declared with no value at all."""


class DuplicateId(CspkitError):
    """Two variables or arrays share the same identifier in one context."""


class MixedDomain(CspkitError):
    """A domain mixes integers and symbols."""


class ArityError(CspkitError):
    """An operator or combinator received the wrong number of operands."""


class UnknownOperator(CspkitError):
    """An expression was built with an operator name that does not exist."""


class IndexArityMismatch(CspkitError):
    """An array was indexed with the wrong number of indices."""


class HoleAccess(CspkitError):
    """A constant index selected a hole (an undeclared cell) of an array."""


class OutOfBounds(CspkitError):
    """A constant index fell outside the array bounds."""


class UnpostableEntry(CspkitError):
    """Something that is not a constraint was passed to satisfy()."""


class SecondObjective(CspkitError):
    """A context may carry at most one objective."""


# ------------------------------------------------------------- constraints

class ArityMismatch(CspkitError):
    """Scope length and table/automaton arity disagree."""


class EmptyTable(CspkitError):
    """A table operation needed an arity but the table has no row."""


class MatrixWithExpressions(CspkitError):
    """The matrix form only accepts raw variables, not expressions."""


class TooFewTerms(CspkitError):
    """A constraint needs at least two terms."""


class RaggedLists(CspkitError):
    """Lists that must share one length do not."""


class LengthsMismatch(CspkitError):
    """ordered() needs exactly len(terms) - 1 lengths."""


class CoeffMismatch(CspkitError):
    """A weighted sum received a coefficient list of the wrong length."""


class BothOrNeitherValues(CspkitError):
    """count() needs exactly one of value= / values=."""


class DuplicateKeys(CspkitError):
    """cardinality() received the same counted value twice."""


class BadVariantShapes(CspkitError):
    """channel() arguments fit none of its three variants."""


class ShapeMismatch(CspkitError):
    """Parallel argument lists of a scheduling constraint disagree in shape."""


class NotSlidable(CspkitError):
    """A sequence of entities cannot be expressed as one sliding constraint."""


class BadConditionShape(CspkitError):
    """A comparison condition received an unusable operator or right side."""


class ExceptingWithExpressions(CspkitError):
    """Except values only make sense against raw variables."""


class Unsatisfiable(CspkitError):
    """Raised only by helpers that refuse to build a trivially false model."""


# ----------------------------------------------------------------- data io

class NamedBeforeFile(CspkitError):
    """Named elementary values must be given after JSON files."""


class MalformedSpec(CspkitError):
    """A -data argument does not follow the accepted grammar."""


class FileNotFound(CspkitError):
    """A data file named on the command line does not exist."""


class ParseError(CspkitError):
    """A data file exists but cannot be parsed."""


class WriteError(CspkitError):
    """A data export could not be written."""


class Exhausted(CspkitError):
    """A text cursor was read past its last line."""


class NoNumber(CspkitError):
    """The current line holds no integer."""


class MultipleNumbers(CspkitError):
    """The current line holds more than one integer."""


class NonAlphabetic(CspkitError):
    """A word contains a character outside a-z / A-Z."""


class RaggedGrid(CspkitError):
    """A grid operation needs rows of equal length."""


# ---------------------------------------------------------------- compiler

class NonGroundable(CspkitError):
    """Bounds of an auxiliary variable cannot be computed."""


# ------------------------------------------------------------------ oracle

class DivisionByZero(CspkitError):
    """Integer division or modulo by zero during evaluation."""


class SymbolArithmetic(CspkitError):
    """Arithmetic attempted on symbolic values."""


class Overflow(CspkitError):
    """A power left the signed 64 bit range."""


class SearchSpaceTooLarge(CspkitError):
    """Enumeration hit its candidate cap."""


class PartialAssignment(CspkitError):
    """A solution check received an assignment missing some variable."""


class OutOfDomainValue(CspkitError):
    """A solution check received a value outside a variable's domain."""


# --------------------------------------------------------------------- cli

class UnknownModel(CspkitError):
    """The registry holds no model of that name."""


class UnknownVariant(CspkitError):
    """The model exists but not under that variant."""


class BadFlag(CspkitError):
    """An unrecognized or malformed command line flag."""
