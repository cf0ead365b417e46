"""Exception hierarchy shared by all tate_tori modules.

Everything derives from TateToriError so callers (notably the CLI) can map
failures to exit codes without enumerating modules.
"""


class TateToriError(Exception):
    """Base class for all package-specific errors."""


class ContainmentError(TateToriError):
    """A column was expected to lie in the integer span of a lattice basis
    and does not.  In cohomology contexts this signals a broken group
    action, not bad user input."""


class OrderCapExceeded(TateToriError):
    """Group closure grew past the configured order cap."""


class TorsionQuotient(TateToriError):
    """A lattice quotient that must be torsion-free acquired torsion."""


class BadSpec(TateToriError):
    """A torus specification tree is malformed or refers to data that does
    not belong to the group it is built over."""


class InfiniteCohomology(TateToriError):
    """A cohomology group came out with positive free rank.  Impossible for
    a valid lattice over a finite group; indicates an upstream invariant
    breach."""


class NotCyclic(TateToriError):
    """An operation that only makes sense for cyclic groups was invoked on
    a non-cyclic group."""


class CochainSystemTooLarge(TateToriError):
    """The degree-2 cochain system exceeds the desk-scale guardrail.
    Pass force=True (CLI: --force) to compute anyway."""


class InconsistentAssumptions(TateToriError):
    """Torsor assumptions contradict each other (for instance a global
    point without local points everywhere)."""


class ParseError(TateToriError):
    """A problem file or torus expression could not be parsed."""


class UnknownLabel(ParseError):
    """A subgroup label is referenced but never defined."""


class BadPermutation(ParseError):
    """A permutation string is malformed or does not denote an element of
    the group at hand."""
