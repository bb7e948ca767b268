"""Exception types raised by the madim library."""


class MadimError(Exception):
    """Base class for all library errors."""


class EmptySubshift(MadimError):
    """Pruning to an essential presentation removed every symbol."""


class InvalidSymbol(MadimError):
    """A pair symbol or transition endpoint is out of range or undeclared."""


class DuplicatePair(MadimError):
    """The same pair symbol was declared twice."""


class EnumerationCapExceeded(MadimError):
    """An exhaustive enumeration would exceed the configured cap."""


class StateBlowup(MadimError):
    """Subset construction exceeded the automaton state cap."""


class NonConvergence(MadimError):
    """Power iteration failed to converge within the iteration cap."""


class EmptyInput(MadimError):
    """An operation that needs at least one data point received none."""


class InvalidScale(MadimError):
    """A scale parameter lies outside (0, 1]."""


class ScaleOrder(MadimError):
    """Scale pair violates 0 < rho < r."""


class CenterBlockNotAllowed(MadimError):
    """An approximate-square center block is not an allowed word."""


class ConditionalNotConverged(MadimError):
    """Conditional entropy did not stabilize and exact values were demanded."""


class ThetaOutOfRange(MadimError):
    """Spectrum parameter theta lies outside (0, 1)."""


class DegenerateGrid(MadimError):
    """A regression grid has fewer than two distinct abscissae."""


class EmptyTable(MadimError):
    """A max-min ordering check received an empty table."""


class CapExceeded(MadimError):
    """A demo or sweep parameter exceeds its configured cap."""


class ConfigSyntax(MadimError):
    """A configuration file is not valid JSON."""


class ConfigSchema(MadimError):
    """A configuration file violates the schema; message names the field."""
