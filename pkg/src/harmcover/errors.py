"""Exception hierarchy shared by all harmcover modules.

The CLI maps these onto exit codes: usage/argument problems -> 2,
violated preconditions (named assumptions) -> 3, grid- or
truncation-resolution problems -> 4.
"""


class HarmcoverError(Exception):
    """Base class for all harmcover errors."""


class ArgumentError(HarmcoverError, ValueError):
    """A caller-supplied value is outside the supported range."""


class PreconditionError(HarmcoverError, RuntimeError):
    """A named assumption of an operation does not hold.

    The message always names the violated assumption so that scripted
    callers can report it verbatim.
    """


class CoverageError(PreconditionError):
    """A point that should be covered is not; the message names the point."""


class ResolutionError(HarmcoverError, RuntimeError):
    """The grid is too coarse (or a truncation too small) for the request."""
