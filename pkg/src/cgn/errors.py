"""Exception types shared across the package."""


class CGNError(Exception):
    """Base class for all errors raised by :mod:`cgn`."""


class DomainError(CGNError, ValueError):
    """A scalar argument lies outside the domain of a majorant or auxiliary function."""


class LPError(CGNError):
    """The linear programming engine could not produce a usable answer."""


class SubproblemError(CGNError):
    """A linearized subproblem failed (infeasible, unbounded, or LP breakdown)."""


class SchemaError(CGNError, ValueError):
    """A problem or model document does not match its JSON schema."""
