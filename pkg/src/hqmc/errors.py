"""Exception types shared across the toolkit."""


class HqmcError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(HqmcError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class FormatError(HqmcError, ValueError):
    """A model document violates the JSON interchange schema."""
