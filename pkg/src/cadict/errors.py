"""Exception types shared across the package."""


class CadictError(Exception):
    """Base class for all cadict errors."""


class DataError(CadictError):
    """An input file or token set is unusable: wrong format, wrong content,
    out-of-vocabulary tokens where they are fatal, degenerate joins."""


class InfeasibleError(CadictError):
    """The data is fine but the requested configuration cannot be satisfied,
    e.g. a base dictionary larger than the available vocabulary."""
