"""Exception types raised across the package."""


class CompositeModulus(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class FieldMismatch(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class NotNormalized(ValueError):
    pass


class ResourceCap(RuntimeError):
    """A requested object would exceed a configured size limit."""


class BoundTooLarge(ValueError):
    pass


class AlphaOutOfRange(ValueError):
    pass


class PLessThanOne(ValueError):
    pass


class ExponentOrder(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class EmptyNet(ValueError):
    pass


class ConfigInvalid(ValueError):
    """Invalid experiment configuration; ``errors`` maps field name to message."""

    def __init__(self, errors):
        self.errors = dict(errors)
        msg = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(msg)
