"""Exception types shared across the pipeline."""


class AdsbError(Exception):
    """Base class for data errors raised by this package."""


class ParseError(AdsbError, ValueError):
    """A record or file could not be decoded.

    ``field`` names the offending record field when the failure is a type
    mismatch on a single field, otherwise it is ``None``.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class RangeError(AdsbError, ValueError):
    pass


class EmptyDataset(AdsbError, ValueError):
    pass


class EmptyInput(AdsbError, ValueError):
    pass


class DegenerateRange(AdsbError, ValueError):
    pass


class FormatError(AdsbError, ValueError):
    """A persisted artifact is truncated, has the wrong header, or wrong dims."""


class VariantMismatch(AdsbError, TypeError):
    pass


class BadK(AdsbError, ValueError):
    pass
