"""Exception hierarchy shared by all modules."""


class GuidedProjectionError(ValueError):
    """Base class for every error raised by this package."""


class InvalidDataError(GuidedProjectionError):
    """Input values are malformed, non-finite, or have mismatched shapes."""


class InvalidSelectionError(GuidedProjectionError):
    """A selection of observations is too small or references bad rows."""


class DegenerateSelectionError(GuidedProjectionError):
    """The standardized selection has no usable singular directions."""


class InvalidConfigError(GuidedProjectionError):
    """A parameter lies outside its supported range."""


class UndefinedIndexError(GuidedProjectionError):
    """A validity index is undefined for the given distances or labels."""


class DegenerateKernelError(GuidedProjectionError):
    """A diffusion kernel has observations with no numerical neighbours."""
