"""Base exceptions shared across the retargeting pipeline."""


class RetargetError(Exception):
    """Base exception for all pipeline errors."""
    pass


class ConfigurationError(RetargetError):
    """Raised when shapes, parameters or settings do not fit together."""
    pass


class MissingGroundTruthError(RetargetError):
    """Raised when a (content, identity) grid cell has no real clip."""
    pass
