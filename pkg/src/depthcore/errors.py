"""Exception types shared across depthcore modules."""


class InputError(ValueError):
    """Invalid user input: bad config, dimension mismatch, out-of-domain argument."""


class ResourceError(RuntimeError):
    """A sizing guard tripped (edge cap, grid cell cap) before memory was exhausted."""


class BoundViolationError(AssertionError):
    """A proven mathematical bound failed; indicates a bug, not a data property."""
