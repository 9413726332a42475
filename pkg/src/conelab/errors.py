"""Shared exception types."""


class ResolutionError(ValueError):
    """A grid or quadrature cannot resolve the requested scale."""


class GeometryError(ValueError):
    """A geometric construction does not fit the requested box."""


class InfeasibleError(ValueError):
    """No admissible parameter choice exists; the message names the
    binding constraint."""
