"""Exception hierarchy shared by every module in the package."""


class XteleError(Exception):
    """Base class for all package errors."""


class DimensionError(XteleError, ValueError):
    """Matrix dimension outside the supported set {2, 4, 8}."""


class SubsystemError(XteleError, ValueError):
    """Invalid subsystem selection for a partial trace."""


class NotHermitianError(XteleError, ValueError):
    pass


class InvalidStateError(XteleError, ValueError):
    """A matrix that should be a density matrix is not one."""


class ChannelError(XteleError, ValueError):
    """Base class for channel construction failures."""


class TraceError(ChannelError):
    pass


class NegativityError(ChannelError):
    pass


class PSDError(ChannelError):
    pass


class PrincipalSubspaceError(ChannelError):
    """Strict mode: the channel violates r11*r44 > r22*r33."""


class OrderingError(ChannelError):
    """Channel is not in canonical form (alpha <= beta, r11 <= r44)."""


class ExtractionImpossibleError(XteleError, ValueError):
    """USE requested on a channel with zero ratio (alpha = 0 or r11 = 0)."""


class ProtocolError(XteleError, ValueError):
    """A protocol emitted outcome probabilities that do not sum to one."""
