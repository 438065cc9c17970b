from __future__ import annotations


class SelftestError(Exception):
    pass


class DimensionError(SelftestError, ValueError):
    """Qubit count or register size mismatch."""


class ContractError(SelftestError, ValueError):
    """A documented precondition was violated by the caller."""


class ResourceLimitError(SelftestError):
    """Refused: the dense engine or an enumeration would exceed its cap."""


class ProtocolViolation(SelftestError):
    """A wire peer sent a message it is not allowed to send."""


class SessionAborted(SelftestError):
    pass
