"""Exception types shared across the package."""


class OtsSkeError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(OtsSkeError, ValueError):
    """Invalid scheme or group parameters."""


class UnsupportedSecurityLevelError(ParameterError):
    """Requested security level has no curve configured."""


class DecodeError(OtsSkeError, ValueError):
    """Malformed serialized material (points, keys, signatures, quotes)."""


class RepresentationError(OtsSkeError):
    """Group elements do not carry the source-group side an operation needs."""


class SessionConsumedError(OtsSkeError):
    """A read-once key buffer was read a second time."""


class SessionBudgetError(OtsSkeError):
    """All provisioned signing sessions have been generated."""


class BufferCorruptionError(OtsSkeError):
    """A key buffer slot was erased before its first read."""


class ProtocolError(OtsSkeError):
    """Attestation flow violated a protocol precondition."""
