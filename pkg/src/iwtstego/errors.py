"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class StegoError(Exception):
    """Base class for every error raised by iwtstego."""


class DimensionError(StegoError, ValueError):
    """Plane or image dimensions violate a shape requirement."""


class ModeMismatchError(StegoError, ValueError):
    """A YCC image was handed to a conversion running in another mode."""


class CapacityError(StegoError):
    """Payload does not fit in the carrier coefficients."""


class SelfCheckError(StegoError):
    """Unrecoverable payload: the encoded stego image failed to decode back."""


class PayloadError(StegoError):
    """Base class for key-payload parse failures."""


class PayloadFormatError(PayloadError):
    """Header is malformed: bad magic, unknown version, or impossible geometry."""


class PayloadLengthError(PayloadError):
    """Run-length body is inconsistent with the declared lengths."""


class KeyCheckError(PayloadError):
    """Decrypted key fails its integrity check, most likely a wrong XOR key."""


class KeyRangeError(PayloadError):
    """A key entry addresses a block outside the cover grid."""
