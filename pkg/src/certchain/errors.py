"""Exception types shared across the certchain package."""

from __future__ import annotations


class CertChainError(Exception):
    """Base class for all certchain errors."""


class CanonicalizationError(CertChainError):
    """Value cannot be canonically serialized (e.g. floats, non-string keys)."""


class SignerUnknown(CertChainError):
    """Signing key is not registered in the keyring."""


class ClockRegression(CertChainError):
    """Append timestamp is earlier than the predecessor block's timestamp."""


class Unauthorized(CertChainError):
    """Caller lacks a valid, active credential for a write operation."""


class InvalidRecord(CertChainError):
    """Certificate record violates an invariant; `field` names the offender."""

    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"invalid certificate record: {field}")


class UnknownCertificate(CertChainError):
    """Referenced hash is not a certificate block on the CERT chain."""


class AlreadyCorrected(CertChainError):
    """The old hash already has a correction; target the latest version."""

    def __init__(self, old_hash_hex: str, new_hash_hex: str):
        self.old_hash_hex = old_hash_hex
        self.new_hash_hex = new_hash_hex
        super().__init__(
            f"certificate {old_hash_hex} already corrected to {new_hash_hex}"
        )


class InconsistentLedger(CertChainError):
    """A correction points at a hash that is absent from the CERT chain."""


class MalformedPayload(CertChainError):
    """QR payload or hash string does not match the expected grammar."""


class UnsupportedVersion(CertChainError):
    """QR payload declares a version this codec does not speak."""


class CorruptLedger(CertChainError):
    """Ledger file failed a CRC, framing, or chain-integrity check."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        super().__init__(message if offset is None else f"{message} (offset {offset})")


class BadGenesis(CertChainError):
    """Height-0 block does not match the fixed genesis convention."""


class HeightGap(CertChainError):
    """Durable append skipped a height."""


class IoFailure(CertChainError):
    """Underlying I/O operation failed."""


class AlreadyInitialized(CertChainError):
    """Data directory already contains an initialized store."""


class DuplicateKeyId(CertChainError):
    """Keyring already contains a credential with this key_id."""
