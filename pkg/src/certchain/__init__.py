"""certchain: a tamper-evident academic certificate registry.

Two append-only hash chains back the system: the CERT chain stores
certificate records (including corrected versions) and the CORR chain maps
superseded block hashes to their replacements.  Writes require registered
Ed25519 admin keys; verification is public.
"""

from .errors import (
    AlreadyCorrected,
    AlreadyInitialized,
    BadGenesis,
    CanonicalizationError,
    CertChainError,
    ClockRegression,
    CorruptLedger,
    DuplicateKeyId,
    HeightGap,
    InconsistentLedger,
    InvalidRecord,
    IoFailure,
    MalformedPayload,
    SignerUnknown,
    Unauthorized,
    UnknownCertificate,
    UnsupportedVersion,
)
from .keys import AdminCredential, Keyring, SigningKey, verify_signature
from .ledger import (
    Block,
    BlockHeader,
    ChainId,
    ChainState,
    FailureKind,
    IntegrityReport,
    append_block,
    compute_block_hash,
    digest_from_hex,
    digest_to_hex,
    get_block,
    make_genesis,
    sha256,
    verify_chain,
)
from .qr import QrPayload, decode_payload, encode_payload
from .records import (
    CertificateRecord,
    CorrectionRecord,
    Status,
    VerificationResult,
)
from .registry import Registry
from .storage import LedgerStore, PendingCorrection, TornTail, open_ledger

__version__ = "0.1.0"

__all__ = [
    "AdminCredential",
    "AlreadyCorrected",
    "AlreadyInitialized",
    "BadGenesis",
    "Block",
    "BlockHeader",
    "CanonicalizationError",
    "CertChainError",
    "CertificateRecord",
    "ChainId",
    "ChainState",
    "ClockRegression",
    "CorrectionRecord",
    "CorruptLedger",
    "DuplicateKeyId",
    "FailureKind",
    "HeightGap",
    "InconsistentLedger",
    "IntegrityReport",
    "InvalidRecord",
    "IoFailure",
    "Keyring",
    "LedgerStore",
    "MalformedPayload",
    "PendingCorrection",
    "QrPayload",
    "Registry",
    "SignerUnknown",
    "SigningKey",
    "Status",
    "TornTail",
    "Unauthorized",
    "UnknownCertificate",
    "UnsupportedVersion",
    "VerificationResult",
    "append_block",
    "compute_block_hash",
    "decode_payload",
    "digest_from_hex",
    "digest_to_hex",
    "encode_payload",
    "get_block",
    "make_genesis",
    "open_ledger",
    "sha256",
    "verify_chain",
]
