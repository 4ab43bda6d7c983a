"""Certificate and correction payloads, and the verification result type.

Payloads on the chains are canonical-JSON envelopes tagged with a ``kind``:

- CERT chain: ``{"kind": "certificate", "record": {...}}``, plus a
  ``supersedes`` hash when the record replaces an earlier block.  The
  in-band supersedes marker is what lets crash recovery spot a corrected
  certificate whose correction block never landed.
- CORR chain: ``{"kind": "correction", "old_certificate_hash": ...,
  "new_certificate_hash": ..., "reason": ..., "corrected_at": ...}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Mapping

from .canonical import canonical_json, parse_json
from .errors import InvalidRecord
from .ledger import digest_from_hex, digest_to_hex

_REQUIRED_NONEMPTY = ("serial", "student_name", "student_id", "degree_title", "institution_id")
RECORD_FIELDS = (
    "serial",
    "student_name",
    "student_id",
    "degree_title",
    "major",
    "grade",
    "graduation_date",
    "institution_id",
    "issued_at",
    "extras",
)


@dataclass(frozen=True)
class CertificateRecord:
    """The academic credential carried by a CERT-chain block."""

    serial: str
    student_name: str
    student_id: str
    degree_title: str
    major: str
    grade: str
    graduation_date: str
    institution_id: str
    issued_at: int
    extras: Mapping[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        for name in _REQUIRED_NONEMPTY:
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise InvalidRecord(name)
        for name in ("major", "grade", "graduation_date"):
            if not isinstance(getattr(self, name), str):
                raise InvalidRecord(name)
        try:
            date.fromisoformat(self.graduation_date)
        except ValueError:
            raise InvalidRecord("graduation_date", "graduation_date is not a valid calendar date") from None
        if not isinstance(self.issued_at, int) or isinstance(self.issued_at, bool) or self.issued_at < 0:
            raise InvalidRecord("issued_at")
        for key, value in self.extras.items():
            if not isinstance(key, str) or not isinstance(value, str):
                raise InvalidRecord("extras", "extras must map strings to strings")

    def to_dict(self) -> dict:
        data = {name: getattr(self, name) for name in RECORD_FIELDS[:-1]}
        data["extras"] = dict(self.extras)
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "CertificateRecord":
        kwargs = {name: data[name] for name in RECORD_FIELDS[:-1]}
        return cls(extras=dict(data.get("extras", {})), **kwargs)


def certificate_payload(record: CertificateRecord, supersedes: bytes | None = None) -> bytes:
    envelope: dict = {"kind": "certificate", "record": record.to_dict()}
    if supersedes is not None:
        envelope["supersedes"] = digest_to_hex(supersedes)
    return canonical_json(envelope)


def parse_certificate_payload(payload: bytes) -> tuple[CertificateRecord, bytes | None] | None:
    """Decode a CERT-chain payload; None if it is not a certificate envelope."""
    try:
        data = parse_json(payload)
    except ValueError:
        return None
    if not isinstance(data, dict) or data.get("kind") != "certificate":
        return None
    record = CertificateRecord.from_dict(data["record"])
    supersedes = data.get("supersedes")
    return record, (digest_from_hex(supersedes) if supersedes is not None else None)


@dataclass(frozen=True)
class CorrectionRecord:
    """Old-hash -> new-hash supersession pair stored on the CORR chain."""

    old_certificate_hash: bytes
    new_certificate_hash: bytes
    reason: str
    corrected_at: int


def correction_payload(record: CorrectionRecord) -> bytes:
    return canonical_json(
        {
            "kind": "correction",
            "old_certificate_hash": digest_to_hex(record.old_certificate_hash),
            "new_certificate_hash": digest_to_hex(record.new_certificate_hash),
            "reason": record.reason,
            "corrected_at": record.corrected_at,
        }
    )


def parse_correction_payload(payload: bytes) -> CorrectionRecord | None:
    """Decode a CORR-chain payload; None if it is not a correction envelope."""
    try:
        data = parse_json(payload)
    except ValueError:
        return None
    if not isinstance(data, dict) or data.get("kind") != "correction":
        return None
    return CorrectionRecord(
        old_certificate_hash=digest_from_hex(data["old_certificate_hash"]),
        new_certificate_hash=digest_from_hex(data["new_certificate_hash"]),
        reason=data["reason"],
        corrected_at=data["corrected_at"],
    )


class Status(str, Enum):
    VALID = "valid"
    SUPERSEDED = "superseded"
    NOT_FOUND = "not_found"


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of authenticating a queried hash, with the traversal trail."""

    status: Status
    certificate: CertificateRecord | None
    certificate_hash: bytes | None
    trail: tuple[bytes, ...]

    def to_dict(self) -> dict:
        result = {
            "status": self.status.value,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "certificate_hash": (
                digest_to_hex(self.certificate_hash) if self.certificate_hash else None
            ),
            "trail": [digest_to_hex(h) for h in self.trail],
        }
        if self.status is Status.NOT_FOUND:
            result["message"] = "Certificate does not exist"
        return result
