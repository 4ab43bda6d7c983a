"""Issue, correct, and authenticate certificates over the two chains.

Writes are admin-only and serialized through one lock; reads run lock-free
against an immutable view that is swapped in one reference assignment, so a
correction's pair of appends is atomic to observers: nobody ever sees the
corrected certificate without its correction block.

Resolution follows corrections transitively with a visited-set guard, so a
hash that is two corrections stale still lands on the current record.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import (
    AlreadyCorrected,
    InconsistentLedger,
    InvalidRecord,
    Unauthorized,
    UnknownCertificate,
)
from .keys import AdminCredential, Keyring, SigningKey
from .ledger import (
    ChainId,
    ChainState,
    IntegrityReport,
    append_block,
    digest_to_hex,
    verify_chain,
)
from .records import (
    CertificateRecord,
    CorrectionRecord,
    Status,
    VerificationResult,
    certificate_payload,
    correction_payload,
    parse_certificate_payload,
    parse_correction_payload,
)
from .storage import LedgerStore, PendingCorrection


@dataclass(frozen=True)
class _CertEntry:
    record: CertificateRecord
    supersedes: bytes | None
    height: int


@dataclass(frozen=True)
class _View:
    """One consistent snapshot of both chains and their derived indexes."""

    cert: ChainState
    corr: ChainState
    certificates: Mapping[bytes, _CertEntry]
    corrections_by_old: Mapping[bytes, CorrectionRecord]
    corrections: tuple[CorrectionRecord, ...]


def _build_view(cert: ChainState, corr: ChainState) -> _View:
    certificates: dict[bytes, _CertEntry] = {}
    for pos, block in enumerate(cert.blocks[1:], start=1):
        parsed = parse_certificate_payload(block.payload)
        if parsed is not None:
            record, supersedes = parsed
            certificates[block.block_hash] = _CertEntry(record, supersedes, pos)
    corrections: list[CorrectionRecord] = []
    by_old: dict[bytes, CorrectionRecord] = {}
    for block in corr.blocks[1:]:
        correction = parse_correction_payload(block.payload)
        if correction is not None:
            corrections.append(correction)
            by_old.setdefault(correction.old_certificate_hash, correction)
    return _View(
        cert=cert,
        corr=corr,
        certificates=certificates,
        corrections_by_old=by_old,
        corrections=tuple(corrections),
    )


class Registry:
    """Admin-gated writes, public reads, over in-memory or durable chains."""

    def __init__(
        self,
        keyring: Keyring,
        cert: ChainState,
        corr: ChainState,
        store: LedgerStore | None = None,
    ):
        self.keyring = keyring
        self.store = store
        self._view = _build_view(cert, corr)
        self._write_lock = threading.Lock()

    @classmethod
    def in_memory(cls, bootstrap: SigningKey) -> "Registry":
        keyring = Keyring(bootstrap_key_id=bootstrap.key_id)
        keyring.add(bootstrap.credential(display_name="bootstrap admin"))
        return cls(
            keyring=keyring,
            cert=ChainState.genesis(ChainId.CERT, bootstrap),
            corr=ChainState.genesis(ChainId.CORR, bootstrap),
        )

    @classmethod
    def open(
        cls,
        data_dir: Path,
        verify: bool = True,
        writable: bool = True,
        keyring_path: Path | None = None,
    ) -> "Registry":
        store = LedgerStore.open(
            data_dir, verify=verify, writable=writable, keyring_path=keyring_path
        )
        return cls(
            keyring=store.keyring,
            cert=store.cert.state,
            corr=store.corr.state,
            store=store,
        )

    # -- read side -------------------------------------------------------

    @property
    def view(self) -> _View:
        return self._view

    def chain(self, chain_id: ChainId) -> ChainState:
        view = self._view
        return view.cert if chain_id is ChainId.CERT else view.corr

    def get_certificate(self, block_hash: bytes) -> CertificateRecord | None:
        entry = self._view.certificates.get(block_hash)
        return entry.record if entry else None

    def pending_corrections(self) -> list[PendingCorrection]:
        return list(self.store.pending_corrections) if self.store else []

    def verify(self) -> dict[ChainId, IntegrityReport]:
        view = self._view
        return {
            ChainId.CERT: verify_chain(view.cert.blocks, self.keyring, ChainId.CERT),
            ChainId.CORR: verify_chain(view.corr.blocks, self.keyring, ChainId.CORR),
        }

    def resolve_latest(self, queried_hash: bytes) -> bytes | None:
        """Terminal certificate hash after transitive correction-following."""
        view = self._view
        return self._resolve(view, queried_hash)[0]

    @staticmethod
    def _resolve(view: _View, queried_hash: bytes) -> tuple[bytes | None, list[bytes]]:
        trail = [queried_hash]
        current = queried_hash
        visited = {queried_hash}
        while True:
            correction = view.corrections_by_old.get(current)
            if correction is None:
                break
            current = correction.new_certificate_hash
            if current in visited:
                raise InconsistentLedger(
                    f"correction cycle through {digest_to_hex(current)}"
                )
            visited.add(current)
            trail.append(current)
        if current not in view.certificates:
            if len(trail) > 1:
                # A correction pointed here, so the ledger promised a
                # certificate that is missing: corruption, not absence.
                raise InconsistentLedger(
                    f"correction target {digest_to_hex(current)} absent from CERT chain"
                )
            return None, trail
        return current, trail

    def authenticate(self, queried_hash: bytes) -> VerificationResult:
        """Public check: Valid, Superseded (with trail), or NotFound."""
        view = self._view
        terminal, trail = self._resolve(view, queried_hash)
        if terminal is None:
            return VerificationResult(
                status=Status.NOT_FOUND,
                certificate=None,
                certificate_hash=None,
                trail=(queried_hash,),
            )
        entry = view.certificates[terminal]
        if len(trail) == 1:
            return VerificationResult(
                status=Status.VALID,
                certificate=entry.record,
                certificate_hash=terminal,
                trail=(queried_hash,),
            )
        return VerificationResult(
            status=Status.SUPERSEDED,
            certificate=entry.record,
            certificate_hash=terminal,
            trail=tuple(trail),
        )

    def list_corrections(self, certificate_hash: bytes) -> list[CorrectionRecord]:
        """Corrections touching the hash (as old or new), in chain order."""
        return [
            c
            for c in self._view.corrections
            if certificate_hash in (c.old_certificate_hash, c.new_certificate_hash)
        ]

    # -- write side ------------------------------------------------------

    def _authorize(self, issuer: SigningKey) -> None:
        cred = self.keyring.get(issuer.key_id)
        if cred is None or cred.public_key != issuer.public_key or not cred.active:
            raise Unauthorized(f"no active credential for key_id {issuer.key_id!r}")

    def issue_certificate(
        self, record: CertificateRecord, issuer: SigningKey, now: int
    ) -> bytes:
        """Append the record to the CERT chain; returns its block address."""
        self._authorize(issuer)
        record.validate()
        with self._write_lock:
            view = self._view
            block, cert = append_block(
                view.cert, certificate_payload(record), issuer, now, self.keyring
            )
            if self.store:
                self.store.append_durable(block)
            certificates = dict(view.certificates)
            certificates[block.block_hash] = _CertEntry(record, None, cert.height)
            self._view = _View(
                cert=cert,
                corr=view.corr,
                certificates=certificates,
                corrections_by_old=view.corrections_by_old,
                corrections=view.corrections,
            )
        return block.block_hash

    def correct_certificate(
        self,
        old_hash: bytes,
        corrected: CertificateRecord,
        issuer: SigningKey,
        reason: str,
        now: int,
    ) -> tuple[bytes, bytes]:
        """Append the corrected record to CERT and the old->new pair to CORR.

        Returns (new certificate hash, correction block hash).  The two
        appends publish as one snapshot swap, so readers see both or neither.
        """
        self._authorize(issuer)
        corrected.validate()
        with self._write_lock:
            view = self._view
            if old_hash not in view.certificates:
                raise UnknownCertificate(
                    f"{digest_to_hex(old_hash)} is not a certificate on the CERT chain"
                )
            existing = view.corrections_by_old.get(old_hash)
            if existing is not None:
                raise AlreadyCorrected(
                    digest_to_hex(old_hash),
                    digest_to_hex(existing.new_certificate_hash),
                )
            cert_block, cert = append_block(
                view.cert,
                certificate_payload(corrected, supersedes=old_hash),
                issuer,
                now,
                self.keyring,
            )
            correction = CorrectionRecord(
                old_certificate_hash=old_hash,
                new_certificate_hash=cert_block.block_hash,
                reason=reason,
                corrected_at=now,
            )
            corr_block, corr = append_block(
                view.corr, correction_payload(correction), issuer, now, self.keyring
            )
            if self.store:
                self.store.append_durable(cert_block)
                self.store.append_durable(corr_block)
            certificates = dict(view.certificates)
            certificates[cert_block.block_hash] = _CertEntry(
                corrected, old_hash, cert.height
            )
            corrections_by_old = dict(view.corrections_by_old)
            corrections_by_old[old_hash] = correction
            self._view = _View(
                cert=cert,
                corr=corr,
                certificates=certificates,
                corrections_by_old=corrections_by_old,
                corrections=view.corrections + (correction,),
            )
        return cert_block.block_hash, corr_block.block_hash

    def register_admin(self, credential: AdminCredential, super_admin: SigningKey) -> Keyring:
        """Add a credential; only the bootstrap key may provision admins."""
        self._require_bootstrap(super_admin)
        with self._write_lock:
            self.keyring.add(credential)
            if self.store:
                self.store.save_keyring()
        return self.keyring

    def deactivate_admin(self, key_id: str, super_admin: SigningKey) -> Keyring:
        """Deactivate a key: it keeps verifying old blocks, signs no new ones."""
        self._require_bootstrap(super_admin)
        if key_id == self.keyring.bootstrap_key_id:
            raise Unauthorized("cannot deactivate the bootstrap credential")
        with self._write_lock:
            self.keyring.deactivate(key_id)
            if self.store:
                self.store.save_keyring()
        return self.keyring

    def _require_bootstrap(self, super_admin: SigningKey) -> None:
        if super_admin.key_id != self.keyring.bootstrap_key_id:
            raise Unauthorized("admin management requires the bootstrap credential")
        cred = self.keyring.get(super_admin.key_id)
        if cred is None or cred.public_key != super_admin.public_key or not cred.active:
            raise Unauthorized("bootstrap credential mismatch")

    def close(self) -> None:
        if self.store:
            self.store.close()
