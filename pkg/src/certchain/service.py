"""HTTP facade: public verification, admin-only issuance and correction.

Writes carry a detached signature instead of a session: the client signs
``sha256(method || path || timestamp || body)`` with its admin key and sends
``X-Key-Id``, ``X-Timestamp`` (Unix seconds), and ``X-Signature`` (128 hex
chars) headers.  Requests outside the clock-skew window, or replaying a
(key, timestamp, body) triple already seen inside it, are rejected.

Verification outcomes are domain answers, not transport errors: GET
/v1/verify returns 200 with status valid/superseded/not_found alike.
"""

from __future__ import annotations

import threading
import time
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .errors import (
    AlreadyCorrected,
    InconsistentLedger,
    InvalidRecord,
    MalformedPayload,
    UnknownCertificate,
    UnsupportedVersion,
)
from .keys import SigningKey, verify_signature
from .ledger import ChainId, digest_to_hex, sha256
from .qr import decode_payload, encode_payload
from .records import CertificateRecord, RECORD_FIELDS
from .registry import Registry

DEFAULT_CLOCK_SKEW = 300
MAX_PAGE_LIMIT = 500


class _ApiError(Exception):
    def __init__(self, status_code: int, code: str, message: str, **extra):
        self.status_code = status_code
        self.body = {"code": code, "message": message, **extra}
        super().__init__(message)


def signing_message(method: str, path: str, timestamp: int, body: bytes) -> bytes:
    """The 32-byte message an admin signs for a write request."""
    return sha256(method.upper().encode() + path.encode() + str(timestamp).encode() + body)


class _ReplayCache:
    """Remembers (key_id, timestamp, body hash) triples inside the skew window."""

    def __init__(self, window: int):
        self.window = window
        self._seen: dict[tuple[str, int, bytes], int] = {}
        self._lock = threading.Lock()

    def check_and_store(self, key_id: str, timestamp: int, body_hash: bytes, now: int) -> bool:
        triple = (key_id, timestamp, body_hash)
        with self._lock:
            cutoff = now - self.window
            for old in [t for t, ts in self._seen.items() if ts < cutoff]:
                del self._seen[old]
            if triple in self._seen:
                return False
            self._seen[triple] = timestamp
            return True


def create_app(
    registry: Registry,
    writer_key: SigningKey,
    clock_skew: int = DEFAULT_CLOCK_SKEW,
    cors_origins: list[str] | None = None,
    clock: Callable[[], int] | None = None,
) -> FastAPI:
    """Build the service around a registry.

    `writer_key` signs the blocks appended on behalf of authenticated
    admins; per-request signatures cannot cover a block hash that depends
    on the tip, so the ledger writer holds its own registered key.
    """
    now = clock or (lambda: int(time.time()))
    replays = _ReplayCache(clock_skew)
    app = FastAPI(title="certchain", docs_url=None, redoc_url=None)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(_ApiError)
    async def api_error_handler(_request: Request, exc: _ApiError):
        return JSONResponse(status_code=exc.status_code, content=exc.body)

    @app.exception_handler(InconsistentLedger)
    async def inconsistent_handler(_request: Request, exc: InconsistentLedger):
        return JSONResponse(
            status_code=500, content={"code": "inconsistent_ledger", "message": str(exc)}
        )

    async def authorize_write(request: Request) -> bytes:
        body = await request.body()
        key_id = request.headers.get("x-key-id")
        timestamp_raw = request.headers.get("x-timestamp")
        signature_hex = request.headers.get("x-signature")
        if not key_id or not timestamp_raw or not signature_hex:
            raise _ApiError(401, "missing_auth", "request is not signed")
        cred = registry.keyring.get(key_id)
        if cred is None:
            raise _ApiError(401, "unknown_key", f"key_id {key_id!r} is not registered")
        if not cred.active:
            raise _ApiError(401, "inactive_key", f"key_id {key_id!r} is deactivated")
        try:
            timestamp = int(timestamp_raw)
        except ValueError:
            raise _ApiError(401, "stale_timestamp", "timestamp is not an integer") from None
        if abs(now() - timestamp) > clock_skew:
            raise _ApiError(
                401, "stale_timestamp", f"timestamp outside the {clock_skew}s window"
            )
        try:
            signature = bytes.fromhex(signature_hex)
        except ValueError:
            raise _ApiError(401, "bad_signature", "signature is not valid hex") from None
        message = signing_message(request.method, request.url.path, timestamp, body)
        if not verify_signature(cred.public_key, message, signature):
            raise _ApiError(401, "bad_signature", "signature does not verify")
        if not replays.check_and_store(key_id, timestamp, sha256(body), now()):
            raise _ApiError(401, "replayed_request", "request was already accepted")
        return body

    def parse_record(data: object) -> CertificateRecord:
        if not isinstance(data, dict):
            raise _ApiError(422, "invalid_record", "certificate must be a JSON object")
        unknown = set(data) - set(RECORD_FIELDS)
        if unknown:
            field = sorted(unknown)[0]
            raise _ApiError(422, "unknown_field", f"unknown field {field!r}", field=field)
        missing = [f for f in RECORD_FIELDS if f != "extras" and f not in data]
        if missing:
            raise _ApiError(
                422, "invalid_record", f"missing field {missing[0]!r}", field=missing[0]
            )
        if not isinstance(data.get("issued_at", 0), int):
            raise _ApiError(422, "invalid_record", "issued_at must be an integer", field="issued_at")
        record = CertificateRecord.from_dict(data)
        try:
            record.validate()
        except InvalidRecord as exc:
            raise _ApiError(422, "invalid_record", str(exc), field=exc.field) from None
        return record

    async def parse_json_body(request: Request, body: bytes) -> dict:
        import json

        try:
            data = json.loads(body)
        except ValueError:
            raise _ApiError(422, "invalid_record", "body is not valid JSON") from None
        if not isinstance(data, dict):
            raise _ApiError(422, "invalid_record", "body must be a JSON object")
        return data

    @app.post("/v1/certificates", status_code=201)
    async def post_certificate(request: Request):
        body = await authorize_write(request)
        record = parse_record(await parse_json_body(request, body))
        certificate_hash = registry.issue_certificate(record, writer_key, now())
        return {
            "certificate_hash": digest_to_hex(certificate_hash),
            "qr_payload": encode_payload(certificate_hash),
        }

    @app.post("/v1/corrections", status_code=201)
    async def post_correction(request: Request):
        body = await authorize_write(request)
        data = await parse_json_body(request, body)
        unknown = set(data) - {"old_certificate_hash", "certificate", "reason"}
        if unknown:
            field = sorted(unknown)[0]
            raise _ApiError(422, "unknown_field", f"unknown field {field!r}", field=field)
        for required in ("old_certificate_hash", "certificate"):
            if required not in data:
                raise _ApiError(
                    422, "invalid_record", f"missing field {required!r}", field=required
                )
        try:
            old_hash = decode_payload(str(data["old_certificate_hash"])).certificate_hash
        except (MalformedPayload, UnsupportedVersion) as exc:
            raise _ApiError(
                422, "invalid_record", str(exc), field="old_certificate_hash"
            ) from None
        record = parse_record(data["certificate"])
        reason = str(data.get("reason", ""))
        try:
            new_hash, corr_hash = registry.correct_certificate(
                old_hash, record, writer_key, reason, now()
            )
        except UnknownCertificate as exc:
            raise _ApiError(404, "unknown_certificate", str(exc)) from None
        except AlreadyCorrected as exc:
            raise _ApiError(
                409,
                "already_corrected",
                str(exc),
                latest_hash=digest_to_hex(registry.resolve_latest(old_hash)),
            ) from None
        return {
            "new_certificate_hash": digest_to_hex(new_hash),
            "correction_block_hash": digest_to_hex(corr_hash),
        }

    @app.get("/v1/verify/{query:path}")
    async def get_verify(query: str):
        try:
            payload = decode_payload(query)
        except (MalformedPayload, UnsupportedVersion) as exc:
            raise _ApiError(400, "malformed_payload", str(exc)) from None
        result = registry.authenticate(payload.certificate_hash)
        return result.to_dict()

    @app.get("/v1/chains/verify")
    async def get_chains_verify():
        reports = registry.verify()
        return {
            "cert": reports[ChainId.CERT].to_dict(),
            "corr": reports[ChainId.CORR].to_dict(),
            "pending_corrections": [p.to_dict() for p in registry.pending_corrections()],
        }

    @app.get("/v1/chains/{chain}/blocks")
    async def get_blocks(chain: str, request: Request):
        if chain not in ("cert", "corr"):
            raise _ApiError(404, "unknown_chain", f"no chain named {chain!r}")
        params = request.query_params
        try:
            start = int(params.get("from", "0"))
            limit = int(params.get("limit", "100"))
        except ValueError:
            raise _ApiError(400, "bad_pagination", "from and limit must be integers") from None
        if start < 0 or limit < 1 or limit > MAX_PAGE_LIMIT:
            raise _ApiError(
                400, "bad_pagination", f"need from >= 0 and 1 <= limit <= {MAX_PAGE_LIMIT}"
            )
        state = registry.chain(ChainId.CERT if chain == "cert" else ChainId.CORR)
        page = state.blocks[start : start + limit]
        return {
            "chain": chain,
            "from": start,
            "tip_height": state.height,
            "blocks": [
                {
                    "block_hash": digest_to_hex(block.block_hash),
                    "header": block.header.to_dict(),
                    "payload": block.payload.decode("utf-8"),
                    "signer_key_id": block.signer_key_id,
                    "signature": block.signature.hex(),
                }
                for block in page
            ],
        }

    return app
