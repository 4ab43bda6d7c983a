"""QR-transportable payload text for block hashes.

Grammar (bit-exact): ``certchain://v1/<64 hex chars>``.  Hex is accepted
case-insensitively on decode and emitted lowercase on encode.  A bare 64-hex
string is also accepted, covering the manual-typing path.  The codec owns
only the payload text; rasterizing an image is the caller's business.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedPayload, UnsupportedVersion
from .ledger import digest_from_hex, digest_to_hex

SCHEME_PREFIX = "certchain://"
CURRENT_VERSION = 1

_PAYLOAD_RE = re.compile(r"\Acertchain://v(0|[1-9][0-9]*)/([0-9a-fA-F]*)\Z")
_BARE_HEX_RE = re.compile(r"\A[0-9a-fA-F]{64}\Z")


@dataclass(frozen=True)
class QrPayload:
    version: int
    certificate_hash: bytes

    @property
    def text(self) -> str:
        return f"{SCHEME_PREFIX}v{self.version}/{digest_to_hex(self.certificate_hash)}"


def encode_payload(certificate_hash: bytes) -> str:
    """`certchain://v1/` + lowercase hex of the hash (always 79 chars)."""
    return QrPayload(CURRENT_VERSION, certificate_hash).text


def decode_payload(text: str) -> QrPayload:
    """Parse a payload URI or a bare 64-hex string (manual-entry path)."""
    if _BARE_HEX_RE.match(text):
        return QrPayload(CURRENT_VERSION, digest_from_hex(text))
    match = _PAYLOAD_RE.match(text)
    if match is None:
        raise MalformedPayload(f"not a certchain payload: {text!r}")
    version = int(match.group(1))
    if version != CURRENT_VERSION:
        raise UnsupportedVersion(f"payload version v{version} is not supported")
    hex_part = match.group(2)
    if len(hex_part) != 64:
        raise MalformedPayload(
            f"hash part must be 64 hex characters, got {len(hex_part)}"
        )
    return QrPayload(version, digest_from_hex(hex_part))
