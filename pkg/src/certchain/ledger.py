"""Blocks, content addressing, per-chain append, and integrity verification.

A block is a signed envelope on one of the two chains.  Its identity is the
SHA-256 digest of the canonical JSON of its header; the header binds the
previous block's hash and the payload's hash, so altering any stored byte
breaks a hash link somewhere and is detectable by `verify_chain`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from .canonical import canonical_json
from .errors import ClockRegression, MalformedPayload, SignerUnknown
from .keys import Keyring, SigningKey, verify_signature

DIGEST_LEN = 32
ZERO_DIGEST = b"\x00" * DIGEST_LEN
GENESIS_TIMESTAMP = 0

_HEX_DIGITS = set("0123456789abcdef")


class ChainId(str, Enum):
    CERT = "CERT"
    CORR = "CORR"


def sha256(data: bytes) -> bytes:
    """FIPS 180-4 SHA-256 digest of `data`."""
    return hashlib.sha256(data).digest()


def digest_to_hex(digest: bytes) -> str:
    """Canonical text form: 64 lowercase hex characters."""
    if len(digest) != DIGEST_LEN:
        raise ValueError(f"digest must be {DIGEST_LEN} bytes, got {len(digest)}")
    return digest.hex()


def digest_from_hex(text: str) -> bytes:
    """Parse the canonical text form; case-insensitive on input."""
    if len(text) != 2 * DIGEST_LEN or not set(text.lower()) <= _HEX_DIGITS:
        raise MalformedPayload(f"not a 64-hex-character digest: {text!r}")
    return bytes.fromhex(text)


@dataclass(frozen=True)
class BlockHeader:
    chain_id: ChainId
    height: int
    timestamp: int
    prev_hash: bytes
    payload_hash: bytes

    def to_dict(self) -> dict:
        return {
            "chain_id": self.chain_id.value,
            "height": self.height,
            "payload_hash": digest_to_hex(self.payload_hash),
            "prev_hash": digest_to_hex(self.prev_hash),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BlockHeader":
        return cls(
            chain_id=ChainId(data["chain_id"]),
            height=data["height"],
            timestamp=data["timestamp"],
            prev_hash=digest_from_hex(data["prev_hash"]),
            payload_hash=digest_from_hex(data["payload_hash"]),
        )


def compute_block_hash(header: BlockHeader) -> bytes:
    """SHA-256 of the canonical JSON serialization of the header."""
    return sha256(canonical_json(header.to_dict()))


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    payload: bytes
    signer_key_id: str
    signature: bytes

    @cached_property
    def block_hash(self) -> bytes:
        # Derived, never stored inside the block.
        return compute_block_hash(self.header)


def genesis_payload(chain_id: ChainId) -> bytes:
    return canonical_json({"chain": chain_id.value, "format": 1})


def make_genesis(chain_id: ChainId, signer: SigningKey) -> Block:
    """Fixed height-0 anchor block, signed by the bootstrap admin key."""
    payload = genesis_payload(chain_id)
    header = BlockHeader(
        chain_id=chain_id,
        height=0,
        timestamp=GENESIS_TIMESTAMP,
        prev_hash=ZERO_DIGEST,
        payload_hash=sha256(payload),
    )
    return Block(
        header=header,
        payload=payload,
        signer_key_id=signer.key_id,
        signature=signer.sign(compute_block_hash(header)),
    )


@dataclass(frozen=True)
class ChainState:
    """Immutable snapshot of one chain: blocks plus a hash -> position index.

    Appends return a fresh state; readers keep working against the snapshot
    they grabbed, so a reader never sees a block without its predecessor.
    """

    chain_id: ChainId
    blocks: tuple[Block, ...]
    index: Mapping[bytes, int]

    @classmethod
    def from_blocks(cls, chain_id: ChainId, blocks: Sequence[Block]) -> "ChainState":
        index = {block.block_hash: pos for pos, block in enumerate(blocks)}
        return cls(chain_id=chain_id, blocks=tuple(blocks), index=MappingProxyType(index))

    @classmethod
    def genesis(cls, chain_id: ChainId, signer: SigningKey) -> "ChainState":
        return cls.from_blocks(chain_id, [make_genesis(chain_id, signer)])

    @property
    def height(self) -> int:
        return len(self.blocks) - 1

    @property
    def tip(self) -> Block:
        return self.blocks[-1]

    @property
    def tip_hash(self) -> bytes:
        return self.tip.block_hash

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)


def append_block(
    state: ChainState,
    payload: bytes,
    signer: SigningKey,
    timestamp: int,
    keyring: Keyring,
) -> tuple[Block, ChainState]:
    """Append a signed block at the tip; returns the block and advanced state.

    Given identical (tip, payload, signer, timestamp) the result is
    byte-identical: Ed25519 signing is deterministic.
    """
    registered = keyring.get(signer.key_id)
    if registered is None or registered.public_key != signer.public_key:
        raise SignerUnknown(f"key_id not registered: {signer.key_id}")
    if timestamp < state.tip.header.timestamp:
        raise ClockRegression(
            f"timestamp {timestamp} precedes predecessor {state.tip.header.timestamp}"
        )
    header = BlockHeader(
        chain_id=state.chain_id,
        height=state.height + 1,
        timestamp=timestamp,
        prev_hash=state.tip_hash,
        payload_hash=sha256(payload),
    )
    block = Block(
        header=header,
        payload=payload,
        signer_key_id=signer.key_id,
        signature=signer.sign(compute_block_hash(header)),
    )
    index = dict(state.index)
    index[block.block_hash] = len(state.blocks)
    next_state = ChainState(
        chain_id=state.chain_id,
        blocks=state.blocks + (block,),
        index=MappingProxyType(index),
    )
    return block, next_state


def get_block(state: ChainState, block_hash: bytes) -> Block | None:
    pos = state.index.get(block_hash)
    return state.blocks[pos] if pos is not None else None


class FailureKind(str, Enum):
    BAD_GENESIS = "BadGenesis"
    BROKEN_LINK = "BrokenLink"
    PAYLOAD_MISMATCH = "PayloadMismatch"
    BAD_SIGNATURE = "BadSignature"


@dataclass(frozen=True)
class IntegrityReport:
    ok: bool
    first_failure: int | None = None
    kind: FailureKind | None = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "first_failure": self.first_failure,
            "kind": self.kind.value if self.kind else None,
        }


def _genesis_ok(block: Block, chain_id: ChainId) -> bool:
    h = block.header
    return (
        h.chain_id == chain_id
        and h.height == 0
        and h.prev_hash == ZERO_DIGEST
        and h.timestamp == GENESIS_TIMESTAMP
        and block.payload == genesis_payload(chain_id)
    )


def verify_chain(
    blocks: Sequence[Block],
    keyring: Keyring,
    chain_id: ChainId | None = None,
) -> IntegrityReport:
    """Check every link, payload hash, and signature from genesis to tip.

    Per-block check order is fixed (BadGenesis, BrokenLink, PayloadMismatch,
    BadSignature) so the reported kind is deterministic.  Failures are report
    values, not exceptions.  Pass `chain_id` to also pin which chain the
    genesis block must anchor.
    """
    if not blocks:
        return IntegrityReport(ok=False, first_failure=0, kind=FailureKind.BAD_GENESIS)
    if chain_id is None:
        chain_id = blocks[0].header.chain_id
    for pos, block in enumerate(blocks):
        if pos == 0:
            if not _genesis_ok(block, chain_id):
                return IntegrityReport(False, 0, FailureKind.BAD_GENESIS)
        else:
            prev = blocks[pos - 1]
            if (
                block.header.chain_id != chain_id
                or block.header.height != pos
                or block.header.prev_hash != prev.block_hash
            ):
                return IntegrityReport(False, pos, FailureKind.BROKEN_LINK)
        if block.header.payload_hash != sha256(block.payload):
            return IntegrityReport(False, pos, FailureKind.PAYLOAD_MISMATCH)
        cred = keyring.get(block.signer_key_id)
        if cred is None or not verify_signature(
            cred.public_key, compute_block_hash(block.header), block.signature
        ):
            return IntegrityReport(False, pos, FailureKind.BAD_SIGNATURE)
    return IntegrityReport(ok=True)
