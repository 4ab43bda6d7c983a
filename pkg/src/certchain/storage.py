"""Durable append-only persistence with crash-safe replay.

File layout in a data directory:

    cert.chain     framed blocks of the certificate chain
    corr.chain     framed blocks of the correction chain
    keyring.json   admin credentials

Frame format: ``[4-byte big-endian length][body][4-byte CRC32 of body]``.
The body is the block's canonical JSON, human-auditable with standard tools.
CRC32 catches torn writes and low-level corruption independently of the
cryptographic layer; the hash/signature layer catches everything smarter.

Recovery rules on open: a torn *final* frame is truncated and reported, any
earlier damage is fatal.  A certificate block whose ``supersedes`` marker has
no matching correction block is reported as a pending correction (crash
between the two appends of a correction).
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

from .canonical import canonical_json
from .errors import (
    AlreadyInitialized,
    BadGenesis,
    CorruptLedger,
    HeightGap,
    IoFailure,
)
from .keys import Keyring, SigningKey, load_keyring, save_keyring
from .ledger import (
    Block,
    BlockHeader,
    ChainId,
    ChainState,
    FailureKind,
    IntegrityReport,
    digest_to_hex,
    verify_chain,
)
from .records import parse_certificate_payload, parse_correction_payload

_LEN = struct.Struct(">I")
MAX_FRAME_BYTES = 1 << 24

CERT_FILE = "cert.chain"
CORR_FILE = "corr.chain"
KEYRING_FILE = "keyring.json"
BOOTSTRAP_KEY_FILE = "bootstrap.key"


def encode_block(block: Block) -> bytes:
    """Canonical at-rest encoding: header JSON wrapped with payload and signature."""
    try:
        payload_text = block.payload.decode("utf-8")
    except UnicodeDecodeError:
        raise ValueError("payloads must be canonical JSON text (valid UTF-8)") from None
    return canonical_json(
        {
            "header": block.header.to_dict(),
            "payload": payload_text,
            "signature": block.signature.hex(),
            "signer_key_id": block.signer_key_id,
        }
    )


def decode_block(body: bytes) -> Block:
    data = json.loads(body.decode("utf-8"))
    block = Block(
        header=BlockHeader.from_dict(data["header"]),
        payload=data["payload"].encode("utf-8"),
        signer_key_id=data["signer_key_id"],
        signature=bytes.fromhex(data["signature"]),
    )
    if encode_block(block) != body:
        raise ValueError("block body is not canonical")
    return block


def frame(body: bytes) -> bytes:
    return _LEN.pack(len(body)) + body + _LEN.pack(zlib.crc32(body))


@dataclass(frozen=True)
class TornTail:
    """Trailing partial frame dropped during replay."""

    offset: int
    dropped_bytes: int


@dataclass(frozen=True)
class PendingCorrection:
    """Corrected certificate whose correction block never landed."""

    certificate_hash: bytes
    supersedes: bytes
    height: int

    def to_dict(self) -> dict:
        return {
            "certificate_hash": digest_to_hex(self.certificate_hash),
            "supersedes": digest_to_hex(self.supersedes),
            "height": self.height,
        }


def read_frames(data: bytes) -> tuple[list[tuple[int, bytes]], TornTail | None]:
    """Split a ledger file into (offset, body) frames.

    Returns the frames plus a TornTail if the file ends in a partial frame.
    Raises CorruptLedger for mid-file damage (CRC mismatch, absurd length,
    or a torn frame that is not the last thing in the file).
    """
    frames: list[tuple[int, bytes]] = []
    pos = 0
    total = len(data)
    while pos < total:
        if pos + _LEN.size > total:
            return frames, TornTail(offset=pos, dropped_bytes=total - pos)
        (length,) = _LEN.unpack_from(data, pos)
        end = pos + _LEN.size + length + _LEN.size
        if end > total:
            # Incomplete frame at EOF is a torn write; anywhere else the
            # caller would have failed CRC before reaching it.
            return frames, TornTail(offset=pos, dropped_bytes=total - pos)
        if length > MAX_FRAME_BYTES:
            raise CorruptLedger(f"frame {len(frames)}: length exceeds maximum", offset=pos)
        body = data[pos + _LEN.size : pos + _LEN.size + length]
        (crc,) = _LEN.unpack_from(data, pos + _LEN.size + length)
        if zlib.crc32(body) != crc:
            raise CorruptLedger(f"frame {len(frames)}: CRC mismatch", offset=pos)
        frames.append((pos, body))
        pos = end
    return frames, None


@dataclass
class LoadedChain:
    state: ChainState
    torn_tail: TornTail | None
    report: IntegrityReport


def open_ledger(
    path: Path,
    chain_id: ChainId,
    keyring: Keyring,
    verify: bool = True,
) -> LoadedChain:
    """Replay all frames and reconstruct the chain state.

    With `verify=True` a failed integrity check raises (CorruptLedger or
    BadGenesis); with `verify=False` the report is returned for the caller
    to surface, which is how audit and the service expose tampering.
    """
    data = path.read_bytes()
    frames, torn = read_frames(data)
    blocks: list[Block] = []
    for offset, body in frames:
        try:
            block = decode_block(body)
        except (ValueError, KeyError) as exc:
            raise CorruptLedger(
                f"frame {len(blocks)}: undecodable block: {exc}", offset=offset
            ) from None
        if block.header.chain_id != chain_id:
            raise CorruptLedger(
                f"frame {len(blocks)}: block for chain {block.header.chain_id.value} "
                f"in {chain_id.value} ledger",
                offset=offset,
            )
        if block.header.height != len(blocks):
            raise CorruptLedger(
                f"frame {len(blocks)}: unexpected height {block.header.height}",
                offset=offset,
            )
        blocks.append(block)
    if not blocks:
        raise CorruptLedger("ledger holds no complete frame", offset=0)
    report = verify_chain(blocks, keyring, chain_id=chain_id)
    if verify and not report.ok:
        if report.kind is FailureKind.BAD_GENESIS:
            raise BadGenesis(f"{path}: genesis block does not match the fixed anchor")
        raise CorruptLedger(
            f"{path}: {report.kind.value} at height {report.first_failure}"
        )
    return LoadedChain(
        state=ChainState.from_blocks(chain_id, blocks),
        torn_tail=torn,
        report=report,
    )


def find_pending_corrections(
    cert_state: ChainState, corr_state: ChainState
) -> list[PendingCorrection]:
    referenced = set()
    for block in corr_state.blocks[1:]:
        correction = parse_correction_payload(block.payload)
        if correction is not None:
            referenced.add(correction.new_certificate_hash)
    pending = []
    for pos, block in enumerate(cert_state.blocks[1:], start=1):
        parsed = parse_certificate_payload(block.payload)
        if parsed is None:
            continue
        _, supersedes = parsed
        if supersedes is not None and block.block_hash not in referenced:
            pending.append(
                PendingCorrection(
                    certificate_hash=block.block_hash,
                    supersedes=supersedes,
                    height=pos,
                )
            )
    return pending


class LedgerWriter:
    """Single append handle for one chain file (advisory-locked)."""

    def __init__(self, path: Path, height: int):
        self.path = path
        self.height = height
        self._fd = os.open(path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        try:
            import fcntl

            fcntl.flock(self._fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            os.close(self._fd)
            raise IoFailure(f"another writer holds {path}") from None

    def append_durable(self, block: Block) -> None:
        """Write one frame and flush it to stable storage before returning."""
        if block.header.height != self.height + 1:
            raise HeightGap(
                f"append height {block.header.height}, ledger tip {self.height}"
            )
        data = frame(encode_block(block))
        try:
            os.write(self._fd, data)
            os.fsync(self._fd)
        except OSError as exc:
            raise IoFailure(f"append to {self.path} failed: {exc}") from exc
        self.height += 1

    def close(self) -> None:
        os.close(self._fd)


class LedgerStore:
    """The two chain files plus keyring, opened together.

    One writer per store; concurrent readers open their own snapshots with
    `LedgerStore.open(..., writable=False)`.
    """

    def __init__(
        self,
        data_dir: Path,
        keyring: Keyring,
        cert: LoadedChain,
        corr: LoadedChain,
        writable: bool,
        keyring_path: Path | None = None,
    ):
        self.data_dir = data_dir
        self.keyring_path = keyring_path or data_dir / KEYRING_FILE
        self.keyring = keyring
        self.cert = cert
        self.corr = corr
        self.pending_corrections = find_pending_corrections(cert.state, corr.state)
        self._writers: dict[ChainId, LedgerWriter] = {}
        if writable:
            self._writers[ChainId.CERT] = LedgerWriter(
                data_dir / CERT_FILE, cert.state.height
            )
            self._writers[ChainId.CORR] = LedgerWriter(
                data_dir / CORR_FILE, corr.state.height
            )

    @staticmethod
    def is_initialized(data_dir: Path) -> bool:
        return (data_dir / CERT_FILE).exists() or (data_dir / CORR_FILE).exists()

    @classmethod
    def init(cls, data_dir: Path, bootstrap: SigningKey | None = None) -> "LedgerStore":
        """Create genesis files and the bootstrap keyring in `data_dir`."""
        from .ledger import make_genesis

        if cls.is_initialized(data_dir):
            raise AlreadyInitialized(f"{data_dir} already holds a certchain store")
        data_dir.mkdir(parents=True, exist_ok=True)
        if bootstrap is None:
            bootstrap = SigningKey.generate("bootstrap")
        keyring = Keyring(bootstrap_key_id=bootstrap.key_id)
        keyring.add(bootstrap.credential(display_name="bootstrap admin"))
        save_keyring(data_dir / KEYRING_FILE, keyring)
        for chain_id, name in ((ChainId.CERT, CERT_FILE), (ChainId.CORR, CORR_FILE)):
            genesis = make_genesis(chain_id, bootstrap)
            (data_dir / name).write_bytes(frame(encode_block(genesis)))
            fd = os.open(data_dir / name, os.O_RDONLY)
            try:
                os.fsync(fd)
            finally:
                os.close(fd)
        return cls.open(data_dir)

    @classmethod
    def open(
        cls,
        data_dir: Path,
        verify: bool = True,
        writable: bool = True,
        keyring_path: Path | None = None,
    ) -> "LedgerStore":
        keyring = load_keyring(keyring_path or data_dir / KEYRING_FILE)
        cert = open_ledger(data_dir / CERT_FILE, ChainId.CERT, keyring, verify=verify)
        corr = open_ledger(data_dir / CORR_FILE, ChainId.CORR, keyring, verify=verify)
        if writable:
            for loaded, name in ((cert, CERT_FILE), (corr, CORR_FILE)):
                if loaded.torn_tail is not None:
                    path = data_dir / name
                    with open(path, "r+b") as f:
                        f.truncate(loaded.torn_tail.offset)
                        f.flush()
                        os.fsync(f.fileno())
        return cls(
            data_dir, keyring, cert, corr, writable=writable, keyring_path=keyring_path
        )

    def append_durable(self, block: Block) -> None:
        self._writers[block.header.chain_id].append_durable(block)

    def save_keyring(self) -> None:
        save_keyring(self.keyring_path, self.keyring)

    def close(self) -> None:
        for writer in self._writers.values():
            writer.close()
        self._writers.clear()
