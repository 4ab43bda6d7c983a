"""Ed25519 signing keys, admin credentials, and the keyring.

Blocks are signed over their 32-byte block hash with Ed25519: deterministic,
64-byte signatures, verifiable by any third party holding the public key.
Key files on disk are JSON ``{key_id, secret_key, public_key}`` with the key
material base64-encoded, kept at mode 0600.
"""

from __future__ import annotations

import base64
import json
import os
from dataclasses import dataclass, replace
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric import ed25519

from .errors import DuplicateKeyId, Unauthorized

SIGNATURE_LEN = 64
PUBLIC_KEY_LEN = 32


@dataclass(frozen=True)
class AdminCredential:
    """Keyring entry: who may write, and the key their blocks verify under."""

    key_id: str
    public_key: bytes
    display_name: str = ""
    active: bool = True


@dataclass(frozen=True)
class SigningKey:
    """A key pair capable of signing blocks and requests."""

    key_id: str
    secret: bytes
    public_key: bytes

    @classmethod
    def generate(cls, key_id: str) -> "SigningKey":
        return cls.from_seed(key_id, os.urandom(32))

    @classmethod
    def from_seed(cls, key_id: str, seed: bytes) -> "SigningKey":
        priv = ed25519.Ed25519PrivateKey.from_private_bytes(seed)
        return cls(key_id=key_id, secret=seed, public_key=priv.public_key().public_bytes_raw())

    def sign(self, message: bytes) -> bytes:
        priv = ed25519.Ed25519PrivateKey.from_private_bytes(self.secret)
        return priv.sign(message)

    def credential(self, display_name: str = "", active: bool = True) -> AdminCredential:
        return AdminCredential(self.key_id, self.public_key, display_name, active)


def verify_signature(public_key: bytes, message: bytes, signature: bytes) -> bool:
    if len(signature) != SIGNATURE_LEN or len(public_key) != PUBLIC_KEY_LEN:
        return False
    try:
        ed25519.Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


class Keyring:
    """Registered admin credentials, including deactivated ones.

    Deactivated keys stay in the ring so historical blocks keep verifying;
    they just can't sign new ones (enforced by the registry).
    """

    def __init__(self, bootstrap_key_id: str):
        self.bootstrap_key_id = bootstrap_key_id
        self._entries: dict[str, AdminCredential] = {}

    def add(self, credential: AdminCredential) -> None:
        if credential.key_id in self._entries:
            raise DuplicateKeyId(f"key_id already registered: {credential.key_id}")
        self._entries[credential.key_id] = credential

    def deactivate(self, key_id: str) -> None:
        cred = self._entries.get(key_id)
        if cred is None:
            raise Unauthorized(f"unknown key_id: {key_id}")
        self._entries[key_id] = replace(cred, active=False)

    def get(self, key_id: str) -> AdminCredential | None:
        return self._entries.get(key_id)

    def __contains__(self, key_id: str) -> bool:
        return key_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def credentials(self) -> list[AdminCredential]:
        return list(self._entries.values())

    def to_dict(self) -> dict:
        return {
            "bootstrap_key_id": self.bootstrap_key_id,
            "admins": [
                {
                    "key_id": c.key_id,
                    "public_key": base64.b64encode(c.public_key).decode("ascii"),
                    "display_name": c.display_name,
                    "active": c.active,
                }
                for c in self._entries.values()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Keyring":
        ring = cls(bootstrap_key_id=data["bootstrap_key_id"])
        for entry in data["admins"]:
            ring.add(
                AdminCredential(
                    key_id=entry["key_id"],
                    public_key=base64.b64decode(entry["public_key"]),
                    display_name=entry.get("display_name", ""),
                    active=bool(entry["active"]),
                )
            )
        return ring


def save_keyring(path: Path, keyring: Keyring) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(keyring.to_dict(), indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def load_keyring(path: Path) -> Keyring:
    return Keyring.from_dict(json.loads(path.read_text(encoding="utf-8")))


def save_key_file(path: Path, key: SigningKey) -> None:
    data = {
        "key_id": key.key_id,
        "secret_key": base64.b64encode(key.secret).decode("ascii"),
        "public_key": base64.b64encode(key.public_key).decode("ascii"),
    }
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    try:
        os.write(fd, (json.dumps(data, indent=2) + "\n").encode("utf-8"))
    finally:
        os.close(fd)
    os.chmod(path, 0o600)


def load_key_file(path: Path) -> SigningKey:
    mode = os.stat(path).st_mode
    if mode & 0o077:
        raise PermissionError(f"key file {path} must not be group/world accessible")
    data = json.loads(path.read_text(encoding="utf-8"))
    key = SigningKey(
        key_id=data["key_id"],
        secret=base64.b64decode(data["secret_key"]),
        public_key=base64.b64decode(data["public_key"]),
    )
    derived = SigningKey.from_seed(key.key_id, key.secret)
    if derived.public_key != key.public_key:
        raise ValueError(f"key file {path}: public key does not match secret key")
    return key
