"""Canonical JSON serialization.

Hashing only works across implementations if every party derives the exact
same bytes from the same value, so the encoding is pinned down hard:

- object keys sorted by their UTF-8 bytes, no insignificant whitespace
- strings emitted as raw UTF-8; only `"`, `\\` and control characters
  (U+0000..U+001F) are escaped, controls uniformly as ``\\u00xx``
- integers in base 10 with no leading zeros
- floats are rejected outright (grades travel as strings)
"""

from __future__ import annotations

import json
from typing import Any

from .errors import CanonicalizationError

_ESCAPES = {'"': '\\"', "\\": "\\\\"}


def _encode_string(value: str) -> str:
    out = ['"']
    for ch in value:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _encode(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        raise CanonicalizationError("floating-point values are not canonical")
    elif isinstance(value, str):
        out.append(_encode_string(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        try:
            keys = sorted(value, key=lambda k: k.encode("utf-8"))
        except AttributeError:
            raise CanonicalizationError("object keys must be strings") from None
        for i, key in enumerate(keys):
            if i:
                out.append(",")
            out.append(_encode_string(key))
            out.append(":")
            _encode(value[key], out)
        out.append("}")
    else:
        raise CanonicalizationError(f"type {type(value).__name__} is not canonical")


def canonical_json(value: Any) -> bytes:
    """Serialize `value` to canonical JSON bytes."""
    out: list[str] = []
    _encode(value, out)
    return "".join(out).encode("utf-8")


def parse_json(data: bytes) -> Any:
    """Parse JSON bytes (the inverse direction places no canonical demands)."""
    return json.loads(data.decode("utf-8"))
