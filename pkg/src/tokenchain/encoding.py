"""Canonical byte encoding shared by hashing, signing and the journal.

Every hash and signature in the system is computed over the output of
:func:`canonical_encode`, so two structurally equal values always produce
identical bytes.  The encoding is JSON with three extra rules:

* map keys are sorted ascending by code point and no insignificant
  whitespace is emitted;
* unsigned integers are rendered as base-10 JSON strings, which keeps
  256-bit amounts exact and identical across JSON parsers;
* byte arrays are rendered as lowercase ``0x``-prefixed hex strings.

The strict ``decode_*`` helpers are the inverse used on wire and journal
input: they reject anything that would not round-trip byte-for-byte
(uppercase hex, leading zeros, floats, negative numbers), so a value that
decodes successfully re-encodes to the exact bytes it came from.
"""

from __future__ import annotations

import json
from typing import Any

U64_MAX = 2**64 - 1
U256_MAX = 2**256 - 1


class EncodeError(ValueError):
    """Value shape not supported by the canonical encoding."""


class DecodeError(ValueError):
    """Input is not in canonical form."""


def _encode(value: Any) -> str:
    # bool must be tested before int: bool is an int subclass
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        if value < 0:
            raise EncodeError(f"negative integer not encodable: {value}")
        return json.dumps(str(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (bytes, bytearray)):
        return json.dumps("0x" + bytes(value).hex())
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_encode(item) for item in value) + "]"
    if isinstance(value, dict):
        parts = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise EncodeError(f"map keys must be strings, got {type(key).__name__}")
            parts.append(json.dumps(key, ensure_ascii=False) + ":" + _encode(value[key]))
        return "{" + ",".join(parts) + "}"
    raise EncodeError(f"unsupported value type: {type(value).__name__}")


def canonical_encode(value: Any) -> bytes:
    """Encode a record into its unique canonical UTF-8 JSON bytes."""
    return _encode(value).encode("utf-8")


def to_hex(data: bytes) -> str:
    """Render bytes as the canonical lowercase 0x-prefixed hex string."""
    return "0x" + data.hex()


def decode_hex(value: Any, length: int | None = None) -> bytes:
    """Parse a canonical hex string, optionally requiring an exact byte length."""
    if not isinstance(value, str) or not value.startswith("0x"):
        raise DecodeError(f"expected 0x-prefixed hex string, got {value!r}")
    digits = value[2:]
    if len(digits) % 2 != 0 or digits.lower() != digits:
        raise DecodeError(f"non-canonical hex string: {value!r}")
    try:
        data = bytes.fromhex(digits)
    except ValueError:
        raise DecodeError(f"invalid hex string: {value!r}") from None
    if length is not None and len(data) != length:
        raise DecodeError(f"expected {length} bytes, got {len(data)}: {value!r}")
    return data


def decode_uint(value: Any, limit: int = U256_MAX) -> int:
    """Parse a canonical base-10 integer string, bounded by ``limit``."""
    if not isinstance(value, str):
        raise DecodeError(f"expected base-10 integer string, got {value!r}")
    if not value.isdigit() or (len(value) > 1 and value[0] == "0"):
        raise DecodeError(f"non-canonical integer string: {value!r}")
    number = int(value)
    if number > limit:
        raise DecodeError(f"integer out of range: {value}")
    return number


def decode_str(value: Any) -> str:
    if not isinstance(value, str):
        raise DecodeError(f"expected string, got {value!r}")
    return value


def decode_bool(value: Any) -> bool:
    if not isinstance(value, bool):
        raise DecodeError(f"expected boolean, got {value!r}")
    return value


def expect_keys(record: Any, keys: set[str], what: str) -> dict:
    """Require ``record`` to be a map with exactly ``keys``."""
    if not isinstance(record, dict):
        raise DecodeError(f"{what}: expected object, got {type(record).__name__}")
    if set(record) != keys:
        raise DecodeError(f"{what}: expected fields {sorted(keys)}, got {sorted(record)}")
    return record
