"""Append-only chain journal: one canonical JSON entry per line.

The journal is the node's entire persistence.  Line 0 records the
genesis configuration; every later line is either a faucet grant or a
sealed block, in the exact order they were applied.  Replaying the file
from the top reconstructs head hash and state digest bit-for-bit.

Tamper detection is strict and line-local.  Each line embeds an
``integrity`` field, the SHA-256 of the canonical encoding of the rest
of the line, and a line is accepted only if its raw bytes equal the
canonical re-encoding of what was parsed.  Any single-character edit
therefore either breaks the JSON, breaks the byte-exact canonical form,
or changes the payload out from under its recorded digest.  Partial
trailing lines are rejected too: appends are single write+fsync calls,
so a healthy shutdown or crash always leaves whole lines behind.
"""

from __future__ import annotations

import json
import os
from typing import Iterator

from .crypto import hash_bytes
from .encoding import DecodeError, EncodeError, canonical_encode, decode_hex

ENTRY_KINDS = ("genesis", "grant", "block")


class TamperedJournal(Exception):
    """Journal failed integrity or replay checks; refuses to start the node."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"journal line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


def encode_entry(entry: dict) -> bytes:
    """Render a journal entry as its canonical line (without newline)."""
    digest = hash_bytes(canonical_encode(entry))
    return canonical_encode({"integrity": digest, **entry})


def _decode_line(line_number: int, raw: bytes) -> dict:
    try:
        record = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise TamperedJournal(line_number, f"not valid JSON ({err})") from None
    if not isinstance(record, dict) or "integrity" not in record:
        raise TamperedJournal(line_number, "missing integrity field")
    try:
        if canonical_encode(record) != raw:
            raise TamperedJournal(line_number, "line is not in canonical form")
        stated_digest = decode_hex(record.pop("integrity"), 32)
        recomputed = hash_bytes(canonical_encode(record))
    except (EncodeError, DecodeError) as err:
        raise TamperedJournal(line_number, f"non-canonical content ({err})") from None
    if recomputed != stated_digest:
        raise TamperedJournal(line_number, "integrity digest mismatch")
    if record.get("kind") not in ENTRY_KINDS:
        raise TamperedJournal(line_number, f"unknown entry kind {record.get('kind')!r}")
    return record


def read_entries(path: str) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, entry) pairs, enforcing per-line integrity.

    Every line, including the last, must be newline-terminated; a torn
    or edited tail is reported as tampering rather than silently dropped.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        return
    if not data.endswith(b"\n"):
        last = data.count(b"\n")
        raise TamperedJournal(last, "truncated line at end of journal")
    for line_number, raw in enumerate(data[:-1].split(b"\n")):
        yield line_number, _decode_line(line_number, raw)


class JournalWriter:
    """Appends entries durably: one line per entry, fsynced before return."""

    def __init__(self, path: str):
        self.path = path
        self._fh = open(path, "ab")

    def append(self, entry: dict) -> None:
        self._fh.write(encode_entry(entry) + b"\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()
