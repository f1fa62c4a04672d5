"""Hashing, key pairs, addresses and detached signatures.

SHA-256 is the single hash everywhere (transaction ids, block headers,
mining targets, addresses).  Signatures are Ed25519: deterministic, 64
bytes, 32-byte public keys, so golden vectors stay byte-stable.  An
address is the last 20 bytes of the SHA-256 of the raw public key,
rendered as 0x-prefixed lowercase hex.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

DIGEST_LEN = 32
ADDRESS_LEN = 20
PUBLIC_KEY_LEN = 32
PRIVATE_KEY_LEN = 32
SIGNATURE_LEN = 64

ZERO_ADDRESS = b"\x00" * ADDRESS_LEN


class SeedError(ValueError):
    """Key seed is not exactly 32 bytes."""


class InvalidKeyError(ValueError):
    """Key material is malformed for the signature scheme."""


@dataclass(frozen=True)
class KeyPair:
    private_key: bytes
    public_key: bytes


def hash_bytes(data: bytes) -> bytes:
    """SHA-256 digest of ``data``; pure and deterministic, empty input allowed."""
    return hashlib.sha256(data).digest()


def generate_keypair(seed: bytes | None = None) -> KeyPair:
    """Create an Ed25519 key pair, deterministically when ``seed`` is given."""
    if seed is None:
        seed = secrets.token_bytes(PRIVATE_KEY_LEN)
    elif len(seed) != PRIVATE_KEY_LEN:
        raise SeedError(f"seed must be {PRIVATE_KEY_LEN} bytes, got {len(seed)}")
    private = Ed25519PrivateKey.from_private_bytes(seed)
    return KeyPair(private_key=seed, public_key=private.public_key().public_bytes_raw())


def derive_address(public_key: bytes) -> bytes:
    """Address = last 20 bytes of the public-key hash."""
    if len(public_key) != PUBLIC_KEY_LEN:
        raise InvalidKeyError(f"public key must be {PUBLIC_KEY_LEN} bytes, got {len(public_key)}")
    return hash_bytes(public_key)[-ADDRESS_LEN:]


def sign_digest(private_key: bytes, digest: bytes) -> bytes:
    """Deterministic 64-byte signature over a 32-byte digest."""
    if len(private_key) != PRIVATE_KEY_LEN:
        raise InvalidKeyError(f"private key must be {PRIVATE_KEY_LEN} bytes, got {len(private_key)}")
    if len(digest) != DIGEST_LEN:
        raise ValueError(f"digest must be {DIGEST_LEN} bytes, got {len(digest)}")
    return Ed25519PrivateKey.from_private_bytes(private_key).sign(digest)


def verify_signature(public_key: bytes, digest: bytes, signature: bytes) -> bool:
    """True iff ``signature`` signs ``digest`` under ``public_key``.

    Never raises: malformed keys, digests or signatures verify as False.
    """
    if len(public_key) != PUBLIC_KEY_LEN or len(signature) != SIGNATURE_LEN:
        return False
    if len(digest) != DIGEST_LEN:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, digest)
        return True
    except (InvalidSignature, ValueError):
        return False
