#!/usr/bin/env python3
"""Generate the frozen golden vectors under vectors/.

Run once; the outputs are committed and treated as frozen.  Seeds are
deterministic (SHA-256 of a label), so re-running must reproduce the
files byte-for-byte — a diff here means a breaking change to the
canonical encoding, hashing, signing or address rules.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from tokenchain.crypto import derive_address, generate_keypair, hash_bytes, sign_digest
from tokenchain.encoding import canonical_encode, to_hex
from tokenchain.ledger import GenesisConfig, create_genesis, state_digest
from tokenchain.tx import (
    DeployFungible,
    DeployNft,
    NativeTransfer,
    TokenCall,
    Transaction,
    sign_transaction,
)

ROOT = pathlib.Path(__file__).resolve().parents[1]
VECTORS = ROOT / "vectors"

MESSAGES = [
    b"",
    b"abc",
    b"tokenchain golden vector",
    bytes(range(32)),
    b"x" * 100,
]


def crypto_vectors():
    records = []
    for index, message in enumerate(MESSAGES):
        seed = hash_bytes(f"crypto-vector-{index}".encode())
        pair = generate_keypair(seed)
        digest = hash_bytes(message)
        records.append(
            {
                "seed": to_hex(seed),
                "public_key": to_hex(pair.public_key),
                "address": to_hex(derive_address(pair.public_key)),
                "message": to_hex(message),
                "digest": to_hex(digest),
                "signature": to_hex(sign_digest(pair.private_key, digest)),
            }
        )
    return records


def transaction_vectors():
    alice = generate_keypair(hash_bytes(b"tx-vector-alice"))
    bob = generate_keypair(hash_bytes(b"tx-vector-bob"))
    alice_addr = derive_address(alice.public_key)
    bob_addr = derive_address(bob.public_key)
    contract = bytes.fromhex("11" * 20)
    samples = [
        ("native transfer", alice, Transaction(
            chain_id=1, sender=alice_addr, nonce=0,
            action=NativeTransfer(to=bob_addr, amount=12345),
            gas_limit=21000, gas_price=1)),
        ("fungible deploy", alice, Transaction(
            chain_id=1, sender=alice_addr, nonce=1,
            action=DeployFungible(name="ProjCoin", symbol="PBJ", decimals=18,
                                  total_supply=1_000_000 * 10**18),
            gas_limit=100000, gas_price=1)),
        ("nft deploy", bob, Transaction(
            chain_id=1, sender=bob_addr, nonce=0,
            action=DeployNft(name="DeedRegistry", symbol="DEED"),
            gas_limit=120000, gas_price=1)),
        ("token transfer call", alice, Transaction(
            chain_id=1, sender=alice_addr, nonce=2,
            action=TokenCall(contract=contract, method="ft_transfer",
                             args={"to": bob_addr, "amount": 40}),
            gas_limit=21000, gas_price=2)),
        ("approve call", alice, Transaction(
            chain_id=1, sender=alice_addr, nonce=3,
            action=TokenCall(contract=contract, method="ft_approve",
                             args={"spender": bob_addr, "amount": 50}),
            gas_limit=10000, gas_price=1)),
        ("nft mint call", bob, Transaction(
            chain_id=1, sender=bob_addr, nonce=1,
            action=TokenCall(contract=contract, method="nft_mint",
                             args={"to": alice_addr, "token_id": 7,
                                   "uri": "ipfs://deed/7"}),
            gas_limit=40000, gas_price=1)),
    ]
    records = []
    for label, signer, tx in samples:
        signed = sign_transaction(tx, signer.private_key)
        records.append(
            {
                "label": label,
                "seed": to_hex(signer.private_key),
                "unsigned_canonical": to_hex(canonical_encode(tx.to_wire(with_signature=False))),
                "signing_digest": to_hex(signed.signing_digest()),
                "signature": to_hex(signed.signature),
                "signed_canonical": to_hex(canonical_encode(signed.to_wire())),
                "tx_hash": to_hex(signed.tx_hash()),
                "wire": json.loads(canonical_encode(signed.to_wire()).decode()),
            }
        )
    return records


def state_vector():
    alice = generate_keypair(hash_bytes(b"state-vector-alice"))
    bob = generate_keypair(hash_bytes(b"state-vector-bob"))
    config = GenesisConfig(
        chain_id=7,
        difficulty=8,
        allocations={
            derive_address(alice.public_key): 10**21,
            derive_address(bob.public_key): 5 * 10**20,
        },
        registered_keys={
            derive_address(alice.public_key): alice.public_key,
            derive_address(bob.public_key): bob.public_key,
        },
    )
    block, state = create_genesis(config)
    return {
        "config": json.loads(canonical_encode(config.to_wire()).decode()),
        "genesis_header_hash": to_hex(block.header.header_hash()),
        "state_digest": to_hex(state_digest(state)),
    }


def write(name: str, payload) -> None:
    path = VECTORS / name
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main():
    VECTORS.mkdir(exist_ok=True)
    write("crypto.json", crypto_vectors())
    write("transactions.json", transaction_vectors())
    write("state.json", state_vector())


if __name__ == "__main__":
    main()
