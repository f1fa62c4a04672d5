"""Transactions: the signed, nonce-ordered instructions the chain executes.

A transaction carries one action (native coin transfer, token deploy, or
token call) plus gas fields and a signature.  Two digests matter:

* signing digest = SHA-256 of the canonical encoding *without* the
  signature field — this is what the sender signs;
* tx hash = SHA-256 of the canonical encoding of the full transaction —
  the id everything else (mempool, merkle tree, receipts, explorer) uses.

``from_wire`` is strict: it accepts exactly the canonical wire shape and
rejects unknown fields, uppercase hex, non-canonical integers and
ill-formed actions, so anything decoded re-encodes byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from .crypto import ADDRESS_LEN, SIGNATURE_LEN, hash_bytes, sign_digest
from .encoding import (
    U64_MAX,
    DecodeError,
    canonical_encode,
    decode_bool,
    decode_hex,
    decode_str,
    decode_uint,
    expect_keys,
)
from .tokens import MAX_DECIMALS, MAX_SYMBOL_LEN, TOKEN_METHODS


@dataclass
class NativeTransfer:
    to: bytes
    amount: int

    type = "native_transfer"


@dataclass
class DeployFungible:
    name: str
    symbol: str
    decimals: int
    total_supply: int

    type = "deploy_fungible"


@dataclass
class DeployNft:
    name: str
    symbol: str

    type = "deploy_nft"


@dataclass
class TokenCall:
    contract: bytes
    method: str
    args: dict

    type = "token_call"


Action = Union[NativeTransfer, DeployFungible, DeployNft, TokenCall]

# Argument schema per token-call method: (wire key, value kind).
TOKEN_CALL_SCHEMAS: dict[str, tuple[tuple[str, str], ...]] = {
    "ft_transfer": (("to", "address"), ("amount", "u256")),
    "ft_approve": (("spender", "address"), ("amount", "u256")),
    "ft_transfer_from": (("from", "address"), ("to", "address"), ("amount", "u256")),
    "ft_mint": (("to", "address"), ("amount", "u256")),
    "ft_burn": (("amount", "u256"),),
    "transfer_ownership": (("new_owner", "address"),),
    "nft_mint": (("to", "address"), ("token_id", "u256"), ("uri", "string")),
    "nft_transfer_from": (("from", "address"), ("to", "address"), ("token_id", "u256")),
    "nft_approve": (("approved", "address"), ("token_id", "u256")),
    "nft_set_approval_for_all": (("operator", "address"), ("approved", "bool")),
    "nft_burn": (("token_id", "u256"),),
}

assert set(TOKEN_CALL_SCHEMAS) == set(TOKEN_METHODS)


def action_to_wire(action: Action) -> dict:
    if isinstance(action, NativeTransfer):
        return {"type": action.type, "to": action.to, "amount": action.amount}
    if isinstance(action, DeployFungible):
        return {
            "type": action.type,
            "name": action.name,
            "symbol": action.symbol,
            "decimals": action.decimals,
            "total_supply": action.total_supply,
        }
    if isinstance(action, DeployNft):
        return {"type": action.type, "name": action.name, "symbol": action.symbol}
    if isinstance(action, TokenCall):
        args = {key: action.args[key] for key, _ in TOKEN_CALL_SCHEMAS[action.method]}
        return {
            "type": action.type,
            "contract": action.contract,
            "call": {"method": action.method, "args": args},
        }
    raise TypeError(f"not an action: {action!r}")


def _decode_call_args(method: str, record: dict) -> dict:
    schema = TOKEN_CALL_SCHEMAS[method]
    expect_keys(record, {key for key, _ in schema}, f"{method} args")
    args = {}
    for key, kind in schema:
        value = record[key]
        if kind == "address":
            args[key] = decode_hex(value, ADDRESS_LEN)
        elif kind == "u256":
            args[key] = decode_uint(value)
        elif kind == "string":
            args[key] = decode_str(value)
        else:
            args[key] = decode_bool(value)
    return args


def _check_deploy_fields(name: str, symbol: str, decimals: int | None = None) -> None:
    if not name:
        raise DecodeError("deploy: name must be non-empty")
    if not symbol or len(symbol) > MAX_SYMBOL_LEN:
        raise DecodeError(f"deploy: symbol must be 1..{MAX_SYMBOL_LEN} characters")
    if decimals is not None and decimals > MAX_DECIMALS:
        raise DecodeError(f"deploy: decimals must be <= {MAX_DECIMALS}")


def action_from_wire(record: object) -> Action:
    if not isinstance(record, dict) or "type" not in record:
        raise DecodeError("action: expected object with a type field")
    kind = record["type"]
    if kind == "native_transfer":
        expect_keys(record, {"type", "to", "amount"}, "native_transfer")
        return NativeTransfer(to=decode_hex(record["to"], ADDRESS_LEN), amount=decode_uint(record["amount"]))
    if kind == "deploy_fungible":
        expect_keys(record, {"type", "name", "symbol", "decimals", "total_supply"}, "deploy_fungible")
        name = decode_str(record["name"])
        symbol = decode_str(record["symbol"])
        decimals = decode_uint(record["decimals"], U64_MAX)
        _check_deploy_fields(name, symbol, decimals)
        return DeployFungible(
            name=name,
            symbol=symbol,
            decimals=decimals,
            total_supply=decode_uint(record["total_supply"]),
        )
    if kind == "deploy_nft":
        expect_keys(record, {"type", "name", "symbol"}, "deploy_nft")
        name = decode_str(record["name"])
        symbol = decode_str(record["symbol"])
        _check_deploy_fields(name, symbol)
        return DeployNft(name=name, symbol=symbol)
    if kind == "token_call":
        expect_keys(record, {"type", "contract", "call"}, "token_call")
        call = expect_keys(record["call"], {"method", "args"}, "token_call.call")
        method = decode_str(call["method"])
        if method not in TOKEN_CALL_SCHEMAS:
            raise DecodeError(f"unknown token-call method: {method!r}")
        return TokenCall(
            contract=decode_hex(record["contract"], ADDRESS_LEN),
            method=method,
            args=_decode_call_args(method, call["args"]),
        )
    raise DecodeError(f"unknown action type: {kind!r}")


@dataclass
class Transaction:
    chain_id: int
    sender: bytes  # wire field "from"
    nonce: int
    action: Action
    gas_limit: int
    gas_price: int
    signature: bytes = b""

    def to_wire(self, with_signature: bool = True) -> dict:
        record = {
            "chain_id": self.chain_id,
            "from": self.sender,
            "nonce": self.nonce,
            "action": action_to_wire(self.action),
            "gas_limit": self.gas_limit,
            "gas_price": self.gas_price,
        }
        if with_signature:
            record["signature"] = self.signature
        return record

    def signing_digest(self) -> bytes:
        return hash_bytes(canonical_encode(self.to_wire(with_signature=False)))

    def tx_hash(self) -> bytes:
        return hash_bytes(canonical_encode(self.to_wire()))

    @classmethod
    def from_wire(cls, record: object) -> "Transaction":
        expect_keys(
            record,
            {"chain_id", "from", "nonce", "action", "gas_limit", "gas_price", "signature"},
            "transaction",
        )
        return cls(
            chain_id=decode_uint(record["chain_id"], U64_MAX),
            sender=decode_hex(record["from"], ADDRESS_LEN),
            nonce=decode_uint(record["nonce"], U64_MAX),
            action=action_from_wire(record["action"]),
            gas_limit=decode_uint(record["gas_limit"], U64_MAX),
            gas_price=decode_uint(record["gas_price"]),
            signature=decode_hex(record["signature"], SIGNATURE_LEN),
        )


def sign_transaction(tx: Transaction, private_key: bytes) -> Transaction:
    """Return a copy of ``tx`` signed with ``private_key``."""
    return replace(tx, signature=sign_digest(private_key, tx.signing_digest()))
