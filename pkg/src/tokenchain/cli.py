"""Command-line client: key management, funding, token actions, explorer.

Talks to a running node over its HTTP interface and signs everything
locally with keys from a plaintext JSON keystore (simulation tool — the
file holds raw private keys, never point it at anything real).

Exit codes are a stable scripting contract: 0 success, 1 domain error
(validation failure, revert, not found), 2 node unreachable, 3 keystore
fault.
"""

from __future__ import annotations

import json
import sys
import time

import click
import httpx

from .crypto import derive_address, generate_keypair
from .encoding import DecodeError, canonical_encode, decode_hex, to_hex
from .ledger import fixed_gas_cost
from .tokens import contract_address
from .tx import (
    DeployFungible,
    DeployNft,
    NativeTransfer,
    TokenCall,
    Transaction,
    sign_transaction,
)

EXIT_DOMAIN = 1
EXIT_CONNECT = 2
EXIT_KEYSTORE = 3

DEFAULT_NODE = "http://127.0.0.1:8545"
WAIT_TIMEOUT_S = 30.0
WAIT_POLL_S = 0.15


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


class Api:
    """Minimal JSON client over the node routes."""

    def __init__(self, base_url: str):
        self.client = httpx.Client(base_url=base_url, timeout=10.0)

    def call(self, method: str, path: str, body: dict | None = None):
        try:
            response = self.client.request(method, path, json=body)
        except httpx.TransportError as err:
            _fail(f"node unreachable at {self.client.base_url}: {err}", EXIT_CONNECT)
        if response.status_code >= 400:
            try:
                payload = response.json()
                code = payload.get("error", f"HTTP{response.status_code}")
            except json.JSONDecodeError:
                code = f"HTTP{response.status_code}"
            _fail(code, EXIT_DOMAIN)
        return response.json()


class Keystore:
    def __init__(self, path: str):
        self.path = path
        self.entries: list[dict] = []
        try:
            with open(path, encoding="utf-8") as fh:
                records = json.load(fh)
            if not isinstance(records, list):
                raise ValueError("keystore must be a JSON list")
            for record in records:
                address = decode_hex(record["address"], 20)
                public_key = decode_hex(record["public_key"], 32)
                private_key = decode_hex(record["private_key"], 32)
                if derive_address(public_key) != address:
                    raise ValueError(f"address {record['address']} does not match its key")
                self.entries.append(
                    {"address": address, "public_key": public_key, "private_key": private_key}
                )
        except FileNotFoundError:
            pass
        except (ValueError, KeyError, TypeError, DecodeError) as err:
            _fail(f"keystore {path} is corrupt: {err}", EXIT_KEYSTORE)

    def add(self, address: bytes, public_key: bytes, private_key: bytes) -> None:
        self.entries.append(
            {"address": address, "public_key": public_key, "private_key": private_key}
        )
        records = [
            {
                "address": to_hex(e["address"]),
                "public_key": to_hex(e["public_key"]),
                "private_key": to_hex(e["private_key"]),
            }
            for e in self.entries
        ]
        try:
            with open(self.path, "w", encoding="utf-8") as fh:
                json.dump(records, fh, indent=2)
                fh.write("\n")
        except OSError as err:
            _fail(f"cannot write keystore {self.path}: {err}", EXIT_KEYSTORE)

    def entry(self, address: bytes) -> dict:
        for record in self.entries:
            if record["address"] == address:
                return record
        _fail(f"address {to_hex(address)} not in keystore {self.path}", EXIT_KEYSTORE)


def _parse_address(value: str) -> bytes:
    try:
        return decode_hex(value, 20)
    except DecodeError as err:
        _fail(str(err), EXIT_DOMAIN)


def _parse_amount(value: str) -> int:
    if not value.isdigit():
        _fail(f"amount must be a base-10 unsigned integer, got {value!r}", EXIT_DOMAIN)
    return int(value)


def _emit(ctx, data: dict, human: list[str]) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(data, indent=2))
    else:
        for line in human:
            click.echo(line)


@click.group()
@click.option("--node", default=DEFAULT_NODE, show_default=True, help="Node base URL.")
@click.option("--keystore", "keystore_path", default="keystore.json", show_default=True,
              help="Plaintext JSON keystore (simulation only).")
@click.option("--json", "json_output", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, node, keystore_path, json_output):
    """Client for a local tokenization chain node."""
    ctx.obj = {"node": node, "keystore": keystore_path, "json": json_output}


def _api(ctx) -> Api:
    return Api(ctx.obj["node"])


def _keystore(ctx) -> Keystore:
    return Keystore(ctx.obj["keystore"])


# --------------------------------------------------------------------------- wallet


@main.group()
def wallet():
    """Create, list and fund local accounts."""


@wallet.command("new")
@click.pass_context
def wallet_new(ctx):
    """Generate a key pair and append it to the keystore."""
    store = _keystore(ctx)
    pair = generate_keypair()
    address = derive_address(pair.public_key)
    store.add(address, pair.public_key, pair.private_key)
    _emit(ctx, {"address": to_hex(address)}, [to_hex(address)])


@wallet.command("list")
@click.pass_context
def wallet_list(ctx):
    """List keystore addresses with their live native balances."""
    store = _keystore(ctx)
    api = _api(ctx)
    rows = []
    for entry in store.entries:
        address = to_hex(entry["address"])
        view = api.call("GET", f"/account/{address}")
        rows.append({"address": address, "nonce": view["nonce"], "native_balance": view["native_balance"]})
    _emit(ctx, {"accounts": rows},
          [f"{r['address']}  nonce={r['nonce']}  balance={r['native_balance']}" for r in rows])


@wallet.command("fund")
@click.option("--to", "to_addr", required=True, help="Keystore address to fund.")
@click.pass_context
def wallet_fund(ctx, to_addr):
    """Request a faucet grant for a keystore address."""
    store = _keystore(ctx)
    address = _parse_address(to_addr)
    entry = store.entry(address)
    api = _api(ctx)
    result = api.call("POST", "/faucet",
                      {"to": to_hex(address), "public_key": to_hex(entry["public_key"])})
    _emit(ctx, {"address": to_addr, "balance": result["balance"]},
          [f"balance: {result['balance']}"])


# --------------------------------------------------------------------------- shared tx pipeline


def _submit_action(ctx, sender_hex, action, gas_limit, gas_price, nonce, wait):
    store = _keystore(ctx)
    api = _api(ctx)
    sender = _parse_address(sender_hex)
    entry = store.entry(sender)
    if nonce is None:
        nonce = api.call("GET", f"/account/{to_hex(sender)}")["nonce"]
    tx = Transaction(
        chain_id=_chain_id(api),
        sender=sender,
        nonce=nonce,
        action=action,
        gas_limit=gas_limit if gas_limit is not None else fixed_gas_cost(action),
        gas_price=gas_price,
    )
    tx = sign_transaction(tx, entry["private_key"])
    body = json.loads(canonical_json(tx))
    result = api.call("POST", "/tx", body)
    local_hash = to_hex(tx.tx_hash())
    if result["tx_hash"] != local_hash:
        _fail(f"node hash {result['tx_hash']} != locally computed {local_hash}", EXIT_DOMAIN)
    data = {"tx_hash": local_hash}
    lines = [f"tx_hash: {local_hash}"]
    if isinstance(action, (DeployFungible, DeployNft)):
        contract = to_hex(contract_address(sender, tx.nonce))
        data["contract"] = contract
        lines.append(f"contract: {contract}")
    if wait:
        receipt = _wait_receipt(api, local_hash)
        data["receipt"] = receipt
        lines.append(f"status: {receipt['status']}")
        lines.append(f"block_number: {receipt['block_number']}")
        lines.append(f"gas_used: {receipt['gas_used']}")
        if receipt["status"] != "Success":
            lines.append(f"error: {receipt['error']}")
            _emit(ctx, data, lines)
            _fail(receipt["error"], EXIT_DOMAIN)
    _emit(ctx, data, lines)


_CHAIN_ID_CACHE: dict[str, int] = {}


def _chain_id(api: Api) -> int:
    base = str(api.client.base_url)
    if base not in _CHAIN_ID_CACHE:
        _CHAIN_ID_CACHE[base] = int(api.call("GET", "/chain/meta")["chain_id"])
    return _CHAIN_ID_CACHE[base]


def canonical_json(tx: Transaction) -> str:
    return canonical_encode(tx.to_wire()).decode("utf-8")


def _wait_receipt(api: Api, tx_hash_hex: str) -> dict:
    deadline = time.monotonic() + WAIT_TIMEOUT_S
    while time.monotonic() < deadline:
        status = api.call("GET", f"/tx/{tx_hash_hex}")
        if status.get("status") != "Pending":
            return status
        time.sleep(WAIT_POLL_S)
    _fail(f"timed out waiting for {tx_hash_hex}", EXIT_DOMAIN)


def _tx_options(fn):
    fn = click.option("--from", "sender", required=True, help="Signing keystore address.")(fn)
    fn = click.option("--gas-limit", type=int, default=None,
                      help="Override the fixed-schedule default.")(fn)
    fn = click.option("--gas-price", type=int, default=1, show_default=True)(fn)
    fn = click.option("--nonce", type=int, default=None,
                      help="Override the account nonce (for pipelined submissions).")(fn)
    fn = click.option("--wait", is_flag=True, help="Poll until mined and print the receipt.")(fn)
    return fn


# --------------------------------------------------------------------------- token


@main.group()
def token():
    """Deploy tokens and run token actions."""


@token.command("deploy-ft")
@click.option("--name", required=True)
@click.option("--symbol", required=True)
@click.option("--decimals", type=int, default=18, show_default=True)
@click.option("--supply", required=True, help="Initial total supply in base units.")
@_tx_options
@click.pass_context
def token_deploy_ft(ctx, name, symbol, decimals, supply, sender, gas_limit, gas_price, nonce, wait):
    """Deploy a fungible token; the supply starts on the deployer."""
    action = DeployFungible(name=name, symbol=symbol, decimals=decimals,
                            total_supply=_parse_amount(supply))
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("deploy-nft")
@click.option("--name", required=True)
@click.option("--symbol", required=True)
@_tx_options
@click.pass_context
def token_deploy_nft(ctx, name, symbol, sender, gas_limit, gas_price, nonce, wait):
    """Deploy an NFT registry administered by the deployer."""
    action = DeployNft(name=name, symbol=symbol)
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


def _call(contract, method, args) -> TokenCall:
    return TokenCall(contract=_parse_address(contract), method=method, args=args)


@token.command("transfer")
@click.option("--contract", required=True)
@click.option("--to", "to_addr", required=True)
@click.option("--amount", required=True)
@_tx_options
@click.pass_context
def token_transfer(ctx, contract, to_addr, amount, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "ft_transfer",
                   {"to": _parse_address(to_addr), "amount": _parse_amount(amount)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("approve")
@click.option("--contract", required=True)
@click.option("--spender", required=True)
@click.option("--amount", required=True)
@_tx_options
@click.pass_context
def token_approve(ctx, contract, spender, amount, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "ft_approve",
                   {"spender": _parse_address(spender), "amount": _parse_amount(amount)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("transfer-from")
@click.option("--contract", required=True)
@click.option("--owner", required=True, help="Balance owner being spent from.")
@click.option("--to", "to_addr", required=True)
@click.option("--amount", required=True)
@_tx_options
@click.pass_context
def token_transfer_from(ctx, contract, owner, to_addr, amount, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "ft_transfer_from",
                   {"from": _parse_address(owner), "to": _parse_address(to_addr),
                    "amount": _parse_amount(amount)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("mint")
@click.option("--contract", required=True)
@click.option("--to", "to_addr", required=True)
@click.option("--amount", required=True)
@_tx_options
@click.pass_context
def token_mint(ctx, contract, to_addr, amount, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "ft_mint",
                   {"to": _parse_address(to_addr), "amount": _parse_amount(amount)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("burn")
@click.option("--contract", required=True)
@click.option("--amount", required=True)
@_tx_options
@click.pass_context
def token_burn(ctx, contract, amount, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "ft_burn", {"amount": _parse_amount(amount)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("balance")
@click.option("--contract", required=True)
@click.option("--address", required=True)
@click.pass_context
def token_balance(ctx, contract, address):
    api = _api(ctx)
    result = api.call("GET", f"/token/{contract}/balance/{address}")
    _emit(ctx, result, [f"balance: {result['balance']}"])


@token.command("meta")
@click.option("--contract", required=True)
@click.pass_context
def token_meta(ctx, contract):
    api = _api(ctx)
    result = api.call("GET", f"/token/{contract}/meta")
    _emit(ctx, result, [f"{k}: {v}" for k, v in result.items()])


@token.command("nft-mint")
@click.option("--contract", required=True)
@click.option("--to", "to_addr", required=True)
@click.option("--token-id", required=True)
@click.option("--uri", default="", help="Metadata URI stored with the token.")
@_tx_options
@click.pass_context
def token_nft_mint(ctx, contract, to_addr, token_id, uri, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "nft_mint",
                   {"to": _parse_address(to_addr), "token_id": _parse_amount(token_id), "uri": uri})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("nft-transfer")
@click.option("--contract", required=True)
@click.option("--owner", required=True, help="Current owner of the token.")
@click.option("--to", "to_addr", required=True)
@click.option("--token-id", required=True)
@_tx_options
@click.pass_context
def token_nft_transfer(ctx, contract, owner, to_addr, token_id, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "nft_transfer_from",
                   {"from": _parse_address(owner), "to": _parse_address(to_addr),
                    "token_id": _parse_amount(token_id)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("nft-approve")
@click.option("--contract", required=True)
@click.option("--approved", required=True, help="Address to approve (zero address clears).")
@click.option("--token-id", required=True)
@_tx_options
@click.pass_context
def token_nft_approve(ctx, contract, approved, token_id, sender, gas_limit, gas_price, nonce, wait):
    action = _call(contract, "nft_approve",
                   {"approved": _parse_address(approved), "token_id": _parse_amount(token_id)})
    _submit_action(ctx, sender, action, gas_limit, gas_price, nonce, wait)


@token.command("nft-owner")
@click.option("--contract", required=True)
@click.option("--token-id", required=True)
@click.pass_context
def token_nft_owner(ctx, contract, token_id):
    api = _api(ctx)
    result = api.call("GET", f"/token/{contract}/nft/{token_id}")
    _emit(ctx, result, [f"{k}: {v}" for k, v in result.items()])


# --------------------------------------------------------------------------- chain


@main.group()
def chain():
    """Explorer queries and manual mining."""


@chain.command("head")
@click.pass_context
def chain_head(ctx):
    api = _api(ctx)
    result = api.call("GET", "/chain/head")
    _emit(ctx, result, [f"{k}: {v}" for k, v in result.items()])


@chain.command("block")
@click.argument("key")
@click.pass_context
def chain_block(ctx, key):
    """Look up a block by number or 0x-prefixed hash."""
    api = _api(ctx)
    result = api.call("GET", f"/block/{key}")
    lines = [
        f"number: {result['number']}",
        f"hash: {result['hash']}",
        f"parent_hash: {result['header']['parent_hash']}",
        f"timestamp: {result['header']['timestamp']}",
        f"difficulty: {result['header']['difficulty']}",
        f"merkle_root: {result['header']['merkle_root']}",
        f"nonce: {result['header']['nonce']}",
        f"transactions: {len(result['tx_hashes'])}",
    ] + [f"  {h}" for h in result["tx_hashes"]]
    _emit(ctx, result, lines)


@chain.command("tx")
@click.argument("tx_hash")
@click.pass_context
def chain_tx(ctx, tx_hash):
    """Look up a transaction receipt."""
    api = _api(ctx)
    result = api.call("GET", f"/tx/{tx_hash}")
    _emit(ctx, result, [f"{k}: {v}" for k, v in result.items()])


@chain.command("mine")
@click.option("--count", type=int, default=1, show_default=True)
@click.pass_context
def chain_mine(ctx, count):
    """Mine blocks synchronously (manual-mine nodes only)."""
    api = _api(ctx)
    result = api.call("POST", "/mine", {"count": count})
    _emit(ctx, {"blocks": result},
          [f"block {b['number']} {b['hash']} txs={b['tx_count']} nonce={b['nonce']}" for b in result])


if __name__ == "__main__":
    main()
