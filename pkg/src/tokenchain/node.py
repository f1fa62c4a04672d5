"""Single-node HTTP service: faucet, submission, mining, explorer queries.

One :class:`Node` owns the authoritative chain state, the mempool and
the journal.  Every mutation funnels through its lock and reaches disk
before it reaches memory: grant and block entries are appended (fsynced)
first, then applied, so a crash between any two journal lines loses at
most the in-flight block.  Request handlers never touch state directly.

On startup the node either writes a fresh genesis or replays the
journal; any integrity or verification failure during replay aborts
startup with :class:`TamperedJournal` naming the first bad line.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field, replace

import click
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .crypto import derive_address
from .encoding import U256_MAX, DecodeError, decode_hex, decode_uint, to_hex
from .journal import JournalWriter, TamperedJournal, read_entries
from .ledger import (
    Block,
    ChainState,
    ChainStore,
    GenesisConfig,
    LedgerError,
    Mempool,
    Receipt,
    ValidationError,
    apply_block,
    create_genesis,
    mine_block,
    state_digest,
    verify_block,
)
from .tokens import FungibleToken, NftRegistry
from .tx import Transaction

DEFAULT_PORT = 8545


@dataclass
class NodeConfig:
    chain_id: int = 1
    difficulty: int = 12
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    journal_path: str = "chain.journal"
    auto_mine: bool = False
    auto_mine_interval_ms: int = 1000
    faucet_grant: int = 10**18
    allowed_origins: list[str] = field(default_factory=lambda: ["*"])
    genesis_allocations: dict[str, str] = field(default_factory=dict)
    genesis_keys: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.difficulty > 32:
            raise ValueError("difficulty must be <= 32")
        if self.faucet_grant <= 0:
            raise ValueError("faucet grant must be positive")

    @classmethod
    def from_file(cls, path: str) -> "NodeConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**raw)

    def genesis_config(self) -> GenesisConfig:
        return GenesisConfig(
            chain_id=self.chain_id,
            difficulty=self.difficulty,
            allocations={
                decode_hex(addr, 20): decode_uint(amount)
                for addr, amount in self.genesis_allocations.items()
            },
            registered_keys={
                decode_hex(addr, 20): decode_hex(key, 32)
                for addr, key in self.genesis_keys.items()
            },
        )


class Node:
    """The one authoritative writer over (state, mempool, journal)."""

    def __init__(self, config: NodeConfig):
        self.config = config
        self.lock = threading.RLock()
        self.mempool = Mempool()
        self.store = ChainStore()
        self._stop = threading.Event()
        self._miner: threading.Thread | None = None
        path = config.journal_path
        if os.path.exists(path) and os.path.getsize(path) > 0:
            self._replay(path)
            self._journal = JournalWriter(path)
        else:
            genesis = config.genesis_config()
            block, self.state = create_genesis(genesis)
            self.store.add_block(block, [])
            self._journal = JournalWriter(path)
            self._journal.append({"kind": "genesis", "config": genesis.to_wire()})
        self.genesis = GenesisConfig(
            chain_id=self.state.chain_id,
            difficulty=self.state.difficulty,
        )

    # -- startup -----------------------------------------------------------

    def _replay(self, path: str) -> None:
        entries = read_entries(path)
        try:
            line_number, first = next(entries)
        except StopIteration:
            raise TamperedJournal(0, "journal is empty") from None
        if first.get("kind") != "genesis" or set(first) != {"kind", "config"}:
            raise TamperedJournal(line_number, "line 0 must be the genesis entry")
        try:
            config = GenesisConfig.from_wire(first["config"])
            block, self.state = create_genesis(config)
        except (DecodeError, ValueError) as err:
            raise TamperedJournal(line_number, f"bad genesis config ({err})") from None
        self.store.add_block(block, [])
        for line_number, entry in entries:
            kind = entry["kind"]
            try:
                if kind == "grant":
                    if set(entry) != {"kind", "to", "public_key", "amount"}:
                        raise DecodeError("malformed grant entry")
                    self._apply_grant(
                        decode_hex(entry["to"], 20),
                        decode_hex(entry["public_key"], 32),
                        decode_uint(entry["amount"]),
                    )
                elif kind == "block":
                    if set(entry) != {"kind", "block"}:
                        raise DecodeError("malformed block entry")
                    blk = Block.from_wire(entry["block"])
                    verify_block(self.state, self.store.head_header, blk)
                    self.state, receipts = apply_block(self.state, blk)
                    self.store.add_block(blk, receipts)
                else:
                    raise DecodeError(f"unexpected entry kind {kind!r} after genesis")
            except (DecodeError, LedgerError) as err:
                raise TamperedJournal(line_number, str(err)) from None

    # -- mutations -----------------------------------------------------------

    def _apply_grant(self, to: bytes, public_key: bytes, amount: int) -> int:
        account = self.state._mutable_account(to)
        if not account.public_key:
            if derive_address(public_key) != to:
                raise LedgerError("KeyMismatch", "public key does not derive this address")
            account.public_key = public_key
        elif account.public_key != public_key:
            raise LedgerError("KeyMismatch", "address already registered under a different key")
        if account.native_balance + amount > U256_MAX:
            raise LedgerError("ArithmeticOverflow", "grant would overflow the balance")
        account.native_balance += amount
        return account.native_balance

    def faucet(self, to: bytes, public_key: bytes) -> int:
        """Register the key (first call) and credit the configured grant."""
        with self.lock:
            amount = self.config.faucet_grant
            account = self.state.account(to)
            if account.public_key and account.public_key != public_key:
                raise LedgerError("KeyMismatch", "address already registered under a different key")
            if not account.public_key and derive_address(public_key) != to:
                raise LedgerError("KeyMismatch", "public key does not derive this address")
            self._journal.append(
                {"kind": "grant", "to": to, "public_key": public_key, "amount": amount}
            )
            return self._apply_grant(to, public_key, amount)

    def submit(self, tx: Transaction) -> bytes:
        with self.lock:
            return self.mempool.submit(self.state, tx)

    def mine(self, count: int, timestamp: int | None = None) -> list[Block]:
        """Seal ``count`` blocks synchronously; empty blocks are legal."""
        blocks = []
        with self.lock:
            for _ in range(count):
                ts = int(time.time()) if timestamp is None else timestamp
                block = mine_block(
                    self.state, self.mempool, self.store.head_header, self.state.difficulty, ts
                )
                self._commit(block)
                blocks.append(block)
        return blocks

    def _commit(self, block: Block) -> None:
        verify_block(self.state, self.store.head_header, block)
        self._journal.append({"kind": "block", "block": block.to_wire()})
        self.state, receipts = apply_block(self.state, block)
        self.store.add_block(block, receipts)
        for tx in block.transactions:
            self.mempool.remove(tx)
        self.mempool.prune_stale(self.state)

    # -- background mining ---------------------------------------------------

    def start_auto_mine(self) -> None:
        if self._miner is not None:
            return
        interval = self.config.auto_mine_interval_ms / 1000.0

        def run():
            while not self._stop.wait(interval):
                with self.lock:
                    if len(self.mempool) > 0:
                        self.mine(1)

        self._miner = threading.Thread(target=run, name="auto-miner", daemon=True)
        self._miner.start()

    def close(self) -> None:
        self._stop.set()
        if self._miner is not None:
            self._miner.join(timeout=5)
            self._miner = None
        self._journal.close()

    # -- queries ---------------------------------------------------------------

    def tx_status(self, tx_hash: bytes) -> Receipt | str | None:
        """Receipt once mined, the string "pending" while pooled, else None."""
        with self.lock:
            receipt = self.store.receipt(tx_hash)
            if receipt is not None:
                return receipt
            if self.mempool.contains_hash(tx_hash):
                return "pending"
            return None

    def head(self) -> dict:
        with self.lock:
            return {
                "height": self.state.height,
                "head_hash": to_hex(self.state.head),
                "difficulty": self.state.difficulty,
            }

    def account_view(self, addr: bytes) -> dict:
        with self.lock:
            account = self.state.account(addr)
            return {"nonce": account.nonce, "native_balance": str(account.native_balance)}

    def contract(self, addr: bytes) -> FungibleToken | NftRegistry | None:
        with self.lock:
            return self.state.contracts.get(addr)

    def digest(self) -> bytes:
        with self.lock:
            return state_digest(self.state)


def block_summary(block: Block) -> dict:
    header = block.header
    return {
        "number": header.number,
        "hash": to_hex(header.header_hash()),
        "header": {
            "number": header.number,
            "parent_hash": to_hex(header.parent_hash),
            "timestamp": header.timestamp,
            "difficulty": header.difficulty,
            "merkle_root": to_hex(header.merkle_root),
            "nonce": header.nonce,
        },
        "tx_hashes": [to_hex(tx.tx_hash()) for tx in block.transactions],
    }


def _error(status: int, code: str, detail: str | None = None) -> JSONResponse:
    body = {"error": code}
    if detail:
        body["detail"] = detail
    return JSONResponse(body, status_code=status)


NOT_FOUND = _error(404, "NotFound")


def create_app(node: Node) -> FastAPI:
    app = FastAPI(title="tokenchain node", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=node.config.allowed_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.node = node

    def parse_hash(value: str) -> bytes | None:
        try:
            return decode_hex(value, 32)
        except DecodeError:
            return None

    def parse_address(value: str) -> bytes | None:
        try:
            return decode_hex(value, 20)
        except DecodeError:
            return None

    @app.post("/faucet")
    async def faucet(request: Request):
        try:
            body = json.loads(await request.body())
            to = decode_hex(body["to"], 20) if isinstance(body, dict) and "to" in body else None
            key = (
                decode_hex(body["public_key"], 32)
                if isinstance(body, dict) and "public_key" in body
                else None
            )
            if to is None or key is None:
                raise DecodeError("faucet body needs to and public_key")
        except (json.JSONDecodeError, UnicodeDecodeError, DecodeError) as err:
            return _error(422, "BadRequestBody", str(err))
        try:
            balance = node.faucet(to, key)
        except LedgerError as err:
            return _error(400, err.code, err.detail)
        return {"balance": str(balance)}

    @app.post("/tx")
    async def submit_tx(request: Request):
        try:
            record = json.loads(await request.body())
            tx = Transaction.from_wire(record)
        except (json.JSONDecodeError, UnicodeDecodeError, DecodeError) as err:
            return _error(422, "BadRequestBody", str(err))
        try:
            tx_hash = node.submit(tx)
        except ValidationError as err:
            return _error(400, err.code, err.detail)
        return {"tx_hash": to_hex(tx_hash)}

    @app.get("/tx/{tx_hash}")
    def get_tx(tx_hash: str):
        parsed = parse_hash(tx_hash)
        if parsed is None:
            return NOT_FOUND
        status = node.tx_status(parsed)
        if status is None:
            return NOT_FOUND
        if status == "pending":
            return {"status": "Pending"}
        return status.to_record()

    @app.get("/block/{key}")
    def get_block(key: str):
        with node.lock:
            if key.isdigit():
                block = node.store.block_by_number(int(key))
            else:
                parsed = parse_hash(key)
                block = node.store.block_by_hash(parsed) if parsed else None
            if block is None:
                return NOT_FOUND
            return block_summary(block)

    @app.get("/chain/head")
    def chain_head():
        return node.head()

    @app.get("/chain/meta")
    def chain_meta():
        # companion to /chain/head for clients that must build transactions
        with node.lock:
            return {"chain_id": str(node.state.chain_id), **node.head()}

    @app.get("/account/{address}")
    def account(address: str):
        parsed = parse_address(address)
        if parsed is None:
            return NOT_FOUND
        return node.account_view(parsed)

    @app.get("/token/{contract}/meta")
    def token_meta(contract: str):
        parsed = parse_address(contract)
        token = node.contract(parsed) if parsed else None
        if token is None:
            return NOT_FOUND
        meta = {
            "kind": token.kind,
            "name": token.name,
            "symbol": token.symbol,
            "owner": to_hex(token.owner),
        }
        if isinstance(token, FungibleToken):
            meta["decimals"] = token.decimals
            meta["total_supply"] = str(token.total_supply)
        else:
            meta["total_minted"] = token.total_minted()
        return meta

    @app.get("/token/{contract}/balance/{address}")
    def token_balance(contract: str, address: str):
        parsed = parse_address(contract)
        holder = parse_address(address)
        token = node.contract(parsed) if parsed else None
        if token is None or holder is None:
            return NOT_FOUND
        if not isinstance(token, FungibleToken):
            return _error(400, "WrongTokenKind")
        return {"balance": str(token.balance_of(holder))}

    @app.get("/token/{contract}/allowance/{owner}/{spender}")
    def token_allowance(contract: str, owner: str, spender: str):
        parsed = parse_address(contract)
        owner_addr = parse_address(owner)
        spender_addr = parse_address(spender)
        token = node.contract(parsed) if parsed else None
        if token is None or owner_addr is None or spender_addr is None:
            return NOT_FOUND
        if not isinstance(token, FungibleToken):
            return _error(400, "WrongTokenKind")
        return {"allowance": str(token.allowance(owner_addr, spender_addr))}

    @app.get("/token/{contract}/nft/{token_id}")
    def nft_detail(contract: str, token_id: str):
        parsed = parse_address(contract)
        token = node.contract(parsed) if parsed else None
        if token is None or not token_id.isdigit():
            return NOT_FOUND
        if not isinstance(token, NftRegistry):
            return _error(400, "WrongTokenKind")
        tid = int(token_id)
        owner = token.owner_of(tid)
        if owner is None:
            return NOT_FOUND
        approved = token.get_approved(tid)
        return {
            "owner": to_hex(owner),
            "uri": token.token_uri(tid),
            "approved": to_hex(approved) if approved else None,
        }

    @app.post("/mine")
    async def mine(request: Request):
        if node.config.auto_mine:
            return _error(409, "AutoMineEnabled")
        try:
            body = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError) as err:
            return _error(422, "BadRequestBody", str(err))
        count = body.get("count") if isinstance(body, dict) else None
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            return _error(400, "BadCount", "count must be a positive integer")
        blocks = node.mine(count)
        return [
            {
                "number": b.header.number,
                "hash": to_hex(b.header.header_hash()),
                "tx_count": len(b.transactions),
                "nonce": b.header.nonce,
            }
            for b in blocks
        ]

    return app


@click.command()
@click.option("--config", "config_path", envvar="NODE_CONFIG", default=None,
              help="JSON config file; flags override its fields.")
@click.option("--chain-id", type=int, default=None)
@click.option("--difficulty", type=int, default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--journal", "journal_path", default=None, help="Journal file path.")
@click.option("--auto-mine/--manual-mine", "auto_mine", default=None,
              help="Seal a block every interval when the mempool is non-empty.")
@click.option("--auto-mine-interval-ms", type=int, default=None)
@click.option("--faucet-grant", type=int, default=None)
@click.option("--allow-origin", "allowed_origins", multiple=True,
              help="Restrict CORS to these origins (default: any).")
def main(config_path, **overrides):
    """Run the chain node and serve its HTTP interface."""
    import uvicorn

    config = NodeConfig.from_file(config_path) if config_path else NodeConfig()
    overrides = {k: v for k, v in overrides.items() if v not in (None, ())}
    if "allowed_origins" in overrides:
        overrides["allowed_origins"] = list(overrides["allowed_origins"])
    config = replace(config, **overrides)
    try:
        node = Node(config)
    except TamperedJournal as err:
        raise click.ClickException(f"refusing to start: {err}") from None
    if config.auto_mine:
        node.start_auto_mine()
    click.echo(f"chain_id={node.state.chain_id} difficulty={node.state.difficulty} "
               f"height={node.state.height} head={to_hex(node.state.head)}")
    try:
        uvicorn.run(create_app(node), host=config.host, port=config.port, log_level="warning")
    finally:
        node.close()


if __name__ == "__main__":
    main()
