"""The simulated chain: accounts, mempool, proof-of-work blocks, receipts.

State transitions are modeled as functions over explicit values:
``apply_block`` returns a fresh :class:`ChainState` rather than mutating
its input, so replay, mining trials and verification all work on cheap
clones.  The embedding service owns serialization of writers.

Economics are deliberately fixed: every action has a constant gas cost,
fees are burned (no miner identity exists on a single-node chain), and a
reverted token call still consumes its fixed gas and bumps the sender
nonce.  Amounts are unsigned 256-bit integers; overflow is an error,
never wraparound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .crypto import hash_bytes, verify_signature
from .encoding import (
    U64_MAX,
    U256_MAX,
    DecodeError,
    canonical_encode,
    decode_hex,
    decode_uint,
    expect_keys,
    to_hex,
)
from .tokens import (
    TokenRevert,
    TokenState,
    apply_call,
    deploy_fungible,
    deploy_nft,
)
from .tx import DeployFungible, DeployNft, NativeTransfer, TokenCall, Transaction

GENESIS_PARENT = b"\x00" * 32
MAX_DIFFICULTY = 32
BLOCK_GAS_CAP = 1_000_000

# Fixed gas cost per action; views are free because they are not transactions.
GAS_NATIVE_TRANSFER = 21_000
GAS_DEPLOY_FUNGIBLE = 100_000
GAS_DEPLOY_NFT = 120_000
GAS_TOKEN_CALL = {
    "ft_transfer": 21_000,
    "ft_approve": 10_000,
    "ft_transfer_from": 30_000,
    "ft_mint": 25_000,
    "ft_burn": 20_000,
    "transfer_ownership": 10_000,
    "nft_mint": 40_000,
    "nft_transfer_from": 30_000,
    "nft_approve": 10_000,
    "nft_set_approval_for_all": 10_000,
    "nft_burn": 20_000,
}


class LedgerError(Exception):
    """Domain failure with a stable machine-readable code."""

    def __init__(self, code: str, detail: str | None = None):
        super().__init__(code if detail is None else f"{code}: {detail}")
        self.code = code
        self.detail = detail


class ValidationError(LedgerError):
    """Transaction rejected; ``code`` names the first failed check."""


class BlockError(LedgerError):
    """Block rejected by verify_block."""

    def __init__(self, code: str, detail: str | None = None, index: int | None = None):
        super().__init__(code, detail)
        self.index = index


def fixed_gas_cost(action) -> int:
    if isinstance(action, NativeTransfer):
        return GAS_NATIVE_TRANSFER
    if isinstance(action, DeployFungible):
        return GAS_DEPLOY_FUNGIBLE
    if isinstance(action, DeployNft):
        return GAS_DEPLOY_NFT
    if isinstance(action, TokenCall):
        return GAS_TOKEN_CALL[action.method]
    raise TypeError(f"not an action: {action!r}")


@dataclass
class Account:
    nonce: int = 0
    native_balance: int = 0
    public_key: bytes = b""  # empty until registered via genesis or faucet


@dataclass
class ChainState:
    chain_id: int
    difficulty: int
    accounts: dict[bytes, Account] = field(default_factory=dict)
    contracts: dict[bytes, TokenState] = field(default_factory=dict)
    head: bytes = GENESIS_PARENT
    height: int = 0

    def account(self, addr: bytes) -> Account:
        return self.accounts.get(addr, Account())

    def _mutable_account(self, addr: bytes) -> Account:
        acct = self.accounts.get(addr)
        if acct is None:
            acct = Account()
            self.accounts[addr] = acct
        return acct

    def credit(self, addr: bytes, amount: int) -> None:
        acct = self._mutable_account(addr)
        if acct.native_balance + amount > U256_MAX:
            raise TokenRevert("ArithmeticOverflow")
        acct.native_balance += amount

    def debit(self, addr: bytes, amount: int) -> None:
        acct = self._mutable_account(addr)
        if acct.native_balance < amount:
            raise TokenRevert("InsufficientFunds")
        acct.native_balance -= amount

    def clone(self) -> "ChainState":
        return ChainState(
            chain_id=self.chain_id,
            difficulty=self.difficulty,
            accounts={
                addr: Account(a.nonce, a.native_balance, a.public_key)
                for addr, a in self.accounts.items()
            },
            contracts={addr: c.clone() for addr, c in self.contracts.items()},
            head=self.head,
            height=self.height,
        )

    def to_record(self) -> dict:
        return {
            "accounts": {
                to_hex(addr): {
                    "nonce": acct.nonce,
                    "native_balance": acct.native_balance,
                    "public_key": acct.public_key,
                }
                for addr, acct in self.accounts.items()
            },
            "contracts": {to_hex(addr): c.to_record() for addr, c in self.contracts.items()},
            "head": self.head,
            "height": self.height,
        }


def state_digest(state: ChainState) -> bytes:
    """Full-state fingerprint: nonces, balances, keys and token states included."""
    return hash_bytes(canonical_encode(state.to_record()))


@dataclass
class BlockHeader:
    number: int
    parent_hash: bytes
    timestamp: int
    difficulty: int
    merkle_root: bytes
    nonce: int = 0

    def to_wire(self) -> dict:
        return {
            "number": self.number,
            "parent_hash": self.parent_hash,
            "timestamp": self.timestamp,
            "difficulty": self.difficulty,
            "merkle_root": self.merkle_root,
            "nonce": self.nonce,
        }

    def header_hash(self) -> bytes:
        return hash_bytes(canonical_encode(self.to_wire()))

    @classmethod
    def from_wire(cls, record: object) -> "BlockHeader":
        expect_keys(
            record,
            {"number", "parent_hash", "timestamp", "difficulty", "merkle_root", "nonce"},
            "block header",
        )
        return cls(
            number=decode_uint(record["number"], U64_MAX),
            parent_hash=decode_hex(record["parent_hash"], 32),
            timestamp=decode_uint(record["timestamp"], U64_MAX),
            difficulty=decode_uint(record["difficulty"], U64_MAX),
            merkle_root=decode_hex(record["merkle_root"], 32),
            nonce=decode_uint(record["nonce"], U64_MAX),
        )


@dataclass
class Block:
    header: BlockHeader
    transactions: list[Transaction] = field(default_factory=list)

    def to_wire(self) -> dict:
        return {
            "header": self.header.to_wire(),
            "transactions": [tx.to_wire() for tx in self.transactions],
        }

    @classmethod
    def from_wire(cls, record: object) -> "Block":
        expect_keys(record, {"header", "transactions"}, "block")
        txs = record["transactions"]
        if not isinstance(txs, list):
            raise DecodeError("block: transactions must be a list")
        return cls(
            header=BlockHeader.from_wire(record["header"]),
            transactions=[Transaction.from_wire(t) for t in txs],
        )


@dataclass
class Receipt:
    tx_hash: bytes
    status: str  # "Success" | "Reverted"
    error: str | None
    block_number: int
    tx_index: int
    gas_used: int

    def to_record(self) -> dict:
        return {
            "tx_hash": to_hex(self.tx_hash),
            "status": self.status,
            "error": self.error,
            "block_number": self.block_number,
            "tx_index": self.tx_index,
            "gas_used": self.gas_used,
        }


def meets_target(digest: bytes, difficulty: int) -> bool:
    """True iff the digest, read big-endian, has at least ``difficulty`` leading zero bits."""
    return int.from_bytes(digest, "big") < (1 << (256 - difficulty))


def compute_merkle_root(tx_hashes: list[bytes]) -> bytes:
    """Binary merkle tree; an odd level duplicates its last node.

    A single leaf is still paired with itself, so the root of [h] is
    hash(h || h), never h.  No transactions hashes the empty input.
    """
    if not tx_hashes:
        return hash_bytes(b"")
    level = list(tx_hashes)
    while True:
        if len(level) % 2 == 1:
            level.append(level[-1])
        level = [hash_bytes(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
        if len(level) == 1:
            return level[0]


@dataclass
class GenesisConfig:
    chain_id: int
    difficulty: int
    allocations: dict[bytes, int] = field(default_factory=dict)
    registered_keys: dict[bytes, bytes] = field(default_factory=dict)

    def to_wire(self) -> dict:
        return {
            "chain_id": self.chain_id,
            "difficulty": self.difficulty,
            "allocations": {to_hex(a): v for a, v in self.allocations.items()},
            "registered_keys": {to_hex(a): k for a, k in self.registered_keys.items()},
        }

    @classmethod
    def from_wire(cls, record: object) -> "GenesisConfig":
        expect_keys(record, {"chain_id", "difficulty", "allocations", "registered_keys"}, "genesis config")
        allocs = record["allocations"]
        keys = record["registered_keys"]
        if not isinstance(allocs, dict) or not isinstance(keys, dict):
            raise DecodeError("genesis config: allocations and registered_keys must be objects")
        return cls(
            chain_id=decode_uint(record["chain_id"], U64_MAX),
            difficulty=decode_uint(record["difficulty"], U64_MAX),
            allocations={decode_hex(a, 20): decode_uint(v) for a, v in allocs.items()},
            registered_keys={decode_hex(a, 20): decode_hex(k, 32) for a, k in keys.items()},
        )


def create_genesis(config: GenesisConfig) -> tuple[Block, ChainState]:
    """Block number 0: zero parent, timestamp 0, nonce 0, exempt from the PoW target."""
    if config.difficulty > MAX_DIFFICULTY:
        raise ValueError(f"difficulty must be <= {MAX_DIFFICULTY}")
    header = BlockHeader(
        number=0,
        parent_hash=GENESIS_PARENT,
        timestamp=0,
        difficulty=config.difficulty,
        merkle_root=compute_merkle_root([]),
        nonce=0,
    )
    block = Block(header=header)
    state = ChainState(chain_id=config.chain_id, difficulty=config.difficulty)
    for addr, amount in config.allocations.items():
        state._mutable_account(addr).native_balance = amount
    for addr, key in config.registered_keys.items():
        state._mutable_account(addr).public_key = key
    state.head = header.header_hash()
    state.height = 0
    return block, state


def native_amount(action) -> int:
    return action.amount if isinstance(action, NativeTransfer) else 0


def _validate(state: ChainState, tx: Transaction, expected_nonce: int) -> None:
    if tx.chain_id != state.chain_id:
        raise ValidationError("BadChainId")
    account = state.account(tx.sender)
    if not account.public_key or not verify_signature(
        account.public_key, tx.signing_digest(), tx.signature
    ):
        raise ValidationError("BadSignature")
    if tx.nonce != expected_nonce:
        raise ValidationError("BadNonce")
    if tx.gas_limit < fixed_gas_cost(tx.action):
        raise ValidationError("InsufficientGasLimit")
    if account.native_balance < tx.gas_limit * tx.gas_price + native_amount(tx.action):
        raise ValidationError("InsufficientFunds")


def validate_transaction(state: ChainState, tx: Transaction) -> None:
    """Raise ValidationError naming the first failed check, in documented order.

    The nonce check is strict: the transaction must carry exactly the
    account's next nonce.  Queueing of later nonces behind pending ones
    is a mempool concern, not a chain rule.
    """
    _validate(state, tx, state.account(tx.sender).nonce)


class Mempool:
    """Pending transactions keyed by (sender, nonce).

    A sender may queue consecutive nonces: a submission is accepted when
    its nonce extends the sender's pending run that starts at the account
    nonce — gaps are still BadNonce.  A duplicate key replaces the held
    transaction only when its gas price is strictly higher; equal or
    lower is rejected as MempoolDuplicate.
    """

    def __init__(self):
        self._by_key: dict[tuple[bytes, int], Transaction] = {}

    def __len__(self) -> int:
        return len(self._by_key)

    def transactions(self) -> list[Transaction]:
        return list(self._by_key.values())

    def contains_hash(self, tx_hash: bytes) -> bool:
        return any(tx.tx_hash() == tx_hash for tx in self._by_key.values())

    def submit(self, state: ChainState, tx: Transaction) -> bytes:
        next_free = state.account(tx.sender).nonce
        while (tx.sender, next_free) in self._by_key:
            next_free += 1
        held = self._by_key.get((tx.sender, tx.nonce))
        _validate(state, tx, tx.nonce if held is not None else next_free)
        if held is not None and tx.gas_price <= held.gas_price:
            raise ValidationError("MempoolDuplicate")
        self._by_key[(tx.sender, tx.nonce)] = tx
        return tx.tx_hash()

    def remove(self, tx: Transaction) -> None:
        key = (tx.sender, tx.nonce)
        held = self._by_key.get(key)
        if held is not None and held.tx_hash() == tx.tx_hash():
            del self._by_key[key]

    def prune_stale(self, state: ChainState) -> None:
        """Drop entries whose nonce the chain has already passed."""
        stale = [key for key, tx in self._by_key.items() if tx.nonce < state.account(tx.sender).nonce]
        for key in stale:
            del self._by_key[key]


def _execute_action(state: ChainState, tx: Transaction) -> str | None:
    """Run the action against ``state``; returns a revert code or None.

    The caller has already escrowed gas; this only moves value and token
    state.  Token machines check everything before mutating, so a revert
    leaves ``state`` untouched.
    """
    action = tx.action
    try:
        if isinstance(action, NativeTransfer):
            state.debit(tx.sender, action.amount)
            state.credit(action.to, action.amount)
            return None
        if isinstance(action, DeployFungible):
            addr, token = deploy_fungible(
                tx.sender, action.name, action.symbol, action.decimals,
                action.total_supply, tx.nonce,
            )
            state.contracts[addr] = token
            return None
        if isinstance(action, DeployNft):
            addr, token = deploy_nft(tx.sender, action.name, action.symbol, tx.nonce)
            state.contracts[addr] = token
            return None
        contract = state.contracts.get(action.contract)
        if contract is None:
            raise TokenRevert("NoSuchContract")
        apply_call(contract, tx.sender, action.method, action.args)
        return None
    except TokenRevert as revert:
        return revert.code


def _execute_transaction(state: ChainState, tx: Transaction, block_number: int, tx_index: int) -> Receipt:
    """Escrow gas, run the action, refund unused gas, bump the nonce.

    Mutates ``state`` in place; callers hand in a clone they own.  The
    transaction must already have passed validate_transaction against
    this state.
    """
    gas_cost = fixed_gas_cost(tx.action)
    account = state._mutable_account(tx.sender)
    account.native_balance -= tx.gas_limit * tx.gas_price
    error = _execute_action(state, tx)
    # a revert still consumes the action's full fixed gas
    account = state._mutable_account(tx.sender)
    account.native_balance += (tx.gas_limit - gas_cost) * tx.gas_price
    account.nonce += 1
    return Receipt(
        tx_hash=tx.tx_hash(),
        status="Success" if error is None else "Reverted",
        error=error,
        block_number=block_number,
        tx_index=tx_index,
        gas_used=gas_cost,
    )


def mine_block(
    state: ChainState,
    mempool: Mempool,
    parent: BlockHeader,
    difficulty: int,
    timestamp: int,
) -> Block:
    """Fill a block from the mempool and search the PoW nonce.

    Candidates are tried in (gas_price desc, tx_hash asc) order; after
    each inclusion the scan restarts so a sender's next nonce becomes
    eligible as soon as its predecessor is in.  Transactions that do not
    validate against the evolving scratch state are skipped.
    """
    scratch = state.clone()
    candidates = sorted(mempool.transactions(), key=lambda tx: (-tx.gas_price, tx.tx_hash()))
    chosen: list[Transaction] = []
    included: set[bytes] = set()
    gas_total = 0
    progress = True
    while progress:
        progress = False
        for tx in candidates:
            tx_hash = tx.tx_hash()
            if tx_hash in included or gas_total + tx.gas_limit > BLOCK_GAS_CAP:
                continue
            try:
                validate_transaction(scratch, tx)
            except ValidationError:
                continue
            _execute_transaction(scratch, tx, parent.number + 1, len(chosen))
            chosen.append(tx)
            included.add(tx_hash)
            gas_total += tx.gas_limit
            progress = True
            break
    header = BlockHeader(
        number=parent.number + 1,
        parent_hash=parent.header_hash(),
        timestamp=timestamp,
        difficulty=difficulty,
        merkle_root=compute_merkle_root([tx.tx_hash() for tx in chosen]),
        nonce=0,
    )
    while not meets_target(header.header_hash(), difficulty):
        header.nonce += 1
    return Block(header=header, transactions=chosen)


def verify_block(state: ChainState, parent: BlockHeader, block: Block) -> None:
    """Raise BlockError naming the first failed check, in documented order."""
    header = block.header
    if header.number != parent.number + 1:
        raise BlockError("BadNumber")
    if header.parent_hash != parent.header_hash():
        raise BlockError("BadParent")
    if header.difficulty != state.difficulty or not meets_target(header.header_hash(), state.difficulty):
        raise BlockError("BadPow")
    if header.merkle_root != compute_merkle_root([tx.tx_hash() for tx in block.transactions]):
        raise BlockError("BadMerkleRoot")
    scratch = state.clone()
    for index, tx in enumerate(block.transactions):
        try:
            validate_transaction(scratch, tx)
        except ValidationError as err:
            raise BlockError("BadTransaction", detail=err.code, index=index) from None
        _execute_transaction(scratch, tx, header.number, index)


def apply_block(state: ChainState, block: Block) -> tuple[ChainState, list[Receipt]]:
    """Execute a verified block, returning the successor state and receipts."""
    new_state = state.clone()
    receipts = [
        _execute_transaction(new_state, tx, block.header.number, index)
        for index, tx in enumerate(block.transactions)
    ]
    new_state.head = block.header.header_hash()
    new_state.height = block.header.number
    return new_state, receipts


class ChainStore:
    """Queryable record of applied blocks and their receipts."""

    def __init__(self):
        self.blocks: list[Block] = []
        self._block_by_hash: dict[bytes, Block] = {}
        self._receipts: dict[bytes, Receipt] = {}

    def add_block(self, block: Block, receipts: list[Receipt]) -> None:
        self.blocks.append(block)
        self._block_by_hash[block.header.header_hash()] = block
        for receipt in receipts:
            self._receipts[receipt.tx_hash] = receipt

    @property
    def head_header(self) -> BlockHeader:
        return self.blocks[-1].header

    def block_by_number(self, number: int) -> Block | None:
        if 0 <= number < len(self.blocks):
            return self.blocks[number]
        return None

    def block_by_hash(self, block_hash: bytes) -> Block | None:
        return self._block_by_hash.get(block_hash)

    def receipt(self, tx_hash: bytes) -> Receipt | None:
        return self._receipts.get(tx_hash)
