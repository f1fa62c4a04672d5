"""Fungible and non-fungible token state machines.

Two deterministic machines cover the platform's asset semantics: a
fungible token (per-address balances plus spender allowances, with
owner-gated mint and open burn-your-own) and an NFT registry (unique
token ids, each with exactly one owner, per-token approvals and
per-owner operator grants).

Mutating operations raise :class:`TokenRevert` carrying a stable revert
code before touching any state, so a failed call leaves the machine
unchanged.  Checks run in the order the revert codes are documented in
each method.  Balances, allowances and operator flags are kept sparse:
zero or false entries are deleted, never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .crypto import ADDRESS_LEN, ZERO_ADDRESS, hash_bytes
from .encoding import U256_MAX, canonical_encode, to_hex

MAX_SYMBOL_LEN = 11
MAX_DECIMALS = 18

# Wire method names accepted inside a token-call transaction.
FT_METHODS = ("ft_transfer", "ft_approve", "ft_transfer_from", "ft_mint", "ft_burn")
NFT_METHODS = (
    "nft_mint",
    "nft_transfer_from",
    "nft_approve",
    "nft_set_approval_for_all",
    "nft_burn",
)
TOKEN_METHODS = FT_METHODS + ("transfer_ownership",) + NFT_METHODS


class TokenRevert(Exception):
    """Rejected token operation; ``code`` is the stable receipt error string."""

    def __init__(self, code: str):
        super().__init__(code)
        self.code = code


def contract_address(deployer: bytes, nonce: int) -> bytes:
    """Deterministic contract address from the deployer and its account nonce."""
    record = {"deployer": deployer, "nonce": nonce}
    return hash_bytes(canonical_encode(record))[-ADDRESS_LEN:]


def _check_deploy_strings(name: str, symbol: str) -> None:
    if not name:
        raise TokenRevert("BadName")
    if not symbol or len(symbol) > MAX_SYMBOL_LEN:
        raise TokenRevert("BadSymbol")


def _bump(balances: dict[bytes, int], addr: bytes, delta: int) -> None:
    new = balances.get(addr, 0) + delta
    if new > 0:
        balances[addr] = new
    else:
        balances.pop(addr, None)


@dataclass
class FungibleToken:
    name: str
    symbol: str
    decimals: int
    total_supply: int
    owner: bytes
    balances: dict[bytes, int] = field(default_factory=dict)
    # owner address -> spender address -> amount, no zero entries
    allowances: dict[bytes, dict[bytes, int]] = field(default_factory=dict)

    kind = "ft"

    # -- views ------------------------------------------------------------
    def balance_of(self, addr: bytes) -> int:
        return self.balances.get(addr, 0)

    def allowance(self, owner: bytes, spender: bytes) -> int:
        return self.allowances.get(owner, {}).get(spender, 0)

    # -- mutators ----------------------------------------------------------
    def transfer(self, caller: bytes, to: bytes, amount: int) -> None:
        if self.balance_of(caller) < amount:
            raise TokenRevert("InsufficientBalance")
        if to == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        _bump(self.balances, caller, -amount)
        _bump(self.balances, to, amount)

    def approve(self, caller: bytes, spender: bytes, amount: int) -> None:
        # overwrite semantics; approving above the current balance is legal
        per_owner = self.allowances.setdefault(caller, {})
        if amount > 0:
            per_owner[spender] = amount
        else:
            per_owner.pop(spender, None)
        if not per_owner:
            self.allowances.pop(caller, None)

    def transfer_from(self, caller: bytes, from_: bytes, to: bytes, amount: int) -> None:
        if self.allowance(from_, caller) < amount:
            raise TokenRevert("InsufficientAllowance")
        if self.balance_of(from_) < amount:
            raise TokenRevert("InsufficientBalance")
        if to == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        self.approve(from_, caller, self.allowance(from_, caller) - amount)
        _bump(self.balances, from_, -amount)
        _bump(self.balances, to, amount)

    def mint(self, caller: bytes, to: bytes, amount: int) -> None:
        if caller != self.owner:
            raise TokenRevert("NotOwner")
        if self.total_supply + amount > U256_MAX:
            raise TokenRevert("ArithmeticOverflow")
        if to == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        self.total_supply += amount
        _bump(self.balances, to, amount)

    def burn(self, caller: bytes, amount: int) -> None:
        if self.balance_of(caller) < amount:
            raise TokenRevert("InsufficientBalance")
        _bump(self.balances, caller, -amount)
        self.total_supply -= amount

    def transfer_ownership(self, caller: bytes, new_owner: bytes) -> None:
        if caller != self.owner:
            raise TokenRevert("NotOwner")
        if new_owner == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        self.owner = new_owner

    # -- plumbing ----------------------------------------------------------
    def clone(self) -> "FungibleToken":
        return FungibleToken(
            name=self.name,
            symbol=self.symbol,
            decimals=self.decimals,
            total_supply=self.total_supply,
            owner=self.owner,
            balances=dict(self.balances),
            allowances={o: dict(s) for o, s in self.allowances.items()},
        )

    def to_record(self) -> dict:
        return {
            "kind": "ft",
            "name": self.name,
            "symbol": self.symbol,
            "decimals": self.decimals,
            "total_supply": self.total_supply,
            "owner": self.owner,
            "balances": {to_hex(a): v for a, v in self.balances.items()},
            "allowances": {
                to_hex(o): {to_hex(s): v for s, v in per.items()}
                for o, per in self.allowances.items()
            },
        }


@dataclass
class NftRegistry:
    name: str
    symbol: str
    owner: bytes  # contract admin, the only address allowed to mint
    owners: dict[int, bytes] = field(default_factory=dict)
    token_uris: dict[int, str] = field(default_factory=dict)
    token_approvals: dict[int, bytes] = field(default_factory=dict)
    # owner address -> operator address -> True, no false entries
    operator_approvals: dict[bytes, dict[bytes, bool]] = field(default_factory=dict)

    kind = "nft"

    # -- views ------------------------------------------------------------
    def owner_of(self, token_id: int) -> bytes | None:
        return self.owners.get(token_id)

    def token_uri(self, token_id: int) -> str | None:
        return self.token_uris.get(token_id)

    def get_approved(self, token_id: int) -> bytes | None:
        return self.token_approvals.get(token_id)

    def is_approved_for_all(self, owner: bytes, operator: bytes) -> bool:
        return self.operator_approvals.get(owner, {}).get(operator, False)

    def total_minted(self) -> int:
        """Count of live (un-burned) tokens."""
        return len(self.owners)

    # -- mutators ----------------------------------------------------------
    def mint(self, caller: bytes, to: bytes, token_id: int, uri: str) -> None:
        if caller != self.owner:
            raise TokenRevert("NotOwner")
        if token_id in self.owners:
            raise TokenRevert("TokenExists")
        if to == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        self.owners[token_id] = to
        self.token_uris[token_id] = uri

    def transfer_from(self, caller: bytes, from_: bytes, to: bytes, token_id: int) -> None:
        holder = self.owners.get(token_id)
        if holder is None:
            raise TokenRevert("NoSuchToken")
        if holder != from_:
            raise TokenRevert("WrongOwner")
        authorized = (
            caller == from_
            or self.token_approvals.get(token_id) == caller
            or self.is_approved_for_all(from_, caller)
        )
        if not authorized:
            raise TokenRevert("NotAuthorized")
        if to == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        self.owners[token_id] = to
        self.token_approvals.pop(token_id, None)

    def approve(self, caller: bytes, approved: bytes, token_id: int) -> None:
        holder = self.owners.get(token_id)
        if holder is None:
            raise TokenRevert("NoSuchToken")
        if caller != holder and not self.is_approved_for_all(holder, caller):
            raise TokenRevert("NotAuthorized")
        if approved == ZERO_ADDRESS:
            self.token_approvals.pop(token_id, None)
        else:
            self.token_approvals[token_id] = approved

    def set_approval_for_all(self, caller: bytes, operator: bytes, approved: bool) -> None:
        if operator == caller:
            raise TokenRevert("SelfOperator")
        per_owner = self.operator_approvals.setdefault(caller, {})
        if approved:
            per_owner[operator] = True
        else:
            per_owner.pop(operator, None)
        if not per_owner:
            self.operator_approvals.pop(caller, None)

    def burn(self, caller: bytes, token_id: int) -> None:
        # owner-only: a per-token approval or operator grant does not allow burning
        holder = self.owners.get(token_id)
        if holder is None:
            raise TokenRevert("NoSuchToken")
        if holder != caller:
            raise TokenRevert("NotAuthorized")
        del self.owners[token_id]
        del self.token_uris[token_id]
        self.token_approvals.pop(token_id, None)

    def transfer_ownership(self, caller: bytes, new_owner: bytes) -> None:
        if caller != self.owner:
            raise TokenRevert("NotOwner")
        if new_owner == ZERO_ADDRESS:
            raise TokenRevert("ZeroAddressRecipient")
        self.owner = new_owner

    # -- plumbing ----------------------------------------------------------
    def clone(self) -> "NftRegistry":
        return NftRegistry(
            name=self.name,
            symbol=self.symbol,
            owner=self.owner,
            owners=dict(self.owners),
            token_uris=dict(self.token_uris),
            token_approvals=dict(self.token_approvals),
            operator_approvals={o: dict(p) for o, p in self.operator_approvals.items()},
        )

    def to_record(self) -> dict:
        return {
            "kind": "nft",
            "name": self.name,
            "symbol": self.symbol,
            "owner": self.owner,
            "owners": {str(t): to_hex(a) for t, a in self.owners.items()},
            "token_uris": {str(t): u for t, u in self.token_uris.items()},
            "token_approvals": {str(t): to_hex(a) for t, a in self.token_approvals.items()},
            "operator_approvals": {
                to_hex(o): {to_hex(op): True for op in per}
                for o, per in self.operator_approvals.items()
            },
        }


TokenState = FungibleToken | NftRegistry


def deploy_fungible(
    deployer: bytes,
    name: str,
    symbol: str,
    decimals: int,
    total_supply: int,
    nonce: int,
) -> tuple[bytes, FungibleToken]:
    """Create a fungible token; the whole supply starts on the deployer."""
    _check_deploy_strings(name, symbol)
    if decimals > MAX_DECIMALS:
        raise TokenRevert("BadDecimals")
    state = FungibleToken(
        name=name,
        symbol=symbol,
        decimals=decimals,
        total_supply=total_supply,
        owner=deployer,
    )
    if total_supply > 0:
        state.balances[deployer] = total_supply
    return contract_address(deployer, nonce), state


def deploy_nft(deployer: bytes, name: str, symbol: str, nonce: int) -> tuple[bytes, NftRegistry]:
    """Create an empty NFT registry administered by the deployer."""
    _check_deploy_strings(name, symbol)
    return contract_address(deployer, nonce), NftRegistry(name=name, symbol=symbol, owner=deployer)


def apply_call(state: TokenState, caller: bytes, method: str, args: dict) -> None:
    """Dispatch a decoded token-call onto the right machine.

    ``args`` values are already decoded (addresses as bytes, amounts as
    ints).  Raises TokenRevert for domain failures, including calling a
    method of the wrong token kind.
    """
    if method == "transfer_ownership":
        state.transfer_ownership(caller, args["new_owner"])
        return
    if method in FT_METHODS:
        if state.kind != "ft":
            raise TokenRevert("WrongTokenKind")
        ft: FungibleToken = state
        if method == "ft_transfer":
            ft.transfer(caller, args["to"], args["amount"])
        elif method == "ft_approve":
            ft.approve(caller, args["spender"], args["amount"])
        elif method == "ft_transfer_from":
            ft.transfer_from(caller, args["from"], args["to"], args["amount"])
        elif method == "ft_mint":
            ft.mint(caller, args["to"], args["amount"])
        else:
            ft.burn(caller, args["amount"])
        return
    if method in NFT_METHODS:
        if state.kind != "nft":
            raise TokenRevert("WrongTokenKind")
        nft: NftRegistry = state
        if method == "nft_mint":
            nft.mint(caller, args["to"], args["token_id"], args["uri"])
        elif method == "nft_transfer_from":
            nft.transfer_from(caller, args["from"], args["to"], args["token_id"])
        elif method == "nft_approve":
            nft.approve(caller, args["approved"], args["token_id"])
        elif method == "nft_set_approval_for_all":
            nft.set_approval_for_all(caller, args["operator"], args["approved"])
        else:
            nft.burn(caller, args["token_id"])
        return
    raise TokenRevert("BadMethod")
