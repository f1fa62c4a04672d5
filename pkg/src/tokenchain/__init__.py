"""Self-contained asset tokenization sandbox.

A simulated proof-of-work chain with ERC-20/ERC-721-style token
machines, served by a single HTTP node and driven by a CLI or browser
client.  Everything is deterministic given the inputs: canonical
encodings, SHA-256 hashing and Ed25519 signatures keep transaction ids,
block hashes and state digests reproducible across runs and clients.
"""

from .crypto import (
    KeyPair,
    derive_address,
    generate_keypair,
    hash_bytes,
    sign_digest,
    verify_signature,
)
from .encoding import DecodeError, EncodeError, canonical_encode, to_hex
from .ledger import (
    Account,
    Block,
    BlockHeader,
    ChainState,
    ChainStore,
    GenesisConfig,
    Mempool,
    Receipt,
    ValidationError,
    apply_block,
    compute_merkle_root,
    create_genesis,
    mine_block,
    state_digest,
    validate_transaction,
    verify_block,
)
from .tokens import (
    FungibleToken,
    NftRegistry,
    TokenRevert,
    contract_address,
    deploy_fungible,
    deploy_nft,
)
from .tx import (
    DeployFungible,
    DeployNft,
    NativeTransfer,
    TokenCall,
    Transaction,
    sign_transaction,
)

__version__ = "0.1.0"
