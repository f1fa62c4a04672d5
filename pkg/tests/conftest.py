"""Shared fixtures: deterministic actors, funded chains, node factories."""

from __future__ import annotations

import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass

import pytest
import uvicorn

from tokenchain.crypto import KeyPair, derive_address, generate_keypair, hash_bytes
from tokenchain.ledger import GenesisConfig, create_genesis
from tokenchain.node import Node, NodeConfig, create_app
from tokenchain.tx import Transaction, sign_transaction


@dataclass
class Actor:
    pair: KeyPair
    address: bytes

    @property
    def public_key(self) -> bytes:
        return self.pair.public_key

    @property
    def private_key(self) -> bytes:
        return self.pair.private_key


def make_actor(label: str) -> Actor:
    pair = generate_keypair(hash_bytes(label.encode()))
    return Actor(pair=pair, address=derive_address(pair.public_key))


@pytest.fixture(scope="session")
def actors() -> list[Actor]:
    return [make_actor(f"actor-{i}") for i in range(6)]


def funded_genesis(actors, balance=10**18, chain_id=1, difficulty=0):
    config = GenesisConfig(
        chain_id=chain_id,
        difficulty=difficulty,
        allocations={a.address: balance for a in actors},
        registered_keys={a.address: a.public_key for a in actors},
    )
    return create_genesis(config)


def signed_tx(actor: Actor, nonce: int, action, gas_limit=None, gas_price=1, chain_id=1):
    from tokenchain.ledger import fixed_gas_cost

    tx = Transaction(
        chain_id=chain_id,
        sender=actor.address,
        nonce=nonce,
        action=action,
        gas_limit=fixed_gas_cost(action) if gas_limit is None else gas_limit,
        gas_price=gas_price,
    )
    return sign_transaction(tx, actor.private_key)


@contextmanager
def live_node(journal_path: str, **overrides):
    """Run a real HTTP server on an ephemeral port around a fresh node."""
    settings = dict(chain_id=1, difficulty=1, journal_path=journal_path, port=0)
    settings.update(overrides)
    node = Node(NodeConfig(**settings))
    if node.config.auto_mine:
        node.start_auto_mine()
    server = uvicorn.Server(
        uvicorn.Config(create_app(node), host="127.0.0.1", port=0, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline or not thread.is_alive():
            raise RuntimeError("node server failed to start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    try:
        yield f"http://127.0.0.1:{port}", node
    finally:
        server.should_exit = True
        thread.join(timeout=10)
        node.close()
