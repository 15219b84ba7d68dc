from __future__ import annotations

import socket
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from gridwatch.model import PortalState, add_resource, update_resource
from gridwatch.store import PortalStore

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_DIR = REPO_ROOT / "demo"
XSLT_CASES_DIR = Path(__file__).resolve().parent / "data" / "xslt_cases"


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def free_ports(n: int) -> list[int]:
    # hold all sockets open until every port is picked, so they are distinct
    socks = []
    try:
        for _ in range(n):
            s = socket.socket()
            s.bind(("127.0.0.1", 0))
            socks.append(s)
        return [s.getsockname()[1] for s in socks]
    finally:
        for s in socks:
            s.close()


@pytest.fixture
def store(tmp_path) -> PortalStore:
    return PortalStore(tmp_path / "portal")


@pytest.fixture
def demo_registry():
    from gridwatch.gatherers import load_registry

    return load_registry(DEMO_DIR / "gatherers.json")


def make_resource(store: PortalStore, hostname: str, **fields) -> str:
    """Add one resource, apply fields, save; returns the new id."""
    state = store.load_or_init()
    state, resource = add_resource(state, hostname)
    if fields:
        state = update_resource(state, resource.id, fields)
    store.save_state(state)
    return resource.id


def seeded_state(n: int = 3) -> PortalState:
    state = PortalState()
    for i in range(n):
        state, _ = add_resource(state, f"node{i}.example.org")
    return state
