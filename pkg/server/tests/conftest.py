"""Shared server fixtures: tiny checkpoints, in-process app, live socket."""

import socket
import sys
import threading
import time
from pathlib import Path

import pytest
import uvicorn
from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).parent.parent / "tools"))
from make_tiny_checkpoints import main as make_checkpoints  # noqa: E402

from storm_server.app import create_app
from storm_server.config import ServerConfig
from storm_server.registry import ModelRegistry


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory) -> Path:
    return make_checkpoints(tmp_path_factory.mktemp("checkpoints"))


@pytest.fixture(scope="session")
def registry(model_dir) -> ModelRegistry:
    return ModelRegistry(ServerConfig(model_dir=model_dir))


@pytest.fixture(scope="session")
def app(registry):
    return create_app(registry)


@pytest.fixture(scope="session")
def client(app) -> TestClient:
    return TestClient(app)


@pytest.fixture(scope="session")
def live_endpoint(app):
    """The app on a real socket, for clients that speak actual HTTP."""
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("uvicorn did not start in time")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
