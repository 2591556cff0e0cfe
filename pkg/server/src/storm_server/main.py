"""Process entry point: load every role, then serve."""

from __future__ import annotations

import sys

import uvicorn

from .app import create_app
from .config import ServerConfig, StartupError
from .registry import ModelRegistry


def serve() -> None:
    try:
        config = ServerConfig.from_env()
        registry = ModelRegistry(config)
    except StartupError as exc:
        print(f"refusing to start: {exc}", file=sys.stderr)
        raise SystemExit(1) from exc
    uvicorn.run(create_app(registry), host="0.0.0.0", port=config.port, log_level="info")


if __name__ == "__main__":
    serve()
