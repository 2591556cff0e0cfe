"""Server configuration from environment variables.

STORM_MODEL_DIR points at a directory with one checkpoint subdirectory per
role (events/, infill/, score/, similarity/, srl/); STORM_PORT and
STORM_DEVICE select the listening port and torch device.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

ROLES = ("events", "infill", "score", "similarity", "srl")


class StartupError(RuntimeError):
    """The server refuses to start; the message names the failing role."""


@dataclass(frozen=True)
class DecodeParams:
    """Generation bounds per request; beam size arrives with each request."""

    max_new_tokens: int = 12
    max_input_tokens: int = 384


@dataclass(frozen=True)
class ServerConfig:
    model_dir: Path
    port: int = 8642
    device: str = "cpu"
    decode: DecodeParams = field(default_factory=DecodeParams)
    seed: int = 0

    @classmethod
    def from_env(cls) -> "ServerConfig":
        model_dir = os.environ.get("STORM_MODEL_DIR")
        if not model_dir:
            raise StartupError("STORM_MODEL_DIR is not set")
        return cls(
            model_dir=Path(model_dir),
            port=int(os.environ.get("STORM_PORT", "8642")),
            device=os.environ.get("STORM_DEVICE", "cpu"),
        )

    def role_path(self, role: str) -> Path:
        return self.model_dir / role
