"""Reference model service implementing the story-planner wire protocol."""

from .app import create_app
from .config import ServerConfig, StartupError
from .registry import ModelRegistry

__all__ = ["create_app", "ModelRegistry", "ServerConfig", "StartupError"]
