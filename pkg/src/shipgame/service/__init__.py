"""HTTP facade, persistence, simulation and the operator CLI."""

from .config import ServerConfig
from .core import AuthError, GameService
from .persistence import CorruptSnapshot, PlayerStore

__all__ = ["AuthError", "CorruptSnapshot", "GameService", "PlayerStore", "ServerConfig"]
