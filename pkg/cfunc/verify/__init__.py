from .checks import registry
from .registry import CheckLevel, CheckRegistry

__all__ = ["CheckLevel", "CheckRegistry", "registry"]
