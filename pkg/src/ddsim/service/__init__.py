"""HTTP service wrapping the simulator and analysis pipeline."""

from .app import app, create_app

__all__ = ["app", "create_app"]
