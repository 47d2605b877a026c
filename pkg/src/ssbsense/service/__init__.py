"""FastAPI service wrapping the sensing library."""

from ssbsense.service.app import app, create_app

__all__ = ["app", "create_app"]
