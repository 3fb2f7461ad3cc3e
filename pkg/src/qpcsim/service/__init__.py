"""HTTP service layer: FastAPI app plus pydantic request/response models."""

from .app import app, create_app
from .schemas import Scenario

__all__ = ["Scenario", "app", "create_app"]
