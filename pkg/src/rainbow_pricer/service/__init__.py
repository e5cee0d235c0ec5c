"""HTTP service exposing the pricing library."""

from rainbow_pricer.service.app import create_app

__all__ = ["create_app"]
