"""Command line interface."""

from src.interfaces.cli.main import build_parser, main

__all__ = ["build_parser", "main"]
