"""
VITACEP - Command-Line Interface
"""

from vitacep.cli.main import build_parser, main

__all__ = ["build_parser", "main"]
