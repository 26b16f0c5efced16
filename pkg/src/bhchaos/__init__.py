"""Chaos diagnostics for the Bose-Hubbard chain and the bosonic embedded GOE."""

__version__ = "0.1.0"
