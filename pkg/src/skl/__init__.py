"""Secure key leasing from BB84 states: simulator, schemes, lattice backend and games."""

__version__ = "0.1.0"
