"""Rank exchange-traded instruments by compression of their symbolized price changes."""

__version__ = "0.1.0"
