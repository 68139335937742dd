"""Numerics for glued approximate solutions of Hitchin's equations near ramification points."""

__version__ = "0.1.0"
