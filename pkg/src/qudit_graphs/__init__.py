"""Simulation toolkit for qudit-encoded photonic graph states."""

__version__ = "0.1.0"
