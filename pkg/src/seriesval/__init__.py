"""Discrete valuations on fields of formal power series, in exact arithmetic."""

__version__ = "0.1.0"
