"""Exact decision procedures and constructive point building for toric pairs over Q."""

__version__ = "0.1.0"
