"""Situation-coverage test generation for autonomous-vehicle intersection testing."""

__version__ = "0.1.0"
