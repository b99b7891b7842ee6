"""Offline-testable conversational program-repair benchmark harness."""

__version__ = "0.1.0"
