"""Deterministic headless simulator for occlusion-based cooperative transport."""

__version__ = "0.1.0"
