"""Exact and Born-Oppenheimer eigenstates of bilinearly coupled oscillators."""

from .params import StateIndex, SystemParams, validate

__all__ = ["StateIndex", "SystemParams", "validate"]
__version__ = "0.1.0"
