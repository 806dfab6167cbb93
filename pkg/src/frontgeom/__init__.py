"""Focal and parallel surfaces of regular surfaces, their singularities and edge invariants."""

__version__ = "0.1.0"
