"""Negative Pell solubility, 2-parts of narrow class groups and their random models."""

__version__ = "0.1.0"
