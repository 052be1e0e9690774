"""Certified verification of harmonic-number series identities and supercongruences."""

__version__ = "0.1.0"
