"""Anticyclotomic p-adic L-function toolkit at desk scale."""

__version__ = "0.1.0"
