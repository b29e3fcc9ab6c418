"""Certified grid bounds for standard bi-quadratic and multi-quadratic programs."""

__version__ = "0.1.0"
