"""Certified Hankel determinants of Dirichlet series and explicit sequences."""

from .numerics import Ball, PrecisionPolicy, Sign, certify_sign

__version__ = "0.1.0"

__all__ = ["Ball", "PrecisionPolicy", "Sign", "certify_sign", "__version__"]
