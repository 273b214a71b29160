"""Moments of quadratic Hecke L-functions over Q(i), computed at desk scale."""

from __future__ import annotations

__version__ = "0.1.0"

from .gaussian import GaussianInt, factor, gcd, norm, primary_associate  # noqa: E402
from .symbol import chi_d, symbol  # noqa: E402

__all__ = ["GaussianInt", "factor", "gcd", "norm", "primary_associate", "chi_d", "symbol", "__version__"]
