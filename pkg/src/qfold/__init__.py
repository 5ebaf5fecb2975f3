"""Exact tools for sum-to-product identities from folded Cartan data."""

from .exactalg import LaurentPoly, RationalFunction
from .qseries import TruncatedSeries, pochhammer, series_invert, theta

__all__ = ["LaurentPoly", "RationalFunction", "TruncatedSeries", "pochhammer", "series_invert", "theta"]
__version__ = "0.1.0"
