"""Exact-arithmetic kernel for exterior superalgebra and polynomial supergeometry.

Everything is computed over the rationals with zero-tolerance equality.
"""

__version__ = "0.1.0"
