"""Exact computation with ergodic tail-invariant measures on Bratteli diagrams."""

__version__ = "0.1.0"

from ._infinity import INF, Infinity, is_infinite

__all__ = ["INF", "Infinity", "is_infinite", "__version__"]
