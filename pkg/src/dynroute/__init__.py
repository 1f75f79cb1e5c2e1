"""Dynamic bi-objective vehicle routing with era-based re-optimization."""

__version__ = "0.1.0"
