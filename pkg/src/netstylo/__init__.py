"""Word-adjacency network stylometry with hybrid and tiebreaker classifier fusion."""

__version__ = "0.1.0"
