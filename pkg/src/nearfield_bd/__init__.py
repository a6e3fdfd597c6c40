"""Near-field array gain, beam depth, and distance-domain multiplexing."""

__version__ = "0.1.0"
