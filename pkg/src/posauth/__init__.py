"""Position-based physical-layer authentication for vehicle-to-infrastructure links."""

__version__ = "0.1.0"
