"""Open-system model of a mirror coupled to a 1D field through an internal oscillator."""

__version__ = "0.1.0"
