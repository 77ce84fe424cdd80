"""Gravimetry precision bounds for free-falling and bouncing quantum probes."""

__version__ = "0.1.0"
