"""Analytical execution-time models for training CNNs on many-core processors."""

__version__ = "0.1.0"
