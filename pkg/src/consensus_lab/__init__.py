"""Simulation lab for finite-time and fixed-time consensus on switched networks."""

__version__ = "0.1.0"
