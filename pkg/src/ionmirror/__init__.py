"""Simulation of specular-reflection (parity) gates on a trapped ion's vibrational state."""

__version__ = "0.1.0"
